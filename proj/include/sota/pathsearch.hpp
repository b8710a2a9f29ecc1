/*
 * Copyright (C) 2026 The sotaroute Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
*/

#ifndef SOTA__PATHSEARCH_HPP
#define SOTA__PATHSEARCH_HPP

#include <sota/network.hpp>
#include <sota/policy.hpp>

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace sota {

struct RankedPath
{
  std::vector<NodeIndex> nodes;
  std::vector<EdgeIndex> edges;
  double reliability = 0.0;
};

enum class SearchStatus
{
  found,
  /// u_source(T) = 0: no path can arrive on time.
  zero_probability,
  /// The destination cannot be reached over the (masked) graph.
  unreachable,
};

struct SearchStats
{
  std::size_t popped = 0;
  std::size_t pushed = 0;
  std::size_t queue_peak = 0;

  /// Largest child.key - parent.key over all generated children. Never
  /// positive beyond round-off for an admissible heuristic.
  double max_key_increase = -std::numeric_limits<double>::infinity();

  /// Largest key left in the queue when the best path was popped.
  double max_queued_key_at_finish = -std::numeric_limits<double>::infinity();
};

struct PathSearchOptions
{
  int k = 1;
  const EdgeMask* mask = nullptr;
  std::size_t max_queue = 1'000'000;
};

struct PathSearchResult
{
  SearchStatus status = SearchStatus::unreachable;
  std::vector<RankedPath> paths;
  SearchStats stats;
};

//==============================================================================
/// Best-first search over loop-free partial paths from one source.
///
/// A partial path P ending at node i is keyed by
///   r(P) = sum_t q_P(t) u_i(T - t),
/// the probability of arriving on time when following P to i and the
/// optimal policy afterwards. Extending P never raises its key, so the first
/// popped path that ends at the destination is a most reliable path.
///
/// Path distributions are truncated at the policy horizon rather than the
/// query budget, which lets still_optimal() re-check the incumbent at other
/// budgets against the frontier left by the last run.
class PathSearch
{
public:
  PathSearch(
    const StochasticGraph& g,
    const PolicyTable& policy,
    NodeIndex source,
    PathSearchOptions options = {});

  /// Throws ArgumentError when the budget exceeds the policy horizon and
  /// SearchBudgetExceeded when the queue outgrows options.max_queue.
  PathSearchResult run(Bin budget);

  /// True when the best path of the last run is provably still optimal at
  /// `budget`: no frontier entry's key exceeds the incumbent's reliability.
  /// False when there is no incumbent. Only valid for k = 1 searches.
  bool still_optimal(Bin budget) const;

  /// Best path of the last run, if any.
  const RankedPath* incumbent() const;

private:
  struct Label
  {
    int parent;
    EdgeIndex edge;
    NodeIndex node;
    int depth;
    double key;
    std::optional<Distribution> q;
  };

  bool on_path(int label, NodeIndex node) const;
  bool ranks_before(int a, int b) const;
  RankedPath materialize(int label) const;

  const StochasticGraph& _g;
  const PolicyTable& _policy;
  NodeIndex _source;
  PathSearchOptions _options;

  std::vector<Label> _labels;
  std::vector<int> _frontier;
  std::optional<int> _incumbent_label;
  std::optional<RankedPath> _incumbent;
};

/// Up to options.k most reliable loop-free source -> destination paths, best
/// first. `policy` must be computed toward the destination with horizon >=
/// budget, on the same mask as options.mask.
PathSearchResult sota_path(
  const StochasticGraph& g,
  const PolicyTable& policy,
  NodeIndex source,
  Bin budget,
  PathSearchOptions options = {});

/// cdf at `budget` of the convolution of the edges' distributions. Throws
/// ArgumentError when consecutive edges do not connect.
double path_reliability(
  const StochasticGraph& g, std::span<const EdgeIndex> edges, Bin budget);

/// Same for a node sequence; each consecutive pair must be joined by
/// exactly one edge.
double path_reliability_nodes(
  const StochasticGraph& g, std::span<const NodeIndex> nodes, Bin budget);

/// Exhaustive enumeration of loop-free paths. Ties within 1e-12 go to the
/// lexicographically smallest node sequence, then edge sequence. Refuses to
/// run (ArgumentError) on graphs with more than max_nodes nodes.
std::optional<RankedPath> brute_force_best_path(
  const StochasticGraph& g,
  NodeIndex source,
  NodeIndex dest,
  Bin budget,
  NodeIndex max_nodes = 12,
  const EdgeMask* mask = nullptr);

} // namespace sota

#endif // SOTA__PATHSEARCH_HPP
