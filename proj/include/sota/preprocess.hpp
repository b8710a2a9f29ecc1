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

#ifndef SOTA__PREPROCESS_HPP
#define SOTA__PREPROCESS_HPP

#include <sota/network.hpp>
#include <sota/policy.hpp>
#include <sota/potentials.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace sota {

//==============================================================================
/// f_i(t): node i can be reached with t remaining while following the
/// optimal policy from the source. Rows are packed into 64-bit words.
class RealizabilityFlags
{
public:
  RealizabilityFlags(NodeIndex node_count, EdgeIndex edge_count, Bin horizon);

  Bin horizon() const { return _horizon; }
  NodeIndex node_count() const { return static_cast<NodeIndex>(_rows.size()); }

  bool reachable(NodeIndex i, Bin t) const
  {
    const auto& row = _rows[static_cast<std::size_t>(i)];
    return (row[static_cast<std::size_t>(t) / 64] >> (t % 64)) & 1u;
  }

  void mark(NodeIndex i, Bin t)
  {
    auto& row = _rows[static_cast<std::size_t>(i)];
    row[static_cast<std::size_t>(t) / 64] |= std::uint64_t{1} << (t % 64);
  }

  /// ORs `bits` (bit r = position r) into row i shifted by `offset`.
  /// Positions outside [0, horizon] are dropped.
  void mark_shifted(NodeIndex i, const std::vector<std::uint64_t>& bits, Bin offset);

  /// Edges used by the policy at some realizable state.
  const std::vector<bool>& realizable_edges() const { return _edges; }
  void mark_edge(EdgeIndex e) { _edges[static_cast<std::size_t>(e)] = true; }

  bool operator==(const RealizabilityFlags&) const = default;

private:
  Bin _horizon;
  std::vector<std::vector<std::uint64_t>> _rows;
  std::vector<bool> _edges;
};

enum class RealizabilitySeed
{
  /// Only (source, T) is a start state: one query with budget T.
  query_budget,
  /// Every (source, t <= T) is a start state: the union over all query
  /// budgets up to T.
  all_budgets,
};

enum class RealizabilityBackend
{
  /// Reverse sweep over the update order, O(|V| T^2 / 64).
  bitset,
  /// Time-reversed streaming convolution of 0/1 vectors with each edge's
  /// support indicator.
  convolution,
};

struct RealizabilityOptions
{
  RealizabilitySeed seed = RealizabilitySeed::query_budget;
  RealizabilityBackend backend = RealizabilityBackend::bitset;
  ZdcConfig zdc;
};

/// `order` must be a valid update order toward the policy's destination
/// covering exactly [0, budget]; ArgumentError otherwise, or when the
/// budget exceeds the policy horizon.
RealizabilityFlags compute_realizability(
  const StochasticGraph& g,
  const PolicyTable& policy,
  NodeIndex source,
  Bin budget,
  const UpdateOrder& order,
  const RealizabilityOptions& options = {});

//==============================================================================
struct PotentialOptions
{
  PotentialMode mode = PotentialMode::policy;
  int k_intervals = 1;

  /// Restrict to queries starting in this region. Policy mode then keeps
  /// only edges realizable from those sources.
  std::optional<int> source_region;

  Backend backend = Backend::zdc;
  ZdcConfig zdc;
  int threads = 1;
};

/// Activation potentials toward every node of `region` for budgets up to
/// `horizon`.
///
/// Policy mode without a source region records, for every edge, the
/// remaining budgets t at which it is the optimal choice at its tail with
/// u > 0. With a source region it records the query budgets at which the
/// edge is realizable from some source in the region. Path mode records the
/// query budgets at which the edge lies on the returned optimal path from
/// some source (source region members, or every node); a path found at one
/// budget is reused at the next as long as it keeps its optimality
/// certificate.
PotentialTable compute_arc_potentials(
  const StochasticGraph& g,
  const RegionPartition& partition,
  int region,
  Bin horizon,
  const PotentialOptions& options = {});

/// Tables for every destination region. Policy mode builds source-free
/// tables; path mode builds one table per (source region, destination
/// region) pair.
PotentialSet preprocess_regions(
  const StochasticGraph& g,
  const RegionPartition& partition,
  int grid_k,
  Bin horizon,
  const PotentialOptions& options = {});

} // namespace sota

#endif // SOTA__PREPROCESS_HPP
