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

#ifndef SOTA__HARNESS_HPP
#define SOTA__HARNESS_HPP

#include <sota/network.hpp>
#include <sota/pathsearch.hpp>
#include <sota/policy.hpp>
#include <sota/potentials.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sota {

//==============================================================================
struct LetPath
{
  std::vector<NodeIndex> nodes;
  std::vector<EdgeIndex> edges;
  /// Sum of edge means, in bins.
  double mean_bins = 0.0;
};

/// Least expected travel time path: Dijkstra on distribution means. Equal
/// costs go to the smaller predecessor node, then the smaller edge index.
/// Returns nullopt when d is unreachable from s.
std::optional<LetPath> let_path(const StochasticGraph& g, NodeIndex s, NodeIndex d);

//==============================================================================
struct ProblemInstance
{
  NodeIndex source = 0;
  NodeIndex dest = 0;
  Bin budget = 0;
  std::uint64_t seed = 0;

  // Budget selection record.
  std::vector<EdgeIndex> let_edges;
  Bin let_p5 = 0;
  Bin let_p95 = 0;
};

/// n instances with uniform (s, d), s != d, resampled until d is reachable,
/// and a budget uniform over [p5, p95] of the LET path's travel time.
/// Deterministic for a given seed.
std::vector<ProblemInstance> generate_instances(
  const StochasticGraph& g, std::size_t n, std::uint64_t seed);

//==============================================================================
struct BenchmarkConfig
{
  int repetitions = 3;
  int threads = 1;
  Backend backend = Backend::zdc;

  /// When set, every instance is also run on the pruned graph.
  const PotentialSet* potentials = nullptr;
};

struct RunMeasurement
{
  double policy_time_s = 0.0;
  double path_time_s = 0.0;
  double u_source = 0.0;
  RankedPath path;
  SearchStats stats;
  SearchStatus status = SearchStatus::unreachable;
  std::size_t edges_kept = 0;
};

struct BenchmarkRecord
{
  std::size_t index = 0;
  ProblemInstance instance;

  bool ok = false;
  std::string error;

  RunMeasurement full;
  std::optional<RunMeasurement> pruned;
  std::string pruning = "none";

  /// Mean travel time of the returned path, in bins.
  double path_mean_bins = 0.0;
};

/// Times the policy and the path query (policy given) per instance, taking
/// the median over config.repetitions. Failures are recorded per instance.
std::vector<BenchmarkRecord> run_benchmark(
  const StochasticGraph& g,
  const std::vector<ProblemInstance>& instances,
  const BenchmarkConfig& config = {});

/// Writes records.csv, plots/budget_vs_time.csv, plots/pathlen_vs_time.csv
/// and plots/plots.gp under `dir`.
void write_benchmark(const std::vector<BenchmarkRecord>& records, const std::string& dir);

//==============================================================================
struct LineFit
{
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = slope x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> values);

} // namespace sota

#endif // SOTA__HARNESS_HPP
