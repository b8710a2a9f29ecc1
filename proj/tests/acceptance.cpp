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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include "support.hpp"

#include <sota/harness.hpp>
#include <sota/pathsearch.hpp>
#include <sota/policy.hpp>
#include <sota/potentials.hpp>
#include <sota/preprocess.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

using namespace sota;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail)
{
  std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!pass)
    ++failures;
}

std::string fmt(const char* format, double a = 0, double b = 0, double c = 0, double d = 0)
{
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

//==============================================================================
void counterexample()
{
  const auto start = Clock::now();
  const auto g = test::counterexample();
  const auto pol = compute_policy(g, 2, 4);
  PathSearchOptions options;
  options.k = 3;
  const auto r = sota_path(g, pol, 0, 4, options);
  const double elapsed = since(start);

  bool ok = r.paths.size() == 3;
  std::ostringstream detail;
  if (ok)
  {
    const std::vector<EdgeIndex> best{1, 3};
    ok = r.paths[0].edges == best
      && std::abs(r.paths[0].reliability - 0.65) <= 1e-12
      && std::abs(r.paths[1].reliability - 0.60) <= 1e-12
      && std::abs(r.paths[2].reliability - 0.45) <= 1e-12;
    detail << "best " << describe_edge(g, r.paths[0].edges[0]) << ","
           << describe_edge(g, r.paths[0].edges[1]) << " = " << r.paths[0].reliability
           << "; ranking " << r.paths[0].reliability << ", " << r.paths[1].reliability
           << ", " << r.paths[2].reliability;
  }
  ok = ok && std::abs(pol.reliability(0, 4) - 0.65) <= 1e-12;
  ok = ok && pol.next_edge(0, 4) == 1 && pol.next_edge(0, 3) == 2;
  ok = ok && elapsed < 1.0;
  detail << "; u_v1(4) = " << pol.reliability(0, 4) << " via "
         << describe_edge(g, pol.next_edge(0, 4)) << "; u_v1(3) = " << pol.reliability(0, 3)
         << " via " << describe_edge(g, pol.next_edge(0, 3)) << "; " << elapsed << " s";
  report("counterexample_regression", ok, detail.str());
}

//==============================================================================
void oracle_equivalence()
{
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  int bad_value = 0;
  int bad_path = 0;
  int compared = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial)
  {
    const NodeIndex n = static_cast<NodeIndex>(2 + rng() % 9);
    const EdgeIndex m = static_cast<EdgeIndex>(std::min<std::uint64_t>(30, 2 * (n - 1) + rng() % 16));
    const auto g = test::random_graph(rng, {n, m, 1, 6, 6, true});
    const NodeIndex s = static_cast<NodeIndex>(rng() % static_cast<std::uint64_t>(n));
    NodeIndex d = static_cast<NodeIndex>(rng() % static_cast<std::uint64_t>(n));
    if (d == s)
      d = (d + 1) % n;
    const Bin T = static_cast<Bin>(1 + rng() % 64);

    const auto pol = compute_policy(g, d, T);
    const auto ours = sota_path(g, pol, s, T);
    const auto brute = brute_force_best_path(g, s, d, T);
    ++compared;

    const double mine = ours.paths.empty() ? 0.0 : ours.paths[0].reliability;
    const double theirs = brute ? brute->reliability : 0.0;
    worst = std::max(worst, std::abs(mine - theirs));
    if (std::abs(mine - theirs) > 1e-9)
      ++bad_value;

    if (!ours.paths.empty() && brute && ours.paths[0].edges != brute->edges)
    {
      // Different choice is only allowed for a reliability tie.
      const double alt = path_reliability(g, ours.paths[0].edges, T);
      if (std::abs(alt - brute->reliability) > 1e-9)
        ++bad_path;
    }
    if (ours.paths.empty() != (theirs <= 0.0))
    {
      if (!(ours.paths.empty() && theirs <= 0.0))
        ++bad_path;
    }
  }
  const double elapsed = since(start);
  const bool ok = bad_value == 0 && bad_path == 0 && elapsed < 120.0;
  report("oracle_equivalence", ok,
    std::to_string(compared) + " graphs, " + std::to_string(bad_value) + " value mismatches, "
    + std::to_string(bad_path) + " path mismatches, max |diff| " + fmt("%.3g", worst)
    + fmt(", %.2f s", elapsed));
}

//==============================================================================
void backend_equivalence()
{
  const auto start = Clock::now();
  std::mt19937_64 rng(4048);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial)
  {
    const NodeIndex n = static_cast<NodeIndex>(2 + rng() % 29);
    const EdgeIndex m = static_cast<EdgeIndex>(2 * (n - 1) + rng() % (2 * n));
    const auto g = test::random_graph(rng, {n, m, 1, 8, 40, true});
    const NodeIndex d = static_cast<NodeIndex>(rng() % static_cast<std::uint64_t>(n));
    const Bin T = static_cast<Bin>(1 + rng() % 128);

    PolicyOptions direct;
    direct.backend = Backend::direct;
    PolicyOptions zdc;
    zdc.backend = Backend::zdc;
    const auto a = compute_policy(g, d, T, direct);
    const auto b = compute_policy(g, d, T, zdc);
    for (NodeIndex i = 0; i < n; ++i)
    {
      for (Bin t = 0; t <= T; ++t)
        worst = std::max(worst, std::abs(a.reliability(i, t) - b.reliability(i, t)));
    }
  }
  report("backend_equivalence", worst <= 1e-9,
    fmt("50 graphs, max |u_direct - u_zdc| = %.3g, %.2f s", worst, since(start)));
}

//==============================================================================
struct ScalingRun
{
  StochasticGraph graph;
  std::vector<BenchmarkRecord> records;
  double seconds;
};

ScalingRun scaling_benchmark()
{
  const auto start = Clock::now();
  GeneratorSpec spec;
  auto g = synthesize_distributions(grid_topology(32, 200.0, 32), spec, 1.0, 32);
  const auto instances = generate_instances(g, 100, 1234);
  BenchmarkConfig config;
  config.repetitions = 3;
  auto records = run_benchmark(g, instances, config);
  return {std::move(g), std::move(records), since(start)};
}

void admissibility(const std::vector<BenchmarkRecord>& records)
{
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_increase = -1.0;
  for (const auto& r : records)
  {
    if (!r.ok)
    {
      ++violations;
      continue;
    }
    ++checked;
    const auto& f = r.full;
    worst_increase = std::max(worst_increase, f.stats.max_key_increase);
    bool ok = f.stats.max_key_increase <= 1e-12;
    ok = ok && f.path.reliability <= f.u_source + 1e-9;
    ok = ok && f.stats.max_queued_key_at_finish <= f.path.reliability + 1e-12;
    violations += ok ? 0 : 1;
  }
  report("admissibility", violations == 0 && checked > 0,
    std::to_string(checked) + " instances, " + std::to_string(violations)
    + " violations, max child-parent key increase " + fmt("%.3g", worst_increase));
}

//==============================================================================
void pruning_soundness()
{
  const auto start = Clock::now();
  GeneratorSpec spec;
  const auto g = synthesize_distributions(grid_topology(8, 200.0, 55), spec, 5.0, 55);
  const auto instances = generate_instances(g, 100, 99);
  Bin horizon = 0;
  for (const auto& inst : instances)
    horizon = std::max(horizon, inst.budget);

  std::vector<double> full(instances.size());
  std::vector<double> full_u(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i)
  {
    const auto& inst = instances[i];
    const auto pol = compute_policy(g, inst.dest, inst.budget);
    const auto r = sota_path(g, pol, inst.source, inst.budget);
    full[i] = r.paths.empty() ? 0.0 : r.paths[0].reliability;
    full_u[i] = pol.reliability(inst.source, inst.budget);
  }

  bool ok = true;
  std::ostringstream detail;
  detail << instances.size() << " instances, horizon " << horizon;
  for (int k : {2, 4, 8})
  {
    const auto part = grid_partition(g, k);
    std::size_t pruned_edges[2] = {0, 0};
    std::size_t mismatches[2] = {0, 0};
    double worst[2] = {0.0, 0.0};
    std::size_t value_mismatches = 0;
    for (auto mode : {PotentialMode::policy, PotentialMode::path})
    {
      const int m = mode == PotentialMode::policy ? 0 : 1;
      PotentialOptions opts;
      opts.mode = mode;
      const auto set = preprocess_regions(g, part, k, horizon, opts);
      for (std::size_t i = 0; i < instances.size(); ++i)
      {
        const auto& inst = instances[i];
        const auto* table = set.find(part.region_of[static_cast<std::size_t>(inst.dest)],
          part.region_of[static_cast<std::size_t>(inst.source)]);
        const auto mask = prune(g, *table, inst.budget);
        pruned_edges[m] += static_cast<std::size_t>(std::count(mask.begin(), mask.end(), false));
        const auto pol = compute_policy(g, inst.dest, inst.budget, *table, inst.budget);
        if (mode == PotentialMode::policy
          && std::abs(pol.reliability(inst.source, inst.budget) - full_u[i]) > 1e-12)
          ++value_mismatches;
        PathSearchOptions sopts;
        sopts.mask = &mask;
        const auto r = sota_path(g, pol, inst.source, inst.budget, sopts);
        const double rel = r.paths.empty() ? 0.0 : r.paths[0].reliability;
        worst[m] = std::max(worst[m], std::abs(rel - full[i]));
        if (std::abs(rel - full[i]) > 1e-12)
          ++mismatches[m];
      }
    }
    const bool k_ok = value_mismatches == 0 && mismatches[0] == 0 && mismatches[1] == 0 && pruned_edges[1] >= pruned_edges[0];
    ok = ok && k_ok;
    detail << "; k=" << k << ": policy " << mismatches[0] << " mismatches (max " << worst[0]
           << "), " << value_mismatches << " u_s(T) mismatches, " << pruned_edges[0]
           << " edges pruned; path " << mismatches[1]
           << " mismatches (max " << worst[1] << "), " << pruned_edges[1] << " edges pruned";
  }
  detail << fmt("; %.1f s", since(start));
  report("pruning_soundness", ok, detail.str());
}

//==============================================================================
void realizability_exactness()
{
  const auto start = Clock::now();
  std::mt19937_64 rng(6060);
  std::size_t mismatched = 0;
  std::size_t rollouts = 0;
  std::size_t stray = 0;
  for (int trial = 0; trial < 100; ++trial)
  {
    const NodeIndex n = static_cast<NodeIndex>(3 + rng() % 8);
    const auto g = test::random_graph(rng, {n, 3 * n, 1, 4, 6, true});
    const NodeIndex s = static_cast<NodeIndex>(rng() % static_cast<std::uint64_t>(n));
    const NodeIndex d = static_cast<NodeIndex>((s + 1 + rng() % static_cast<std::uint64_t>(n - 1)) % n);
    const Bin T = static_cast<Bin>(5 + rng() % 60);
    const auto pol = compute_policy(g, d, T);
    const auto order = compute_update_order(g, d, T, OrderStrategy::dijkstra_blocks);

    const auto oracle = test::forward_reach(g, pol, s, T);
    for (auto backend : {RealizabilityBackend::bitset, RealizabilityBackend::convolution})
    {
      RealizabilityOptions opts;
      opts.backend = backend;
      const auto f = compute_realizability(g, pol, s, T, order, opts);
      bool same = f.realizable_edges() == oracle.edges;
      for (NodeIndex i = 0; i < n && same; ++i)
      {
        for (Bin t = 0; t <= T && same; ++t)
          same = f.reachable(i, t) == oracle.state[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
      }
      mismatched += same ? 0 : 1;
    }

    // Monte-Carlo trips following the policy.
    const auto flags = compute_realizability(g, pol, s, T, order);
    std::vector<std::discrete_distribution<Bin>> sample;
    for (EdgeIndex e = 0; e < g.edge_count(); ++e)
    {
      const auto m = g.edge(e).dist.mass();
      sample.emplace_back(m.begin(), m.end());
    }
    for (int trip = 0; trip < 100; ++trip)
    {
      ++rollouts;
      NodeIndex i = s;
      Bin t = T;
      while (i != d && t >= 0)
      {
        const EdgeIndex e = pol.next_edge(i, t);
        if (e == kNoEdge)
          break;
        if (!flags.realizable_edges()[static_cast<std::size_t>(e)])
        {
          ++stray;
          break;
        }
        t -= sample[static_cast<std::size_t>(e)](rng);
        i = g.edge(e).head;
      }
    }
  }
  report("realizability_exactness", mismatched == 0 && stray == 0 && rollouts >= 10000,
    "100 instances x 2 backends, " + std::to_string(mismatched) + " mismatches; "
    + std::to_string(rollouts) + " rollouts, " + std::to_string(stray)
    + " used unmarked edges" + fmt(", %.2f s", since(start)));
}

//==============================================================================
void scaling(const ScalingRun& run)
{
  std::vector<double> policy_times;
  std::vector<double> path_times;
  std::vector<double> edges;
  for (const auto& r : run.records)
  {
    if (!r.ok || r.full.status != SearchStatus::found)
      continue;
    policy_times.push_back(r.full.policy_time_s);
    path_times.push_back(r.full.path_time_s);
    edges.push_back(static_cast<double>(r.full.path.edges.size()));
  }

  const double med_policy = median(policy_times);
  const double med_path = median(path_times);
  const auto fit = fit_line(edges, path_times);

  // Doubling the horizon for a few destinations.
  std::vector<double> ratios;
  for (std::size_t i = 0; i < 5 && i < run.records.size(); ++i)
  {
    const auto& inst = run.records[i].instance;
    std::vector<double> single;
    std::vector<double> twice;
    for (int rep = 0; rep < 3; ++rep)
    {
      auto start = Clock::now();
      compute_policy(run.graph, inst.dest, inst.budget);
      single.push_back(since(start));
      start = Clock::now();
      compute_policy(run.graph, inst.dest, 2 * inst.budget);
      twice.push_back(since(start));
    }
    ratios.push_back(median(twice) / median(single));
  }
  const double ratio = median(ratios);

  report("scaling_path_faster_than_policy", med_path < med_policy,
    fmt("median path %.4f s vs median policy %.4f s over %.0f instances", med_path, med_policy,
      static_cast<double>(path_times.size())));
  report("scaling_path_time_linear_in_length", fit.r2 >= 0.5,
    fmt("path time = %.3g * edges + %.3g, R^2 = %.3f", fit.slope, fit.intercept, fit.r2));
  report("scaling_zdc_doubling", ratio <= 3.0,
    fmt("median time ratio T -> 2T = %.2f (benchmark %.0f s)", ratio, run.seconds));
}

} // namespace

int main(int argc, char** argv)
{
  // Optional argument: run only criteria whose name contains it.
  const std::string only = argc > 1 ? argv[1] : "";
  const auto selected = [&](const std::string& name) {
    return only.empty() || name.find(only) != std::string::npos;
  };

  try
  {
    if (selected("counterexample_regression"))
      counterexample();
    if (selected("oracle_equivalence"))
      oracle_equivalence();
    if (selected("backend_equivalence"))
      backend_equivalence();
    std::optional<ScalingRun> run;
    if (selected("admissibility") || selected("scaling"))
    {
      run = scaling_benchmark();
      write_benchmark(run->records, "acceptance_benchmark");
    }
    if (selected("admissibility"))
      admissibility(run->records);
    if (selected("pruning_soundness"))
      pruning_soundness();
    if (selected("realizability_exactness"))
      realizability_exactness();
    if (selected("scaling"))
      scaling(*run);
  }
  catch (const std::exception& e)
  {
    std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
