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

#include <sota/error.hpp>
#include <sota/harness.hpp>
#include <sota/network.hpp>
#include <sota/pathsearch.hpp>
#include <sota/policy.hpp>
#include <sota/potentials.hpp>
#include <sota/preprocess.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

using json = nlohmann::json;

namespace {

std::ofstream open_output(const std::string& path)
{
  std::ofstream out(path);
  if (!out)
    throw sota::Error("cannot write " + path);
  return out;
}

std::ifstream open_input(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw sota::Error("cannot read " + path);
  return in;
}

json path_json(const sota::StochasticGraph& g, const sota::RankedPath& p)
{
  json nodes = json::array();
  json edges = json::array();
  for (auto i : p.nodes)
    nodes.push_back(g.node(i).id);
  for (auto e : p.edges)
    edges.push_back(g.edge(e).id);
  return {{"path", nodes}, {"edges", edges}, {"reliability", p.reliability}};
}

const char* status_name(sota::SearchStatus s)
{
  switch (s)
  {
    case sota::SearchStatus::found:
      return "found";
    case sota::SearchStatus::zero_probability:
      return "zero_probability";
    case sota::SearchStatus::unreachable:
      return "unreachable";
  }
  return "unknown";
}

int region_of(const sota::PotentialSet& set, sota::NodeIndex v)
{
  return set.region_of.at(static_cast<std::size_t>(v));
}

sota::PotentialSet read_potentials(const std::string& path, const sota::StochasticGraph& g)
{
  auto in = open_input(path);
  auto set = sota::load_potentials(in);
  if (set.region_of.size() != static_cast<std::size_t>(g.node_count()))
    throw sota::ValidationError("potential file does not match the graph");
  return set;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Stochastic on-time arrival routing"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic grid network");
  int synth_k = 16;
  double synth_spacing = 200.0;
  double synth_dt = 1.0;
  std::uint64_t synth_seed = 1;
  std::string synth_model = "shifted-gamma";
  std::string synth_out;
  synth->add_option("--grid", synth_k, "Grid side length")->check(CLI::Range(2, 64));
  synth->add_option("--spacing", synth_spacing, "Block length in meters");
  synth->add_option("--dt", synth_dt, "Bin width in seconds");
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--model", synth_model, "Travel-time model")
    ->check(CLI::IsMember({"shifted-gamma", "zero-variance"}));
  synth->add_option("--out", synth_out, "Output graph file")->required();

  // policy
  auto* policy = app.add_subcommand("policy", "Compute the optimal policy");
  std::string policy_graph, policy_dest, policy_backend = "zdc", policy_out;
  sota::Bin policy_budget = 0;
  policy->add_option("--graph", policy_graph)->required();
  policy->add_option("--dest", policy_dest)->required();
  policy->add_option("--budget", policy_budget)->required()->check(CLI::NonNegativeNumber);
  policy->add_option("--backend", policy_backend)->check(CLI::IsMember({"zdc", "direct"}));
  policy->add_option("--out", policy_out, "Write the policy table to this file");

  // path
  auto* path = app.add_subcommand("path", "Find the most reliable paths");
  std::string path_graph, path_source, path_dest, path_potentials, path_policy;
  std::string path_backend = "zdc";
  sota::Bin path_budget = 0;
  int path_k = 1;
  path->add_option("--graph", path_graph)->required();
  path->add_option("--source", path_source)->required();
  path->add_option("--dest", path_dest)->required();
  path->add_option("--budget", path_budget)->required()->check(CLI::NonNegativeNumber);
  path->add_option("--k", path_k, "Number of ranked paths")->check(CLI::PositiveNumber);
  path->add_option("--potentials", path_potentials, "Prune with a potential file");
  path->add_option("--policy", path_policy, "Reuse a saved policy table");
  path->add_option("--backend", path_backend)->check(CLI::IsMember({"zdc", "direct"}));

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "Build Arc-Potential tables");
  std::string pre_graph, pre_mode = "policy", pre_out;
  int pre_grid = 4;
  int pre_intervals = 1;
  int pre_threads = 1;
  sota::Bin pre_horizon = 0;
  pre->add_option("--graph", pre_graph)->required();
  pre->add_option("--grid", pre_grid)->required()->check(CLI::PositiveNumber);
  pre->add_option("--horizon", pre_horizon)->required()->check(CLI::NonNegativeNumber);
  pre->add_option("--mode", pre_mode)->check(CLI::IsMember({"policy", "path"}));
  pre->add_option("--intervals", pre_intervals)->check(CLI::PositiveNumber);
  pre->add_option("--threads", pre_threads)->check(CLI::PositiveNumber);
  pre->add_option("--out", pre_out)->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Run the benchmark harness");
  std::string bench_graph, bench_out, bench_mode = "policy";
  std::size_t bench_n = 10;
  std::uint64_t bench_seed = 1;
  int bench_grid = 4;
  int bench_intervals = 1;
  int bench_threads = 1;
  int bench_reps = 3;
  bool bench_pre = false;
  bench->add_option("--graph", bench_graph)->required();
  bench->add_option("--instances", bench_n)->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed);
  bench->add_option("--grid", bench_grid)->check(CLI::PositiveNumber);
  bench->add_flag("--preprocess", bench_pre, "Also run with potentials");
  bench->add_option("--mode", bench_mode)->check(CLI::IsMember({"policy", "path"}));
  bench->add_option("--intervals", bench_intervals)->check(CLI::PositiveNumber);
  bench->add_option("--threads", bench_threads)->check(CLI::PositiveNumber);
  bench->add_option("--repetitions", bench_reps)->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_out)->required();

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (*synth)
    {
      sota::GeneratorSpec spec;
      spec.model = synth_model == "zero-variance"
        ? sota::GeneratorSpec::Model::zero_variance
        : sota::GeneratorSpec::Model::shifted_gamma;
      const auto topo = sota::grid_topology(synth_k, synth_spacing, synth_seed);
      const auto g = sota::synthesize_distributions(topo, spec, synth_dt, synth_seed);
      sota::save_graph_file(g, synth_out);
      std::cout << json{{"nodes", g.node_count()}, {"edges", g.edge_count()}}.dump() << '\n';
    }
    else if (*policy)
    {
      const auto g = sota::load_graph_file(policy_graph);
      sota::PolicyOptions opts;
      opts.backend = sota::backend_from_string(policy_backend);
      const auto start = std::chrono::steady_clock::now();
      const auto table = sota::compute_policy(g, g.node_index(policy_dest), policy_budget, opts);
      const double wall = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();
      if (!policy_out.empty())
      {
        auto out = open_output(policy_out);
        sota::save_policy(g, table, out);
      }

      json u = json::object();
      for (sota::NodeIndex i = 0; i < g.node_count(); ++i)
        u[g.node(i).id] = table.reliability(i, policy_budget);
      std::cout << json{{"destination", policy_dest}, {"budget", policy_budget},
                         {"backend", policy_backend}, {"wall_time", wall},
                         {"reliability_at_budget", u}}.dump(2) << '\n';
    }
    else if (*path)
    {
      const auto g = sota::load_graph_file(path_graph);
      const auto s = g.node_index(path_source);
      const auto d = g.node_index(path_dest);

      std::optional<sota::PotentialSet> set;
      std::optional<sota::EdgeMask> mask;
      const sota::PotentialTable* table = nullptr;
      if (!path_potentials.empty())
      {
        set = read_potentials(path_potentials, g);
        table = set->find(region_of(*set, d), region_of(*set, s));
        if (!table)
          throw sota::ValidationError("potential file has no table for this query");
        mask = sota::prune(g, *table, path_budget);
      }

      sota::PolicyOptions popts;
      popts.backend = sota::backend_from_string(path_backend);
      const auto start = std::chrono::steady_clock::now();
      std::optional<sota::PolicyTable> pol;
      if (!path_policy.empty())
      {
        auto in = open_input(path_policy);
        pol.emplace(sota::load_policy(g, in));
        if (pol->destination() != d)
          throw sota::ValidationError("policy file was computed for another destination");
      }
      else if (table)
      {
        pol.emplace(sota::compute_policy(g, d, path_budget, *table, path_budget, popts));
      }
      else
      {
        pol.emplace(sota::compute_policy(g, d, path_budget, popts));
      }
      const auto search_start = std::chrono::steady_clock::now();

      sota::PathSearchOptions sopts;
      sopts.k = path_k;
      sopts.mask = mask ? &*mask : nullptr;
      const auto result = sota::sota_path(g, *pol, s, path_budget, sopts);
      const auto end = std::chrono::steady_clock::now();

      json out = {
        {"status", status_name(result.status)},
        {"budget", path_budget},
        {"popped_count", result.stats.popped},
        {"queue_peak", result.stats.queue_peak},
        {"wall_time", std::chrono::duration<double>(end - start).count()},
        {"search_time", std::chrono::duration<double>(end - search_start).count()},
      };
      if (mask)
        out["edges_kept"] = std::count(mask->begin(), mask->end(), true);
      if (result.paths.empty())
      {
        out["path"] = json::array();
        out["edges"] = json::array();
        out["reliability"] = 0.0;
      }
      else
      {
        const auto best = path_json(g, result.paths.front());
        out["path"] = best["path"];
        out["edges"] = best["edges"];
        out["reliability"] = best["reliability"];
      }
      json ranked = json::array();
      for (const auto& p : result.paths)
        ranked.push_back(path_json(g, p));
      out["ranked"] = ranked;
      std::cout << out.dump(2) << '\n';
    }
    else if (*pre)
    {
      const auto g = sota::load_graph_file(pre_graph);
      const auto partition = sota::grid_partition(g, pre_grid);
      sota::PotentialOptions opts;
      opts.mode = sota::potential_mode_from_string(pre_mode);
      opts.k_intervals = pre_intervals;
      opts.threads = pre_threads;
      const auto start = std::chrono::steady_clock::now();
      const auto set = sota::preprocess_regions(g, partition, pre_grid, pre_horizon, opts);
      auto out = open_output(pre_out);
      sota::save_potentials(set, out);
      std::cout << json{{"regions", set.region_count}, {"tables", set.tables.size()},
                         {"wall_time", std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start).count()}}.dump(2)
                << '\n';
    }
    else if (*bench)
    {
      const auto g = sota::load_graph_file(bench_graph);
      const auto instances = sota::generate_instances(g, bench_n, bench_seed);

      std::optional<sota::PotentialSet> set;
      if (bench_pre)
      {
        sota::Bin horizon = 0;
        for (const auto& inst : instances)
          horizon = std::max(horizon, inst.budget);
        sota::PotentialOptions opts;
        opts.mode = sota::potential_mode_from_string(bench_mode);
        opts.k_intervals = bench_intervals;
        opts.threads = bench_threads;
        set = sota::preprocess_regions(
          g, sota::grid_partition(g, bench_grid), bench_grid, horizon, opts);
      }

      sota::BenchmarkConfig config;
      config.threads = bench_threads;
      config.repetitions = bench_reps;
      config.potentials = set ? &*set : nullptr;
      const auto records = sota::run_benchmark(g, instances, config);
      sota::write_benchmark(records, bench_out);

      std::size_t failed = 0;
      for (const auto& r : records)
        failed += r.ok ? 0 : 1;
      std::cout << json{{"instances", records.size()}, {"failed", failed},
                         {"out", bench_out}}.dump(2) << '\n';
    }
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
