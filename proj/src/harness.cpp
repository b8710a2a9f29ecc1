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

#include <sota/harness.hpp>

#include <sota/error.hpp>

#include "parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

namespace sota {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::size_t count_kept(const EdgeMask& mask)
{
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

double path_mean(const StochasticGraph& g, const std::vector<EdgeIndex>& edges)
{
  double mean = 0.0;
  for (EdgeIndex e : edges)
    mean += g.edge(e).dist.mean_bins();
  return mean;
}

RunMeasurement measure(
  const StochasticGraph& g,
  const ProblemInstance& inst,
  const BenchmarkConfig& config,
  const PotentialTable* table)
{
  RunMeasurement m;
  std::optional<EdgeMask> mask;
  if (table)
    mask = prune(g, *table, inst.budget);
  m.edges_kept = mask ? count_kept(*mask) : static_cast<std::size_t>(g.edge_count());

  PolicyOptions popts;
  popts.backend = config.backend;

  const int reps = std::max(config.repetitions, 1);
  std::vector<double> times;
  std::optional<PolicyTable> policy;
  for (int r = 0; r < reps; ++r)
  {
    const auto start = std::chrono::steady_clock::now();
    policy.emplace(table
      ? compute_policy(g, inst.dest, inst.budget, *table, inst.budget, popts)
      : compute_policy(g, inst.dest, inst.budget, popts));
    times.push_back(seconds_since(start));
  }
  m.policy_time_s = median(times);
  m.u_source = policy->reliability(inst.source, inst.budget);

  PathSearchOptions sopts;
  sopts.mask = mask ? &*mask : nullptr;
  times.clear();
  PathSearchResult result;
  for (int r = 0; r < reps; ++r)
  {
    const auto start = std::chrono::steady_clock::now();
    result = sota_path(g, *policy, inst.source, inst.budget, sopts);
    times.push_back(seconds_since(start));
  }
  m.path_time_s = median(times);
  m.status = result.status;
  m.stats = result.stats;
  if (!result.paths.empty())
    m.path = result.paths.front();
  return m;
}

const char* status_name(SearchStatus s)
{
  switch (s)
  {
    case SearchStatus::found:
      return "found";
    case SearchStatus::zero_probability:
      return "zero_probability";
    case SearchStatus::unreachable:
      return "unreachable";
  }
  return "unknown";
}

std::string csv_quote(const std::string& s)
{
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s)
  {
    if (c == '"')
      out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::ofstream open_out(const std::filesystem::path& p)
{
  std::ofstream out(p);
  if (!out)
    throw Error("cannot write " + p.string());
  out << std::setprecision(17);
  return out;
}

} // namespace

//==============================================================================
std::optional<LetPath> let_path(const StochasticGraph& g, NodeIndex s, NodeIndex d)
{
  if (s < 0 || s >= g.node_count() || d < 0 || d >= g.node_count())
    throw ArgumentError("node out of range");

  const auto n = static_cast<std::size_t>(g.node_count());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<EdgeIndex> via(n, kNoEdge);
  std::vector<bool> done(n, false);

  using Entry = std::pair<double, NodeIndex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[static_cast<std::size_t>(s)] = 0.0;
  heap.emplace(0.0, s);

  while (!heap.empty())
  {
    const auto [di, i] = heap.top();
    heap.pop();
    const auto ii = static_cast<std::size_t>(i);
    if (done[ii])
      continue;
    done[ii] = true;
    if (i == d)
      break;

    for (EdgeIndex e : g.out_edges(i))
    {
      const NodeIndex j = g.edge(e).head;
      const auto jj = static_cast<std::size_t>(j);
      if (done[jj])
        continue;
      const double nd = di + g.edge(e).dist.mean_bins();
      bool better = nd < dist[jj] - 1e-12;
      if (!better && std::abs(nd - dist[jj]) <= 1e-12 && via[jj] != kNoEdge)
      {
        const NodeIndex old_tail = g.edge(via[jj]).tail;
        better = i < old_tail || (i == old_tail && e < via[jj]);
      }
      if (better)
      {
        dist[jj] = std::min(nd, dist[jj]);
        via[jj] = e;
        heap.emplace(dist[jj], j);
      }
    }
  }

  if (!done[static_cast<std::size_t>(d)])
    return std::nullopt;

  LetPath path;
  path.mean_bins = dist[static_cast<std::size_t>(d)];
  for (NodeIndex i = d; i != s;)
  {
    const EdgeIndex e = via[static_cast<std::size_t>(i)];
    path.edges.push_back(e);
    i = g.edge(e).tail;
  }
  std::reverse(path.edges.begin(), path.edges.end());
  path.nodes.push_back(s);
  for (EdgeIndex e : path.edges)
    path.nodes.push_back(g.edge(e).head);
  return path;
}

//==============================================================================
std::vector<ProblemInstance> generate_instances(
  const StochasticGraph& g, std::size_t n, std::uint64_t seed)
{
  if (n == 0)
    throw ArgumentError("instance count must be at least one");
  if (g.node_count() < 2)
    throw ArgumentError("instance generation needs at least two nodes");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeIndex> pick(0, g.node_count() - 1);
  const std::size_t max_attempts = 1000 * n + 1000;

  std::vector<ProblemInstance> out;
  std::size_t attempts = 0;
  while (out.size() < n)
  {
    if (++attempts > max_attempts)
      throw ArgumentError("could not find connected node pairs");

    const NodeIndex s = pick(rng);
    const NodeIndex d = pick(rng);
    if (s == d)
      continue;
    const auto let = let_path(g, s, d);
    if (!let)
      continue;

    Distribution total = g.edge(let->edges.front()).dist;
    for (std::size_t k = 1; k < let->edges.size(); ++k)
      total = convolve(total, g.edge(let->edges[k]).dist, kUnboundedHorizon);

    ProblemInstance inst;
    inst.source = s;
    inst.dest = d;
    inst.let_edges = let->edges;
    inst.let_p5 = percentile(total, 0.05);
    inst.let_p95 = percentile(total, 0.95);
    inst.budget = std::uniform_int_distribution<Bin>(inst.let_p5, inst.let_p95)(rng);
    inst.seed = rng();
    out.push_back(std::move(inst));
  }
  return out;
}

//==============================================================================
std::vector<BenchmarkRecord> run_benchmark(
  const StochasticGraph& g,
  const std::vector<ProblemInstance>& instances,
  const BenchmarkConfig& config)
{
  std::vector<BenchmarkRecord> records(instances.size());
  std::string pruning = "none";
  if (config.potentials)
  {
    std::ostringstream label;
    label << to_string(config.potentials->mode) << ":grid" << config.potentials->grid_k
          << ":k" << config.potentials->k_intervals;
    pruning = label.str();
  }

  detail::parallel_for(instances.size(), config.threads, [&](std::size_t i, std::size_t) {
    BenchmarkRecord& rec = records[i];
    rec.index = i;
    rec.instance = instances[i];
    rec.pruning = pruning;
    const ProblemInstance& inst = instances[i];
    try
    {
      rec.full = measure(g, inst, config, nullptr);
      rec.path_mean_bins = path_mean(g, rec.full.path.edges);

      if (const PotentialSet* set = config.potentials)
      {
        const auto region = [&](NodeIndex v) {
          return set->region_of.at(static_cast<std::size_t>(v));
        };
        const PotentialTable* table = set->find(region(inst.dest), region(inst.source));
        if (!table)
          throw Error("no potential table for the destination region");
        rec.pruned = measure(g, inst, config, table);
      }
      rec.ok = true;
    }
    catch (const std::exception& e)
    {
      rec.ok = false;
      rec.error = e.what();
    }
  });
  return records;
}

//==============================================================================
void write_benchmark(const std::vector<BenchmarkRecord>& records, const std::string& dir)
{
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root / "plots");

  {
    auto out = open_out(root / "records.csv");
    out << "index,source,dest,budget,seed,let_p5,let_p95,ok,error,status,"
           "policy_time_s,path_time_s,path_edges,path_mean_bins,reliability,u_source,"
           "popped,pushed,queue_peak,max_key_increase,max_queued_key_at_finish,"
           "pruning,pruned_edges_kept,pruned_policy_time_s,pruned_path_time_s,"
           "pruned_reliability,pruned_popped,pruned_pushed\n";
    for (const auto& r : records)
    {
      const auto& f = r.full;
      out << r.index << ',' << r.instance.source << ',' << r.instance.dest << ','
          << r.instance.budget << ',' << r.instance.seed << ',' << r.instance.let_p5 << ','
          << r.instance.let_p95 << ',' << (r.ok ? 1 : 0) << ',' << csv_quote(r.error) << ','
          << status_name(f.status) << ',' << f.policy_time_s << ',' << f.path_time_s << ','
          << f.path.edges.size() << ',' << r.path_mean_bins << ',' << f.path.reliability << ','
          << f.u_source << ',' << f.stats.popped << ',' << f.stats.pushed << ','
          << f.stats.queue_peak << ',' << f.stats.max_key_increase << ','
          << f.stats.max_queued_key_at_finish << ',' << r.pruning;
      if (r.pruned)
      {
        const auto& p = *r.pruned;
        out << ',' << p.edges_kept << ',' << p.policy_time_s << ',' << p.path_time_s << ','
            << p.path.reliability << ',' << p.stats.popped << ',' << p.stats.pushed;
      }
      else
      {
        out << ",,,,,,";
      }
      out << '\n';
    }
  }

  {
    auto out = open_out(root / "plots" / "budget_vs_time.csv");
    out << "budget,policy_time_s,path_time_s,pruned_policy_time_s,pruned_path_time_s\n";
    for (const auto& r : records)
    {
      if (!r.ok)
        continue;
      out << r.instance.budget << ',' << r.full.policy_time_s << ',' << r.full.path_time_s;
      if (r.pruned)
        out << ',' << r.pruned->policy_time_s << ',' << r.pruned->path_time_s;
      else
        out << ",,";
      out << '\n';
    }
  }

  {
    auto out = open_out(root / "plots" / "pathlen_vs_time.csv");
    out << "path_edges,path_mean_bins,path_time_s\n";
    for (const auto& r : records)
    {
      if (!r.ok || r.full.status != SearchStatus::found)
        continue;
      out << r.full.path.edges.size() << ',' << r.path_mean_bins << ','
          << r.full.path_time_s << '\n';
    }
  }

  {
    auto out = open_out(root / "plots" / "plots.gp");
    out << "set datafile separator ','\n"
           "set key autotitle columnhead\n"
           "set terminal pngcairo size 900,600\n"
           "\n"
           "set output 'budget_vs_time.png'\n"
           "set xlabel 'budget (bins)'\n"
           "set ylabel 'time (s)'\n"
           "plot 'budget_vs_time.csv' using 1:2 with points title 'policy', \\\n"
           "     '' using 1:3 with points title 'path'\n"
           "\n"
           "set output 'pathlen_vs_time.png'\n"
           "set xlabel 'edges on optimal path'\n"
           "plot 'pathlen_vs_time.csv' using 1:3 with points title 'path query'\n";
  }
}

//==============================================================================
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw ArgumentError("line fit needs at least two paired samples");

  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }

  LineFit fit;
  if (sxx == 0.0)
  {
    fit.intercept = my;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

//==============================================================================
double median(std::vector<double> values)
{
  if (values.empty())
    throw ArgumentError("median of an empty sample");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (values.size() % 2 == 1)
    return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

} // namespace sota
