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

#include <sota/preprocess.hpp>

#include <sota/error.hpp>
#include <sota/pathsearch.hpp>

#include "parallel.hpp"

#include <algorithm>
#include <functional>
#include <optional>

namespace sota {

namespace {

using Activity = std::vector<std::vector<bool>>;

Activity empty_activity(const StochasticGraph& g, Bin horizon)
{
  return Activity(static_cast<std::size_t>(g.edge_count()),
    std::vector<bool>(static_cast<std::size_t>(horizon) + 1, false));
}

void merge_into(Activity& dst, const Activity& src)
{
  for (std::size_t e = 0; e < dst.size(); ++e)
  {
    for (std::size_t t = 0; t < dst[e].size(); ++t)
    {
      if (src[e][t])
        dst[e][t] = true;
    }
  }
}

// Bit r set <=> p(K - 1 - r) > 0, with K = min(size, horizon + 1).
std::vector<std::uint64_t> reversed_support(const Distribution& p, Bin horizon, Bin& length)
{
  length = std::min(p.size(), horizon + 1);
  std::vector<std::uint64_t> bits(static_cast<std::size_t>(std::max<Bin>(length, 1) + 63) / 64, 0);
  for (Bin tau = p.min_bin(); tau < length; ++tau)
  {
    if (p[tau] > 0.0)
    {
      const Bin r = length - 1 - tau;
      bits[static_cast<std::size_t>(r) / 64] |= std::uint64_t{1} << (r % 64);
    }
  }
  return bits;
}

void seed_source(RealizabilityFlags& flags, NodeIndex source, Bin budget, RealizabilitySeed seed)
{
  if (seed == RealizabilitySeed::query_budget)
  {
    flags.mark(source, budget);
    return;
  }
  for (Bin t = 0; t <= budget; ++t)
    flags.mark(source, t);
}

RealizabilityFlags realize_bitset(
  const StochasticGraph& g,
  const PolicyTable& policy,
  NodeIndex source,
  Bin budget,
  const UpdateOrder* order,
  RealizabilitySeed seed)
{
  RealizabilityFlags flags(g.node_count(), g.edge_count(), budget);
  seed_source(flags, source, budget, seed);

  std::vector<Bin> lengths(static_cast<std::size_t>(g.edge_count()));
  std::vector<std::vector<std::uint64_t>> support(static_cast<std::size_t>(g.edge_count()));
  for (EdgeIndex e = 0; e < g.edge_count(); ++e)
    support[static_cast<std::size_t>(e)] = reversed_support(g.edge(e).dist, budget, lengths[static_cast<std::size_t>(e)]);

  const NodeIndex dest = policy.destination();
  const auto visit = [&](NodeIndex i, Bin t) {
    if (i == dest || !flags.reachable(i, t))
      return;
    const EdgeIndex e = policy.next_edge(i, t);
    if (e == kNoEdge)
      return;
    flags.mark_edge(e);
    const auto ei = static_cast<std::size_t>(e);
    flags.mark_shifted(g.edge(e).head, support[ei], t - lengths[ei] + 1);
  };

  if (order)
  {
    for (auto it = order->rbegin(); it != order->rend(); ++it)
    {
      for (Bin t = it->hi; t >= it->lo; --t)
        visit(it->node, t);
    }
  }
  else
  {
    for (Bin t = budget; t >= 0; --t)
    {
      for (NodeIndex i = 0; i < g.node_count(); ++i)
        visit(i, t);
    }
  }
  return flags;
}

RealizabilityFlags realize_convolution(
  const StochasticGraph& g,
  const PolicyTable& policy,
  NodeIndex source,
  Bin budget,
  const RealizabilityOptions& options)
{
  RealizabilityFlags flags(g.node_count(), g.edge_count(), budget);
  const NodeIndex dest = policy.destination();

  // Stream position k carries remaining budget t = budget - k.
  std::vector<std::optional<ZdcConvolver>> conv(static_cast<std::size_t>(g.edge_count()));
  std::vector<double> support_size(static_cast<std::size_t>(g.edge_count()), 0.0);
  for (EdgeIndex e = 0; e < g.edge_count(); ++e)
  {
    const Edge& edge = g.edge(e);
    if (edge.tail == dest)
      continue;

    std::vector<double> indicator(static_cast<std::size_t>(edge.dist.size()), 0.0);
    double count = 0.0;
    for (Bin tau = edge.dist.min_bin(); tau < edge.dist.size(); ++tau)
    {
      if (edge.dist[tau] > 0.0)
      {
        indicator[static_cast<std::size_t>(tau)] = 1.0;
        count += 1.0;
      }
    }
    for (double& v : indicator)
      v /= count;

    support_size[static_cast<std::size_t>(e)] = count;
    conv[static_cast<std::size_t>(e)].emplace(
      Distribution(g.dt(), std::move(indicator)), budget, options.zdc);
  }

  for (Bin k = 0; k <= budget; ++k)
  {
    const Bin t = budget - k;
    for (NodeIndex i = 0; i < g.node_count(); ++i)
    {
      bool reach = i == source && (options.seed == RealizabilitySeed::all_budgets || t == budget);
      for (EdgeIndex e : g.in_edges(i))
      {
        if (reach)
          break;
        const auto& c = conv[static_cast<std::size_t>(e)];
        if (c && c->read(k) * support_size[static_cast<std::size_t>(e)] > 0.5)
          reach = true;
      }
      if (reach)
        flags.mark(i, t);
    }

    for (NodeIndex i = 0; i < g.node_count(); ++i)
    {
      const EdgeIndex chosen = (i != dest && flags.reachable(i, t))
        ? policy.next_edge(i, t)
        : kNoEdge;
      if (chosen != kNoEdge)
        flags.mark_edge(chosen);
      for (EdgeIndex e : g.out_edges(i))
      {
        if (auto& c = conv[static_cast<std::size_t>(e)])
          c->feed(k, e == chosen ? 1.0 : 0.0);
      }
    }
  }
  return flags;
}

void check_region(const StochasticGraph& g, const RegionPartition& partition, int region)
{
  if (partition.region_of.size() != static_cast<std::size_t>(g.node_count()))
    throw ArgumentError("partition does not match the graph");
  if (region < 0 || region >= partition.region_count)
    throw ArgumentError("region out of range");
}

std::vector<NodeIndex> all_nodes(const StochasticGraph& g)
{
  std::vector<NodeIndex> nodes(static_cast<std::size_t>(g.node_count()));
  for (NodeIndex i = 0; i < g.node_count(); ++i)
    nodes[static_cast<std::size_t>(i)] = i;
  return nodes;
}

/// Calls on_path(budget, edges) with an optimal path from `source` for every
/// budget 0..horizon at which one with positive reliability exists.
void sweep_optimal_paths(
  const StochasticGraph& g,
  const PolicyTable& policy,
  NodeIndex source,
  Bin horizon,
  const std::function<void(Bin, const std::vector<EdgeIndex>&)>& on_path)
{
  PathSearch search(g, policy, source);
  bool have = false;
  for (Bin b = 0; b <= horizon; ++b)
  {
    if (!have || !search.still_optimal(b))
      have = search.run(b).status == SearchStatus::found;
    if (have)
      on_path(b, search.incumbent()->edges);
  }
}

} // namespace

//==============================================================================
RealizabilityFlags::RealizabilityFlags(NodeIndex node_count, EdgeIndex edge_count, Bin horizon)
  : _horizon(horizon),
    _rows(static_cast<std::size_t>(node_count),
      std::vector<std::uint64_t>((static_cast<std::size_t>(horizon) + 64) / 64, 0)),
    _edges(static_cast<std::size_t>(edge_count), false)
{
}

//==============================================================================
void RealizabilityFlags::mark_shifted(
  NodeIndex i, const std::vector<std::uint64_t>& bits, Bin offset)
{
  auto& row = _rows[static_cast<std::size_t>(i)];
  for (std::size_t w = 0; w < bits.size(); ++w)
  {
    std::int64_t pos = static_cast<std::int64_t>(offset) + 64 * static_cast<std::int64_t>(w);
    std::uint64_t word = bits[w];
    if (pos + 63 < 0 || word == 0)
      continue;
    if (pos < 0)
    {
      word >>= -pos;
      pos = 0;
    }
    if (pos > _horizon)
      break;

    const auto idx = static_cast<std::size_t>(pos / 64);
    const auto shift = static_cast<unsigned>(pos % 64);
    row[idx] |= word << shift;
    if (shift != 0 && idx + 1 < row.size())
      row[idx + 1] |= word >> (64 - shift);
  }

  const auto last_bit = static_cast<unsigned>(_horizon % 64);
  if (last_bit != 63)
    row.back() &= (std::uint64_t{1} << (last_bit + 1)) - 1;
}

//==============================================================================
RealizabilityFlags compute_realizability(
  const StochasticGraph& g,
  const PolicyTable& policy,
  NodeIndex source,
  Bin budget,
  const UpdateOrder& order,
  const RealizabilityOptions& options)
{
  if (source < 0 || source >= g.node_count())
    throw ArgumentError("source node out of range");
  if (policy.node_count() != g.node_count())
    throw ArgumentError("policy was computed for a different graph");
  if (budget < 0 || budget > policy.horizon())
    throw ArgumentError("budget outside the policy horizon");

  std::string why;
  if (!validate_update_order(g, policy.destination(), budget, order, &why))
    throw ArgumentError("update order does not match the policy and budget: " + why);

  if (options.backend == RealizabilityBackend::convolution)
    return realize_convolution(g, policy, source, budget, options);
  return realize_bitset(g, policy, source, budget, &order, options.seed);
}

//==============================================================================
PotentialTable compute_arc_potentials(
  const StochasticGraph& g,
  const RegionPartition& partition,
  int region,
  Bin horizon,
  const PotentialOptions& options)
{
  check_region(g, partition, region);
  if (horizon < 0)
    throw ArgumentError("horizon must be non-negative");
  if (options.source_region)
    check_region(g, partition, *options.source_region);

  const auto& dests = partition.members[static_cast<std::size_t>(region)];
  const std::vector<NodeIndex> sources = options.source_region
    ? partition.members[static_cast<std::size_t>(*options.source_region)]
    : all_nodes(g);

  const std::size_t workers = static_cast<std::size_t>(std::max(options.threads, 1));
  std::vector<Activity> local(workers, empty_activity(g, horizon));

  PolicyOptions policy_options;
  policy_options.backend = options.backend;
  policy_options.zdc = options.zdc;

  detail::parallel_for(dests.size(), options.threads, [&](std::size_t item, std::size_t worker) {
    const NodeIndex d = dests[item];
    Activity& activity = local[worker];
    const PolicyTable policy = compute_policy(g, d, horizon, policy_options);

    if (options.mode == PotentialMode::path)
    {
      for (NodeIndex s : sources)
      {
        if (s == d)
          continue;
        sweep_optimal_paths(g, policy, s, horizon,
          [&](Bin b, const std::vector<EdgeIndex>& edges) {
            for (EdgeIndex e : edges)
              activity[static_cast<std::size_t>(e)][static_cast<std::size_t>(b)] = true;
          });
      }
      return;
    }

    if (!options.source_region)
    {
      for (NodeIndex i = 0; i < g.node_count(); ++i)
      {
        for (Bin t = 0; t <= horizon; ++t)
        {
          const EdgeIndex e = policy.next_edge(i, t);
          if (e != kNoEdge)
            activity[static_cast<std::size_t>(e)][static_cast<std::size_t>(t)] = true;
        }
      }
      return;
    }

    for (NodeIndex s : sources)
    {
      for (Bin b = 0; b <= horizon; ++b)
      {
        const RealizabilityFlags flags = realize_bitset(
          g, policy, s, b, nullptr, RealizabilitySeed::query_budget);
        const auto& edges = flags.realizable_edges();
        for (std::size_t e = 0; e < edges.size(); ++e)
        {
          if (edges[e])
            activity[e][static_cast<std::size_t>(b)] = true;
        }
      }
    }
  });

  for (std::size_t w = 1; w < workers; ++w)
    merge_into(local[0], local[w]);

  return PotentialTable::from_activity(options.mode, region, options.source_region,
    horizon, options.k_intervals, local[0]);
}

//==============================================================================
PotentialSet preprocess_regions(
  const StochasticGraph& g,
  const RegionPartition& partition,
  int grid_k,
  Bin horizon,
  const PotentialOptions& options)
{
  PotentialSet set;
  set.grid_k = grid_k;
  set.region_of = partition.region_of;
  set.region_count = partition.region_count;
  set.horizon = horizon;
  set.dt = g.dt();
  set.mode = options.mode;
  set.k_intervals = options.k_intervals;

  if (options.mode == PotentialMode::policy)
  {
    PotentialOptions per_region = options;
    per_region.source_region.reset();
    for (int r = 0; r < partition.region_count; ++r)
      set.tables.push_back(compute_arc_potentials(g, partition, r, horizon, per_region));
    return set;
  }

  // Path mode: one policy per destination, shared by every source region.
  PolicyOptions policy_options;
  policy_options.backend = options.backend;
  policy_options.zdc = options.zdc;
  const auto regions = static_cast<std::size_t>(partition.region_count);

  for (int dest_region = 0; dest_region < partition.region_count; ++dest_region)
  {
    const auto& dests = partition.members[static_cast<std::size_t>(dest_region)];
    std::vector<std::vector<Activity>> local(
      static_cast<std::size_t>(std::max(options.threads, 1)),
      std::vector<Activity>(regions, empty_activity(g, horizon)));

    detail::parallel_for(dests.size(), options.threads, [&](std::size_t item, std::size_t worker) {
      const NodeIndex d = dests[item];
      const PolicyTable policy = compute_policy(g, d, horizon, policy_options);
      for (NodeIndex s = 0; s < g.node_count(); ++s)
      {
        if (s == d)
          continue;
        Activity& activity = local[worker][static_cast<std::size_t>(
          partition.region_of[static_cast<std::size_t>(s)])];
        sweep_optimal_paths(g, policy, s, horizon,
          [&](Bin b, const std::vector<EdgeIndex>& edges) {
            for (EdgeIndex e : edges)
              activity[static_cast<std::size_t>(e)][static_cast<std::size_t>(b)] = true;
          });
      }
    });

    for (std::size_t w = 1; w < local.size(); ++w)
    {
      for (std::size_t r = 0; r < regions; ++r)
        merge_into(local[0][r], local[w][r]);
    }
    for (std::size_t r = 0; r < regions; ++r)
    {
      set.tables.push_back(PotentialTable::from_activity(PotentialMode::path,
        dest_region, static_cast<int>(r), horizon, options.k_intervals, local[0][r]));
    }
  }
  return set;
}

} // namespace sota
