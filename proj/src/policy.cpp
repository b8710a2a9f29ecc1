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

#include <sota/policy.hpp>

#include <sota/error.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <sstream>

namespace sota {

using json = nlohmann::json;

namespace {

// FFT round-off below this is treated as an exact zero so that "no chance
// of arriving" stays distinguishable from "tiny chance".
constexpr double kZdcZero = 1e-13;

bool kept(const EdgeMask* mask, EdgeIndex e)
{
  return !mask || (*mask)[static_cast<std::size_t>(e)];
}

void check_mask(const StochasticGraph& g, const EdgeMask* mask)
{
  if (mask && mask->size() != static_cast<std::size_t>(g.edge_count()))
    throw ArgumentError("edge mask size does not match the graph");
}

void check_query(const StochasticGraph& g, NodeIndex dest, Bin horizon)
{
  if (dest < 0 || dest >= g.node_count())
    throw ArgumentError("destination node out of range");
  if (horizon < 0)
    throw ArgumentError("horizon must be non-negative");
}

double direct_edge_value(const Distribution& p, std::span<const double> u_head, Bin t)
{
  const auto m = p.mass();
  const Bin end = std::min(t + 1, p.size());
  double sum = 0.0;
  for (Bin tau = p.min_bin(); tau < end; ++tau)
    sum += m[static_cast<std::size_t>(tau)] * u_head[static_cast<std::size_t>(t - tau)];
  return sum;
}

} // namespace

//==============================================================================
std::string to_string(Backend backend)
{
  return backend == Backend::direct ? "direct" : "zdc";
}

//==============================================================================
Backend backend_from_string(const std::string& name)
{
  if (name == "direct")
    return Backend::direct;
  if (name == "zdc")
    return Backend::zdc;
  throw ArgumentError("unknown backend '" + name + "'");
}

//==============================================================================
UpdateOrder compute_update_order(
  const StochasticGraph& g,
  NodeIndex dest,
  Bin horizon,
  OrderStrategy strategy,
  const EdgeMask* mask)
{
  check_query(g, dest, horizon);
  check_mask(g, mask);

  const NodeIndex n = g.node_count();
  UpdateOrder order;

  if (strategy == OrderStrategy::time_sweep)
  {
    order.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(horizon + 1));
    for (Bin t = 0; t <= horizon; ++t)
    {
      for (NodeIndex i = 0; i < n; ++i)
        order.push_back({i, t, t});
    }
    return order;
  }

  // next[i] is the first budget whose u_i is not computed yet.
  std::vector<Bin> next(static_cast<std::size_t>(n), 0);
  order.push_back({dest, 0, horizon});
  next[static_cast<std::size_t>(dest)] = horizon + 1;

  using Item = std::pair<Bin, NodeIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (NodeIndex i = 0; i < n; ++i)
  {
    if (i != dest)
      queue.push({0, i});
  }

  while (!queue.empty())
  {
    const auto [from, i] = queue.top();
    queue.pop();

    Bin frontier = horizon;
    for (EdgeIndex e : g.out_edges(i))
    {
      if (!kept(mask, e))
        continue;
      const Edge& edge = g.edge(e);
      const Bin limit = next[static_cast<std::size_t>(edge.head)] + edge.dist.min_bin() - 1;
      frontier = std::min(frontier, limit);
    }

    // The node with the smallest frontier can always advance: every
    // neighbour has next >= from and every delta is at least one bin.
    order.push_back({i, from, frontier});
    next[static_cast<std::size_t>(i)] = frontier + 1;
    if (frontier < horizon)
      queue.push({frontier + 1, i});
  }

  return order;
}

//==============================================================================
bool validate_update_order(
  const StochasticGraph& g,
  NodeIndex dest,
  Bin horizon,
  const UpdateOrder& order,
  std::string* why,
  const EdgeMask* mask)
{
  check_query(g, dest, horizon);
  check_mask(g, mask);

  const auto fail = [&](std::size_t k, const std::string& what) {
    if (why)
    {
      std::ostringstream msg;
      msg << "entry " << k << ": " << what;
      *why = msg.str();
    }
    return false;
  };

  std::vector<Bin> next(static_cast<std::size_t>(g.node_count()), 0);
  for (std::size_t k = 0; k < order.size(); ++k)
  {
    const UpdateEntry& entry = order[k];
    if (entry.node < 0 || entry.node >= g.node_count())
      return fail(k, "node out of range");

    Bin& expected = next[static_cast<std::size_t>(entry.node)];
    if (entry.lo != expected)
      return fail(k, "interval does not continue the node's previous one");
    if (entry.hi < entry.lo || entry.hi > horizon)
      return fail(k, "interval empty or beyond the horizon");

    if (entry.node != dest)
    {
      for (EdgeIndex e : g.out_edges(entry.node))
      {
        if (!kept(mask, e))
          continue;
        const Edge& edge = g.edge(e);
        const Bin needed = entry.hi - edge.dist.min_bin();
        if (needed >= next[static_cast<std::size_t>(edge.head)])
        {
          return fail(k, "u of " + g.node(edge.head).id + " at budget "
            + std::to_string(needed) + " is not yet computed");
        }
      }
    }

    expected = entry.hi + 1;
  }

  for (NodeIndex i = 0; i < g.node_count(); ++i)
  {
    if (next[static_cast<std::size_t>(i)] != horizon + 1)
      return fail(order.size(), "node " + g.node(i).id + " not covered up to the horizon");
  }
  return true;
}

//==============================================================================
PolicyTable::PolicyTable(
  NodeIndex dest,
  Bin horizon,
  double dt,
  std::vector<std::vector<double>> u,
  std::vector<std::vector<EdgeIndex>> next)
  : _dest(dest),
    _horizon(horizon),
    _dt(dt),
    _u(std::move(u)),
    _next(std::move(next))
{
  const auto width = static_cast<std::size_t>(horizon) + 1;
  if (_u.size() != _next.size())
    throw ArgumentError("policy arrays disagree on node count");
  for (std::size_t i = 0; i < _u.size(); ++i)
  {
    if (_u[i].size() != width || _next[i].size() != width)
      throw ArgumentError("policy arrays do not cover the horizon");
  }
}

//==============================================================================
PolicyTable compute_policy(
  const StochasticGraph& g,
  NodeIndex dest,
  Bin horizon,
  const PolicyOptions& options)
{
  check_query(g, dest, horizon);
  check_mask(g, options.mask);
  if (options.activity)
  {
    if (options.activity->edge_count() != g.edge_count())
      throw ArgumentError("activity table was built for a different graph");
    if (options.activity->horizon() < horizon)
      throw ArgumentError("activity table horizon is shorter than the policy horizon");
  }

  const auto n = static_cast<std::size_t>(g.node_count());
  const auto width = static_cast<std::size_t>(horizon) + 1;
  std::vector<std::vector<double>> u(n, std::vector<double>(width, 0.0));
  std::vector<std::vector<EdgeIndex>> next(n, std::vector<EdgeIndex>(width, kNoEdge));
  std::fill(u[static_cast<std::size_t>(dest)].begin(), u[static_cast<std::size_t>(dest)].end(), 1.0);

  const bool zdc = options.backend == Backend::zdc;
  std::vector<std::optional<ZdcConvolver>> convolvers;
  if (zdc)
  {
    convolvers.resize(static_cast<std::size_t>(g.edge_count()));
    for (EdgeIndex e = 0; e < g.edge_count(); ++e)
    {
      if (kept(options.mask, e) && g.edge(e).tail != dest)
        convolvers[static_cast<std::size_t>(e)].emplace(g.edge(e).dist, horizon, options.zdc);
    }
  }

  const UpdateOrder order = compute_update_order(g, dest, horizon, options.order, options.mask);

  for (const UpdateEntry& entry : order)
  {
    const auto i = static_cast<std::size_t>(entry.node);
    for (Bin t = entry.lo; t <= entry.hi; ++t)
    {
      const auto ti = static_cast<std::size_t>(t);
      if (entry.node != dest)
      {
        double best = 0.0;
        EdgeIndex best_edge = kNoEdge;
        for (EdgeIndex e : g.out_edges(entry.node))
        {
          if (!kept(options.mask, e))
            continue;
          if (options.activity && !options.activity->active_at(e, t))
            continue;

          const Edge& edge = g.edge(e);
          double value;
          if (zdc)
          {
            value = convolvers[static_cast<std::size_t>(e)]->read(t);
            value = value < kZdcZero ? 0.0 : std::min(value, 1.0);
          }
          else
          {
            value = std::min(
              direct_edge_value(edge.dist, u[static_cast<std::size_t>(edge.head)], t), 1.0);
          }

          if (value > best)
          {
            best = value;
            best_edge = e;
          }
        }
        u[i][ti] = best;
        next[i][ti] = best_edge;
      }

      if (zdc)
      {
        for (EdgeIndex e : g.in_edges(entry.node))
        {
          if (auto& conv = convolvers[static_cast<std::size_t>(e)])
            conv->feed(t, u[i][ti]);
        }
      }
    }
  }

  return PolicyTable(dest, horizon, g.dt(), std::move(u), std::move(next));
}

//==============================================================================
PolicyTable compute_policy(
  const StochasticGraph& g,
  NodeIndex dest,
  Bin horizon,
  const PotentialTable& potentials,
  Bin budget,
  PolicyOptions options)
{
  const EdgeMask mask = prune(g, potentials, budget);
  options.mask = &mask;
  if (potentials.mode() == PotentialMode::policy && potentials.k_intervals() > 1)
    options.activity = &potentials;
  return compute_policy(g, dest, horizon, options);
}

//==============================================================================
double edge_reliability(
  const StochasticGraph& g, const PolicyTable& policy, EdgeIndex e, Bin t)
{
  if (t < 0 || t > policy.horizon())
    throw ArgumentError("budget outside the policy horizon");
  const Edge& edge = g.edge(e);
  return direct_edge_value(edge.dist, policy.reliability(edge.head), t);
}

//==============================================================================
void save_policy(const StochasticGraph& g, const PolicyTable& policy, std::ostream& out)
{
  json doc{
    {"format", "sota-policy"},
    {"version", 1},
    {"destination", g.node(policy.destination()).id},
    {"horizon", policy.horizon()},
    {"dt", policy.dt()},
  };

  json u = json::array();
  json w = json::array();
  for (NodeIndex i = 0; i < policy.node_count(); ++i)
  {
    const auto r = policy.reliability(i);
    u.push_back(std::vector<double>(r.begin(), r.end()));
    json row = json::array();
    for (Bin t = 0; t <= policy.horizon(); ++t)
      row.push_back(policy.next_edge(i, t));
    w.push_back(std::move(row));
  }
  doc["u"] = std::move(u);
  doc["w"] = std::move(w);
  out << doc.dump() << '\n';
}

//==============================================================================
PolicyTable load_policy(const StochasticGraph& g, std::istream& in)
{
  json doc;
  try
  {
    doc = json::parse(in);
  }
  catch (const json::parse_error& e)
  {
    throw ParseError(std::string("policy file is not valid JSON: ") + e.what());
  }

  try
  {
    if (doc.at("format").get<std::string>() != "sota-policy")
      throw ParseError("not a policy file");

    const double dt = doc.at("dt").get<double>();
    if (std::abs(dt - g.dt()) > 1e-9 * g.dt())
      throw ValidationError("policy dt differs from graph dt");

    const NodeIndex dest = g.node_index(doc.at("destination").get<std::string>());
    const Bin horizon = doc.at("horizon").get<Bin>();
    auto u = doc.at("u").get<std::vector<std::vector<double>>>();
    auto w = doc.at("w").get<std::vector<std::vector<EdgeIndex>>>();
    if (u.size() != static_cast<std::size_t>(g.node_count()))
      throw ValidationError("policy node count differs from the graph");
    for (const auto& row : w)
    {
      for (EdgeIndex e : row)
      {
        if (e < kNoEdge || e >= g.edge_count())
          throw ValidationError("policy refers to an unknown edge");
      }
    }
    return PolicyTable(dest, horizon, dt, std::move(u), std::move(w));
  }
  catch (const json::exception& e)
  {
    throw ParseError(std::string("malformed policy file: ") + e.what());
  }
}

} // namespace sota
