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

#ifndef SOTA__TESTS__SUPPORT_HPP
#define SOTA__TESTS__SUPPORT_HPP

// Reference implementations used as test oracles. They share no code with
// the library beyond the graph and distribution containers.

#include <sota/network.hpp>
#include <sota/policy.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace sota::test {

inline std::string fixture(const std::string& name)
{
  return std::string(SOTA_FIXTURE_DIR) + "/" + name;
}

inline StochasticGraph counterexample()
{
  return load_graph_file(fixture("appendix_a.json"));
}

/// Full-length convolution by the textbook double loop.
inline std::vector<double> naive_convolve(
  const std::vector<double>& a, const std::vector<double>& b)
{
  if (a.empty() || b.empty())
    return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      out[i + j] += a[i] * b[j];
  return out;
}

inline std::vector<double> as_vector(const Distribution& d)
{
  return {d.mass().begin(), d.mass().end()};
}

/// Sparse random pmf starting at bin >= min_first.
inline Distribution random_distribution(
  std::mt19937_64& rng, double dt, Bin min_first, Bin max_first, Bin max_width)
{
  std::uniform_int_distribution<Bin> first(min_first, max_first);
  std::uniform_int_distribution<Bin> width(1, max_width);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::bernoulli_distribution hole(0.3);

  const Bin lo = first(rng);
  const Bin w = width(rng);
  std::vector<double> mass(static_cast<std::size_t>(lo + w), 0.0);
  double total = 0.0;
  for (Bin k = lo; k < lo + w; ++k)
  {
    if (k != lo && hole(rng))
      continue;
    const double m = 0.05 + weight(rng);
    mass[static_cast<std::size_t>(k)] = m;
    total += m;
  }
  for (double& m : mass)
    m /= total;
  return Distribution(dt, std::move(mass));
}

struct RandomGraphSpec
{
  NodeIndex nodes = 8;
  EdgeIndex max_edges = 30;
  Bin min_first = 1;
  Bin max_first = 6;
  Bin max_width = 6;
  bool parallel_edges = true;
};

/// Strongly connected random graph: a bidirectional random spanning tree
/// plus random extra arcs, up to spec.max_edges in total.
inline StochasticGraph random_graph(std::mt19937_64& rng, const RandomGraphSpec& spec)
{
  std::vector<Node> nodes;
  for (NodeIndex i = 0; i < spec.nodes; ++i)
    nodes.push_back({"n" + std::to_string(i), static_cast<double>(i), 0.0});

  std::vector<NodeIndex> perm(static_cast<std::size_t>(spec.nodes));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<std::pair<NodeIndex, NodeIndex>> arcs;
  for (std::size_t k = 1; k < perm.size(); ++k)
  {
    std::uniform_int_distribution<std::size_t> earlier(0, k - 1);
    const NodeIndex a = perm[k];
    const NodeIndex b = perm[earlier(rng)];
    arcs.emplace_back(a, b);
    arcs.emplace_back(b, a);
  }

  std::uniform_int_distribution<NodeIndex> any(0, spec.nodes - 1);
  int guard = 0;
  while (static_cast<EdgeIndex>(arcs.size()) < spec.max_edges && guard++ < 1000)
  {
    const NodeIndex a = any(rng);
    const NodeIndex b = any(rng);
    if (a == b)
      continue;
    if (!spec.parallel_edges
      && std::find(arcs.begin(), arcs.end(), std::make_pair(a, b)) != arcs.end())
      continue;
    arcs.emplace_back(a, b);
  }

  std::vector<Edge> edges;
  for (const auto& [a, b] : arcs)
  {
    edges.push_back({"", a, b,
      random_distribution(rng, 1.0, spec.min_first, spec.max_first, spec.max_width)});
  }
  return StochasticGraph(1.0, std::move(nodes), std::move(edges));
}

/// u_i(t) by memoized recursion on (node, t), straight from the definition.
class RecursiveDp
{
public:
  RecursiveDp(const StochasticGraph& g, NodeIndex dest) : _g(g), _dest(dest) {}

  double u(NodeIndex i, Bin t)
  {
    if (t < 0)
      return 0.0;
    if (i == _dest)
      return 1.0;
    const auto key = std::make_pair(i, t);
    if (auto it = _memo.find(key); it != _memo.end())
      return it->second;

    double best = 0.0;
    for (EdgeIndex e = 0; e < _g.edge_count(); ++e)
    {
      const Edge& edge = _g.edge(e);
      if (edge.tail != i)
        continue;
      best = std::max(best, via(e, t));
    }
    _memo[key] = best;
    return best;
  }

  double via(EdgeIndex e, Bin t)
  {
    const Edge& edge = _g.edge(e);
    double sum = 0.0;
    for (Bin tau = 1; tau <= t && tau < edge.dist.size(); ++tau)
      sum += edge.dist[tau] * u(edge.head, t - tau);
    return sum;
  }

private:
  const StochasticGraph& _g;
  NodeIndex _dest;
  std::map<std::pair<NodeIndex, Bin>, double> _memo;
};

struct EnumeratedPath
{
  std::vector<NodeIndex> nodes;
  std::vector<EdgeIndex> edges;
  double reliability;
};

/// Every loop-free s -> d path with its on-time probability at T, computed
/// by naive convolution.
inline std::vector<EnumeratedPath> enumerate_paths(
  const StochasticGraph& g, NodeIndex s, NodeIndex d, Bin T)
{
  std::vector<EnumeratedPath> out;
  std::vector<bool> seen(static_cast<std::size_t>(g.node_count()), false);
  std::vector<NodeIndex> nodes{s};
  std::vector<EdgeIndex> edges;

  std::function<void(NodeIndex, std::vector<double>)> dfs =
    [&](NodeIndex i, std::vector<double> q) {
      if (i == d)
      {
        double r = 0.0;
        for (std::size_t t = 0; t < q.size() && t <= static_cast<std::size_t>(T); ++t)
          r += q[t];
        out.push_back({nodes, edges, r});
        return;
      }
      seen[static_cast<std::size_t>(i)] = true;
      for (EdgeIndex e = 0; e < g.edge_count(); ++e)
      {
        const Edge& edge = g.edge(e);
        if (edge.tail != i || seen[static_cast<std::size_t>(edge.head)])
          continue;
        auto next = naive_convolve(q, as_vector(edge.dist));
        if (next.size() > static_cast<std::size_t>(T) + 1)
          next.resize(static_cast<std::size_t>(T) + 1);
        nodes.push_back(edge.head);
        edges.push_back(e);
        dfs(edge.head, std::move(next));
        nodes.pop_back();
        edges.pop_back();
      }
      seen[static_cast<std::size_t>(i)] = false;
    };

  if (s == d)
  {
    out.push_back({{s}, {}, 1.0});
    return out;
  }
  dfs(s, std::vector<double>{1.0});
  return out;
}

/// Forward reachability of (node, remaining budget) states under a policy,
/// starting from (s, T). Returns the reached states and the edges used.
struct ForwardReach
{
  std::vector<std::vector<bool>> state;
  std::vector<bool> edges;
};

inline ForwardReach forward_reach(
  const StochasticGraph& g, const PolicyTable& policy, NodeIndex s, Bin T,
  bool all_budgets = false)
{
  ForwardReach r;
  r.state.assign(static_cast<std::size_t>(g.node_count()),
    std::vector<bool>(static_cast<std::size_t>(T) + 1, false));
  r.edges.assign(static_cast<std::size_t>(g.edge_count()), false);

  std::vector<std::pair<NodeIndex, Bin>> stack;
  const auto push = [&](NodeIndex i, Bin t) {
    if (!r.state[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)])
    {
      r.state[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] = true;
      stack.emplace_back(i, t);
    }
  };
  for (Bin t = all_budgets ? 0 : T; t <= T; ++t)
    push(s, t);

  while (!stack.empty())
  {
    const auto [i, t] = stack.back();
    stack.pop_back();
    if (i == policy.destination())
      continue;
    const EdgeIndex e = policy.next_edge(i, t);
    if (e == kNoEdge)
      continue;
    r.edges[static_cast<std::size_t>(e)] = true;
    const Edge& edge = g.edge(e);
    for (Bin tau = 0; tau <= t && tau < edge.dist.size(); ++tau)
    {
      if (edge.dist[tau] > 0.0)
        push(edge.head, t - tau);
    }
  }
  return r;
}

} // namespace sota::test

#endif // SOTA__TESTS__SUPPORT_HPP
