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

#include <sota/pathsearch.hpp>

#include <sota/error.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace sota {

namespace {

constexpr double kTieTolerance = 1e-12;

bool kept(const EdgeMask* mask, EdgeIndex e)
{
  return !mask || (*mask)[static_cast<std::size_t>(e)];
}

bool connected(const StochasticGraph& g, NodeIndex s, NodeIndex d, const EdgeMask* mask)
{
  std::vector<bool> seen(static_cast<std::size_t>(g.node_count()), false);
  std::vector<NodeIndex> stack{s};
  seen[static_cast<std::size_t>(s)] = true;
  while (!stack.empty())
  {
    const NodeIndex i = stack.back();
    stack.pop_back();
    if (i == d)
      return true;
    for (EdgeIndex e : g.out_edges(i))
    {
      const NodeIndex j = g.edge(e).head;
      if (kept(mask, e) && !seen[static_cast<std::size_t>(j)])
      {
        seen[static_cast<std::size_t>(j)] = true;
        stack.push_back(j);
      }
    }
  }
  return false;
}

} // namespace

//==============================================================================
PathSearch::PathSearch(
  const StochasticGraph& g,
  const PolicyTable& policy,
  NodeIndex source,
  PathSearchOptions options)
  : _g(g),
    _policy(policy),
    _source(source),
    _options(options)
{
  if (source < 0 || source >= g.node_count())
    throw ArgumentError("source node out of range");
  if (policy.node_count() != g.node_count())
    throw ArgumentError("policy was computed for a different graph");
  if (options.k < 1)
    throw ArgumentError("k must be at least 1");
  if (options.mask && options.mask->size() != static_cast<std::size_t>(g.edge_count()))
    throw ArgumentError("edge mask size does not match the graph");
}

//==============================================================================
bool PathSearch::on_path(int label, NodeIndex node) const
{
  for (int l = label; l >= 0; l = _labels[static_cast<std::size_t>(l)].parent)
  {
    if (_labels[static_cast<std::size_t>(l)].node == node)
      return true;
  }
  return false;
}

//==============================================================================
RankedPath PathSearch::materialize(int label) const
{
  RankedPath path;
  for (int l = label; l >= 0; l = _labels[static_cast<std::size_t>(l)].parent)
  {
    const Label& lab = _labels[static_cast<std::size_t>(l)];
    path.nodes.push_back(lab.node);
    if (lab.edge != kNoEdge)
      path.edges.push_back(lab.edge);
  }
  std::reverse(path.nodes.begin(), path.nodes.end());
  std::reverse(path.edges.begin(), path.edges.end());
  return path;
}

//==============================================================================
bool PathSearch::ranks_before(int a, int b) const
{
  const Label& la = _labels[static_cast<std::size_t>(a)];
  const Label& lb = _labels[static_cast<std::size_t>(b)];
  if (la.key != lb.key)
    return la.key > lb.key;
  if (la.depth != lb.depth)
    return la.depth < lb.depth;

  const RankedPath pa = materialize(a);
  const RankedPath pb = materialize(b);
  return std::tie(pa.nodes, pa.edges) < std::tie(pb.nodes, pb.edges);
}

//==============================================================================
PathSearchResult PathSearch::run(Bin budget)
{
  if (budget < 0 || budget > _policy.horizon())
  {
    std::ostringstream msg;
    msg << "budget " << budget << " outside the policy horizon "
        << _policy.horizon();
    throw ArgumentError(msg.str());
  }

  _labels.clear();
  _frontier.clear();
  _incumbent_label.reset();
  _incumbent.reset();

  PathSearchResult result;
  const NodeIndex dest = _policy.destination();
  const Bin cap = _policy.horizon() + 1;

  if (_source == dest)
  {
    result.status = SearchStatus::found;
    result.paths.push_back({{dest}, {}, 1.0});
    _incumbent = result.paths.front();
    return result;
  }

  const double root_key = _policy.reliability(_source, budget);
  if (root_key <= 0.0)
  {
    result.status = connected(_g, _source, dest, _options.mask)
      ? SearchStatus::zero_probability
      : SearchStatus::unreachable;
    return result;
  }

  // Max-heap on ranks_before.
  std::vector<int> heap;
  const auto heap_less = [this](int a, int b) { return ranks_before(b, a); };

  _labels.push_back({-1, kNoEdge, _source, 0, root_key,
    Distribution::point_mass(_g.dt(), 0)});
  heap.push_back(0);
  result.stats.pushed = 1;
  result.stats.queue_peak = 1;

  while (!heap.empty())
  {
    std::pop_heap(heap.begin(), heap.end(), heap_less);
    const int current = heap.back();
    heap.pop_back();
    ++result.stats.popped;

    const NodeIndex node = _labels[static_cast<std::size_t>(current)].node;
    if (node == dest)
    {
      RankedPath path = materialize(current);
      path.reliability = _labels[static_cast<std::size_t>(current)].key;
      result.paths.push_back(std::move(path));

      if (result.paths.size() == 1)
      {
        for (int l : heap)
        {
          result.stats.max_queued_key_at_finish = std::max(
            result.stats.max_queued_key_at_finish,
            _labels[static_cast<std::size_t>(l)].key);
        }
        _frontier = heap;
        _incumbent_label = current;
        _incumbent = result.paths.front();
      }

      if (static_cast<int>(result.paths.size()) == _options.k)
        break;
      continue;
    }

    const Distribution q = std::move(*_labels[static_cast<std::size_t>(current)].q);
    _labels[static_cast<std::size_t>(current)].q.reset();
    const double parent_key = _labels[static_cast<std::size_t>(current)].key;
    const int depth = _labels[static_cast<std::size_t>(current)].depth + 1;

    for (EdgeIndex e : _g.out_edges(node))
    {
      if (!kept(_options.mask, e))
        continue;
      const Edge& edge = _g.edge(e);
      if (on_path(current, edge.head))
        continue;

      Distribution child = convolve(q, edge.dist, cap);
      const double key = shifted_dot(child, _policy.reliability(edge.head), budget);
      result.stats.max_key_increase = std::max(result.stats.max_key_increase, key - parent_key);

      _labels.push_back({current, e, edge.head, depth, key, std::move(child)});
      heap.push_back(static_cast<int>(_labels.size()) - 1);
      std::push_heap(heap.begin(), heap.end(), heap_less);
      ++result.stats.pushed;

      if (heap.size() > _options.max_queue)
      {
        std::ostringstream msg;
        msg << "path search queue exceeded " << _options.max_queue << " entries";
        throw SearchBudgetExceeded(msg.str());
      }
    }
    result.stats.queue_peak = std::max(result.stats.queue_peak, heap.size());
  }

  result.status = result.paths.empty() ? SearchStatus::unreachable : SearchStatus::found;
  return result;
}

//==============================================================================
bool PathSearch::still_optimal(Bin budget) const
{
  if (!_incumbent)
    return false;
  if (_options.k != 1)
    throw UsageError("still_optimal() needs a search with k = 1");
  if (budget < 0 || budget > _policy.horizon())
    throw ArgumentError("budget outside the policy horizon");

  if (!_incumbent_label)
    return true;  // source == destination

  const Label& best = _labels[static_cast<std::size_t>(*_incumbent_label)];
  const double reliability = cdf(*best.q, budget);
  for (int l : _frontier)
  {
    const Label& lab = _labels[static_cast<std::size_t>(l)];
    if (shifted_dot(*lab.q, _policy.reliability(lab.node), budget) > reliability)
      return false;
  }
  return true;
}

//==============================================================================
const RankedPath* PathSearch::incumbent() const
{
  return _incumbent ? &*_incumbent : nullptr;
}

//==============================================================================
PathSearchResult sota_path(
  const StochasticGraph& g,
  const PolicyTable& policy,
  NodeIndex source,
  Bin budget,
  PathSearchOptions options)
{
  PathSearch search(g, policy, source, options);
  return search.run(budget);
}

//==============================================================================
double path_reliability(
  const StochasticGraph& g, std::span<const EdgeIndex> edges, Bin budget)
{
  if (budget < 0)
    throw ArgumentError("budget must be non-negative");

  Distribution q = Distribution::point_mass(g.dt(), 0);
  for (std::size_t k = 0; k < edges.size(); ++k)
  {
    const EdgeIndex e = edges[k];
    if (e < 0 || e >= g.edge_count())
      throw ArgumentError("path refers to an unknown edge");
    if (k > 0 && g.edge(edges[k - 1]).head != g.edge(e).tail)
    {
      throw ArgumentError("broken path: " + describe_edge(g, edges[k - 1])
        + " does not connect to " + describe_edge(g, e));
    }
    q = convolve(q, g.edge(e).dist, budget + 1);
  }
  return cdf(q, budget);
}

//==============================================================================
double path_reliability_nodes(
  const StochasticGraph& g, std::span<const NodeIndex> nodes, Bin budget)
{
  std::vector<EdgeIndex> edges;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k)
  {
    const NodeIndex a = nodes[k];
    const NodeIndex b = nodes[k + 1];
    if (a < 0 || a >= g.node_count() || b < 0 || b >= g.node_count())
      throw ArgumentError("path refers to an unknown node");

    EdgeIndex found = kNoEdge;
    for (EdgeIndex e : g.out_edges(a))
    {
      if (g.edge(e).head != b)
        continue;
      if (found != kNoEdge)
      {
        throw ArgumentError("ambiguous path: several edges join "
          + g.node(a).id + " and " + g.node(b).id);
      }
      found = e;
    }
    if (found == kNoEdge)
    {
      throw ArgumentError("broken path: no edge from " + g.node(a).id + " to "
        + g.node(b).id);
    }
    edges.push_back(found);
  }
  return path_reliability(g, edges, budget);
}

//==============================================================================
std::optional<RankedPath> brute_force_best_path(
  const StochasticGraph& g,
  NodeIndex source,
  NodeIndex dest,
  Bin budget,
  NodeIndex max_nodes,
  const EdgeMask* mask)
{
  if (g.node_count() > max_nodes)
  {
    std::ostringstream msg;
    msg << "brute-force search refuses graphs with more than " << max_nodes
        << " nodes (got " << g.node_count() << ")";
    throw ArgumentError(msg.str());
  }
  if (source < 0 || source >= g.node_count() || dest < 0 || dest >= g.node_count())
    throw ArgumentError("node out of range");
  if (budget < 0)
    throw ArgumentError("budget must be non-negative");

  if (source == dest)
    return RankedPath{{source}, {}, 1.0};

  std::optional<RankedPath> best;
  std::vector<bool> visited(static_cast<std::size_t>(g.node_count()), false);
  RankedPath current{{source}, {}, 0.0};
  visited[static_cast<std::size_t>(source)] = true;

  std::function<void(const Distribution&)> extend = [&](const Distribution& q) {
    const NodeIndex node = current.nodes.back();
    for (EdgeIndex e : g.out_edges(node))
    {
      if (!kept(mask, e))
        continue;
      const Edge& edge = g.edge(e);
      if (visited[static_cast<std::size_t>(edge.head)])
        continue;

      const Distribution next = convolve(q, edge.dist, budget + 1);
      current.nodes.push_back(edge.head);
      current.edges.push_back(e);

      if (edge.head == dest)
      {
        const double r = cdf(next, budget);
        const bool better = !best || r > best->reliability + kTieTolerance
          || (std::abs(r - best->reliability) <= kTieTolerance
            && std::tie(current.nodes, current.edges) < std::tie(best->nodes, best->edges));
        if (better)
        {
          best = current;
          best->reliability = r;
        }
      }
      else
      {
        visited[static_cast<std::size_t>(edge.head)] = true;
        extend(next);
        visited[static_cast<std::size_t>(edge.head)] = false;
      }

      current.nodes.pop_back();
      current.edges.pop_back();
    }
  };

  extend(Distribution::point_mass(g.dt(), 0));
  return best;
}

} // namespace sota
