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

#ifndef SOTA__POLICY_HPP
#define SOTA__POLICY_HPP

#include <sota/network.hpp>
#include <sota/potentials.hpp>
#include <sota/timeseries.hpp>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sota {

enum class Backend
{
  direct,
  zdc,
};

enum class OrderStrategy
{
  /// One [t, t] entry per node for t = 0..T.
  time_sweep,
  /// Greedy interval extension of the node with the lowest computed frontier.
  dijkstra_blocks,
};

std::string to_string(Backend backend);
Backend backend_from_string(const std::string& name);

//==============================================================================
/// u_node(t) is to be computed for lo <= t <= hi.
struct UpdateEntry
{
  NodeIndex node;
  Bin lo;
  Bin hi;
};

using UpdateOrder = std::vector<UpdateEntry>;

/// Masked-out edges impose no ordering constraint.
UpdateOrder compute_update_order(
  const StochasticGraph& g,
  NodeIndex dest,
  Bin horizon,
  OrderStrategy strategy,
  const EdgeMask* mask = nullptr);

/// Checks that every node's entries tile [0, horizon] in increasing order
/// and that each entry only depends on values produced by earlier entries.
/// On failure returns false and, when `why` is given, describes the first
/// violation.
bool validate_update_order(
  const StochasticGraph& g,
  NodeIndex dest,
  Bin horizon,
  const UpdateOrder& order,
  std::string* why = nullptr,
  const EdgeMask* mask = nullptr);

//==============================================================================
/// On-time arrival probabilities and the optimal next edge for every node
/// and remaining budget 0..horizon, toward one destination.
class PolicyTable
{
public:
  PolicyTable(
    NodeIndex dest,
    Bin horizon,
    double dt,
    std::vector<std::vector<double>> u,
    std::vector<std::vector<EdgeIndex>> next);

  NodeIndex destination() const { return _dest; }
  Bin horizon() const { return _horizon; }
  double dt() const { return _dt; }
  NodeIndex node_count() const { return static_cast<NodeIndex>(_u.size()); }

  /// u_i(0..horizon).
  std::span<const double> reliability(NodeIndex i) const
  {
    return _u[static_cast<std::size_t>(i)];
  }
  double reliability(NodeIndex i, Bin t) const
  {
    return _u[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
  }

  /// Optimal edge out of i with t remaining, or kNoEdge at the destination
  /// and wherever u_i(t) = 0.
  EdgeIndex next_edge(NodeIndex i, Bin t) const
  {
    return _next[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
  }

private:
  NodeIndex _dest;
  Bin _horizon;
  double _dt;
  std::vector<std::vector<double>> _u;
  std::vector<std::vector<EdgeIndex>> _next;
};

struct PolicyOptions
{
  Backend backend = Backend::zdc;
  OrderStrategy order = OrderStrategy::time_sweep;
  ZdcConfig zdc;

  /// Edges masked out are ignored.
  const EdgeMask* mask = nullptr;

  /// Policy-mode potentials: an edge is only evaluated at budgets where the
  /// table says it may be active.
  const PotentialTable* activity = nullptr;
};

/// Solves u_ij(t) = sum_{tau} u_j(t - tau) p_ij(tau), u_i = max_j u_ij,
/// u_dest = 1 for t = 0..horizon. Ties go to the smaller head node, then the
/// smaller edge index. Throws ArgumentError on a bad destination or horizon.
PolicyTable compute_policy(
  const StochasticGraph& g,
  NodeIndex dest,
  Bin horizon,
  const PolicyOptions& options = {});

/// Same, with edges pruned by a potential table at the query budget.
PolicyTable compute_policy(
  const StochasticGraph& g,
  NodeIndex dest,
  Bin horizon,
  const PotentialTable& potentials,
  Bin budget,
  PolicyOptions options = {});

/// u_ij(t) recomputed by direct summation from the table's u_j.
double edge_reliability(
  const StochasticGraph& g, const PolicyTable& policy, EdgeIndex e, Bin t);

void save_policy(const StochasticGraph& g, const PolicyTable& policy, std::ostream& out);
PolicyTable load_policy(const StochasticGraph& g, std::istream& in);

} // namespace sota

#endif // SOTA__POLICY_HPP
