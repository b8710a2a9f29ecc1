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

#ifndef SOTA__NETWORK_HPP
#define SOTA__NETWORK_HPP

#include <sota/timeseries.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <span>
#include <string>
#include <vector>

namespace sota {

using NodeIndex = std::int32_t;
using EdgeIndex = std::int32_t;

inline constexpr EdgeIndex kNoEdge = -1;

/// One flag per edge; true keeps the edge.
using EdgeMask = std::vector<bool>;

struct Node
{
  std::string id;
  double x = 0.0;
  double y = 0.0;
};

struct Edge
{
  std::string id;
  NodeIndex tail;
  NodeIndex head;
  Distribution dist;
};

//==============================================================================
/// Directed graph with a travel-time distribution on every edge.
///
/// Parallel edges between the same ordered pair are allowed and are told
/// apart by edge index. Self-loops are rejected. Every distribution must
/// share the graph's dt and put zero mass on bin 0.
class StochasticGraph
{
public:
  /// Throws ValidationError naming the first offending node or edge.
  StochasticGraph(double dt, std::vector<Node> nodes, std::vector<Edge> edges);

  double dt() const { return _dt; }
  NodeIndex node_count() const { return static_cast<NodeIndex>(_nodes.size()); }
  EdgeIndex edge_count() const { return static_cast<EdgeIndex>(_edges.size()); }

  const Node& node(NodeIndex i) const { return _nodes[static_cast<std::size_t>(i)]; }
  const Edge& edge(EdgeIndex e) const { return _edges[static_cast<std::size_t>(e)]; }
  std::span<const Node> nodes() const { return _nodes; }
  std::span<const Edge> edges() const { return _edges; }

  /// Outgoing edges of i, sorted by (head, edge index).
  std::span<const EdgeIndex> out_edges(NodeIndex i) const;
  std::span<const EdgeIndex> in_edges(NodeIndex i) const;

  std::optional<NodeIndex> find_node(const std::string& id) const;

  /// Like find_node but throws ArgumentError for unknown ids.
  NodeIndex node_index(const std::string& id) const;

private:
  double _dt;
  std::vector<Node> _nodes;
  std::vector<Edge> _edges;
  std::vector<EdgeIndex> _out;
  std::vector<std::size_t> _out_begin;
  std::vector<EdgeIndex> _in;
  std::vector<std::size_t> _in_begin;
  std::unordered_map<std::string, NodeIndex> _by_id;
};

/// Human-readable edge identity for error messages, e.g. "e3 (v1 -> v2)".
std::string describe_edge(const StochasticGraph& g, EdgeIndex e);

//==============================================================================
// Graph files

StochasticGraph load_graph(std::istream& in);
StochasticGraph load_graph_file(const std::string& path);
void save_graph(const StochasticGraph& g, std::ostream& out);
void save_graph_file(const StochasticGraph& g, const std::string& path);

//==============================================================================
// Discretization of parametric travel-time models. All times in seconds.

/// Free-flow time rounded up to a bin, plus a gamma delay with the given
/// mean and coefficient of variation rounded to the nearest bin. A zero mean
/// delay gives a point mass at the free-flow bin.
Distribution discretize_shifted_gamma(
  double free_flow_s, double mean_delay_s, double cv, double dt);

struct MixtureComponent
{
  double weight;
  double mean_s;
  double sd_s;
};

/// Mass of bin k is the mixture probability of ((k-1) dt, k dt], restricted
/// to bins >= max(1, ceil(min_s / dt)) and renormalized.
Distribution discretize_gaussian_mixture(
  std::span<const MixtureComponent> components, double min_s, double dt);

/// Normalized counts starting at `start_bin`.
Distribution discretize_histogram(
  Bin start_bin, std::span<const double> counts, double dt);

//==============================================================================
// Synthetic networks

struct TopologyEdge
{
  std::string id;
  NodeIndex tail;
  NodeIndex head;
  double length_m;
  double speed_mps;
};

struct Topology
{
  std::vector<Node> nodes;
  std::vector<TopologyEdge> edges;
};

struct GeneratorSpec
{
  enum class Model
  {
    zero_variance,
    shifted_gamma,
  };

  Model model = Model::shifted_gamma;

  /// Mean delay as a fraction of the free-flow time, drawn uniformly per
  /// edge from [delay_ratio_min, delay_ratio_max]. Ignored when
  /// mean_delay_s is set.
  double delay_ratio_min = 0.2;
  double delay_ratio_max = 1.0;

  /// Absolute mean delay in seconds for every edge.
  std::optional<double> mean_delay_s;

  /// Coefficient of variation of the delay, drawn uniformly per edge.
  double cv_min = 0.5;
  double cv_max = 1.5;
};

/// Throws ValidationError when an edge's free-flow time rounds to bin 0 (the
/// time step is too coarse) or a length or speed is not positive.
StochasticGraph synthesize_distributions(
  const Topology& topology,
  const GeneratorSpec& spec,
  double dt,
  std::uint64_t seed);

/// k x k lattice with bidirectional edges between 4-neighbours. Lengths are
/// spacing_m with up to 30% jitter and speed limits are drawn from a small
/// set of road classes.
Topology grid_topology(int k, double spacing_m, std::uint64_t seed);

//==============================================================================
struct RegionPartition
{
  int region_count = 0;
  std::vector<int> region_of;                  // node -> region
  std::vector<std::vector<NodeIndex>> members; // region -> nodes, ascending
};

/// Buckets nodes into a k x k grid over their bounding box, then drops
/// empty cells and renumbers the rest in row-major cell order.
RegionPartition grid_partition(const StochasticGraph& g, int k);

} // namespace sota

#endif // SOTA__NETWORK_HPP
