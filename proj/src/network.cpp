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

#include <sota/network.hpp>

#include <sota/error.hpp>

#include <json.hpp>

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

namespace sota {

using json = nlohmann::json;

namespace {

constexpr double kEps = 1e-9;
constexpr double kTailCutoff = 1e-12;
constexpr Bin kMaxSupportBins = 1 << 22;

Bin ceil_bins(double seconds, double dt)
{
  return static_cast<Bin>(std::ceil(seconds / dt - kEps));
}

double normal_cdf(double x, double mean, double sd)
{
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

void build_index(
  std::size_t node_count,
  const std::vector<Edge>& edges,
  bool outgoing,
  std::vector<EdgeIndex>& index,
  std::vector<std::size_t>& begin)
{
  begin.assign(node_count + 1, 0);
  for (const Edge& e : edges)
    ++begin[static_cast<std::size_t>(outgoing ? e.tail : e.head) + 1];
  std::partial_sum(begin.begin(), begin.end(), begin.begin());

  index.resize(edges.size());
  std::vector<std::size_t> cursor(begin.begin(), begin.end() - 1);
  for (std::size_t e = 0; e < edges.size(); ++e)
  {
    const auto owner = static_cast<std::size_t>(
      outgoing ? edges[e].tail : edges[e].head);
    index[cursor[owner]++] = static_cast<EdgeIndex>(e);
  }

  // Sort each bucket by (other endpoint, edge index) for deterministic
  // tie-breaking downstream.
  for (std::size_t i = 0; i < node_count; ++i)
  {
    std::sort(index.begin() + static_cast<std::ptrdiff_t>(begin[i]),
      index.begin() + static_cast<std::ptrdiff_t>(begin[i + 1]),
      [&](EdgeIndex a, EdgeIndex b) {
        const Edge& ea = edges[static_cast<std::size_t>(a)];
        const Edge& eb = edges[static_cast<std::size_t>(b)];
        const NodeIndex oa = outgoing ? ea.head : ea.tail;
        const NodeIndex ob = outgoing ? eb.head : eb.tail;
        return std::tie(oa, a) < std::tie(ob, b);
      });
  }
}

std::string node_id_from_json(const json& j)
{
  if (j.is_string())
    return j.get<std::string>();
  if (j.is_number_integer())
    return std::to_string(j.get<long long>());
  throw ParseError("node ids must be strings or integers");
}

Distribution distribution_from_json(const json& j, double graph_dt)
{
  if (j.contains("pmf"))
  {
    const double dt = j.value("dt", graph_dt);
    if (std::abs(dt - graph_dt) > kEps * graph_dt)
    {
      std::ostringstream msg;
      msg << "distribution dt " << dt << " differs from graph dt " << graph_dt;
      throw ValidationError(msg.str());
    }

    std::vector<std::pair<Bin, double>> pairs;
    for (const auto& entry : j.at("pmf"))
    {
      if (!entry.is_array() || entry.size() != 2)
        throw ParseError("pmf entries must be [bin, probability] pairs");
      pairs.emplace_back(entry[0].get<Bin>(), entry[1].get<double>());
    }
    return Distribution::from_pairs(graph_dt, pairs);
  }

  const std::string model = j.at("model").get<std::string>();
  if (model == "histogram")
  {
    const auto counts = j.at("counts").get<std::vector<double>>();
    return discretize_histogram(j.value("start_bin", Bin{1}), counts, graph_dt);
  }

  if (model == "shifted-gamma")
  {
    return discretize_shifted_gamma(j.at("free_flow").get<double>(),
      j.value("mean_delay", 0.0), j.value("cv", 1.0), graph_dt);
  }

  if (model == "discretized-gaussian-mixture")
  {
    std::vector<MixtureComponent> components;
    for (const auto& c : j.at("components"))
    {
      components.push_back({c.value("weight", 1.0), c.at("mean").get<double>(),
        c.at("sd").get<double>()});
    }
    return discretize_gaussian_mixture(components, j.value("min", 0.0), graph_dt);
  }

  throw ParseError("unknown distribution model '" + model + "'");
}

json distribution_to_json(const Distribution& d)
{
  json pmf = json::array();
  const auto m = d.mass();
  for (Bin k = d.min_bin(); k < d.size(); ++k)
  {
    if (m[static_cast<std::size_t>(k)] > 0.0)
      pmf.push_back(json::array({k, m[static_cast<std::size_t>(k)]}));
  }
  return json{{"dt", d.dt()}, {"pmf", std::move(pmf)}};
}

} // namespace

//==============================================================================
StochasticGraph::StochasticGraph(
  double dt, std::vector<Node> nodes, std::vector<Edge> edges)
  : _dt(dt),
    _nodes(std::move(nodes)),
    _edges(std::move(edges))
{
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ValidationError("graph dt must be positive and finite");

  if (_nodes.empty())
    throw ValidationError("graph has no nodes");

  for (std::size_t i = 0; i < _nodes.size(); ++i)
  {
    const Node& n = _nodes[i];
    if (n.id.empty())
      throw ValidationError("node " + std::to_string(i) + " has an empty id");
    if (!std::isfinite(n.x) || !std::isfinite(n.y))
      throw ValidationError("node '" + n.id + "' has non-finite coordinates");
    if (!_by_id.emplace(n.id, static_cast<NodeIndex>(i)).second)
      throw ValidationError("duplicate node id '" + n.id + "'");
  }

  std::unordered_set<std::string> edge_ids;
  for (std::size_t e = 0; e < _edges.size(); ++e)
  {
    Edge& edge = _edges[e];
    if (edge.id.empty())
      edge.id = "e" + std::to_string(e);

    const auto fail = [&](const std::string& what) {
      std::ostringstream msg;
      msg << "edge '" << edge.id << "'";
      if (edge.tail >= 0 && edge.tail < node_count() && edge.head >= 0
        && edge.head < node_count())
      {
        msg << " (" << node(edge.tail).id << " -> " << node(edge.head).id << ")";
      }
      msg << ": " << what;
      throw ValidationError(msg.str());
    };

    if (!edge_ids.insert(edge.id).second)
      fail("duplicate edge id");
    if (edge.tail < 0 || edge.tail >= node_count() || edge.head < 0
      || edge.head >= node_count())
      fail("endpoint out of range");
    if (edge.tail == edge.head)
      fail("self-loops are not allowed");
    if (std::abs(edge.dist.dt() - dt) > kEps * dt)
      fail("distribution dt differs from graph dt");
    if (edge.dist.truncated())
      fail("edge distributions may not be truncated");
    if (edge.dist.min_bin() < 1)
    {
      fail("probability mass at bin 0; the time step dt must not exceed the "
           "edge's minimum travel time");
    }
  }

  build_index(_nodes.size(), _edges, true, _out, _out_begin);
  build_index(_nodes.size(), _edges, false, _in, _in_begin);
}

//==============================================================================
std::span<const EdgeIndex> StochasticGraph::out_edges(NodeIndex i) const
{
  const auto b = _out_begin[static_cast<std::size_t>(i)];
  const auto e = _out_begin[static_cast<std::size_t>(i) + 1];
  return std::span<const EdgeIndex>(_out).subspan(b, e - b);
}

//==============================================================================
std::span<const EdgeIndex> StochasticGraph::in_edges(NodeIndex i) const
{
  const auto b = _in_begin[static_cast<std::size_t>(i)];
  const auto e = _in_begin[static_cast<std::size_t>(i) + 1];
  return std::span<const EdgeIndex>(_in).subspan(b, e - b);
}

//==============================================================================
std::optional<NodeIndex> StochasticGraph::find_node(const std::string& id) const
{
  const auto it = _by_id.find(id);
  if (it == _by_id.end())
    return std::nullopt;
  return it->second;
}

//==============================================================================
NodeIndex StochasticGraph::node_index(const std::string& id) const
{
  if (const auto i = find_node(id))
    return *i;
  throw ArgumentError("unknown node '" + id + "'");
}

//==============================================================================
std::string describe_edge(const StochasticGraph& g, EdgeIndex e)
{
  const Edge& edge = g.edge(e);
  return edge.id + " (" + g.node(edge.tail).id + " -> " + g.node(edge.head).id
    + ")";
}

//==============================================================================
StochasticGraph load_graph(std::istream& in)
{
  json doc;
  try
  {
    doc = json::parse(in);
  }
  catch (const json::parse_error& e)
  {
    throw ParseError(std::string("graph file is not valid JSON: ") + e.what());
  }

  try
  {
    const double dt = doc.at("dt").get<double>();

    std::vector<Node> nodes;
    for (const auto& n : doc.at("nodes"))
    {
      nodes.push_back(
        {node_id_from_json(n.at("id")), n.at("x").get<double>(),
         n.at("y").get<double>()});
    }

    std::unordered_map<std::string, NodeIndex> by_id;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      by_id.emplace(nodes[i].id, static_cast<NodeIndex>(i));

    const auto lookup = [&](const json& ref, const std::string& edge) {
      const std::string id = node_id_from_json(ref);
      const auto it = by_id.find(id);
      if (it == by_id.end())
        throw ValidationError("edge '" + edge + "' refers to unknown node '" + id + "'");
      return it->second;
    };

    std::vector<Edge> edges;
    const json& edge_list = doc.value("edges", json::array());
    for (std::size_t e = 0; e < edge_list.size(); ++e)
    {
      const json& entry = edge_list[e];
      const std::string id = entry.contains("id")
        ? node_id_from_json(entry.at("id"))
        : "e" + std::to_string(e);
      const NodeIndex tail = lookup(entry.at("from"), id);
      const NodeIndex head = lookup(entry.at("to"), id);
      try
      {
        edges.push_back({id, tail, head, distribution_from_json(entry.at("dist"), dt)});
      }
      catch (const ValidationError& err)
      {
        throw ValidationError("edge '" + id + "': " + err.what());
      }
    }

    return StochasticGraph(dt, std::move(nodes), std::move(edges));
  }
  catch (const json::exception& e)
  {
    throw ParseError(std::string("malformed graph document: ") + e.what());
  }
}

//==============================================================================
StochasticGraph load_graph_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ArgumentError("cannot open graph file '" + path + "'");
  return load_graph(in);
}

//==============================================================================
void save_graph(const StochasticGraph& g, std::ostream& out)
{
  json nodes = json::array();
  for (const Node& n : g.nodes())
    nodes.push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}});

  json edges = json::array();
  for (const Edge& e : g.edges())
  {
    edges.push_back({{"id", e.id}, {"from", g.node(e.tail).id},
      {"to", g.node(e.head).id}, {"dist", distribution_to_json(e.dist)}});
  }

  json doc{{"dt", g.dt()}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
  out << doc.dump(1) << '\n';
}

//==============================================================================
void save_graph_file(const StochasticGraph& g, const std::string& path)
{
  std::ofstream out(path);
  if (!out)
    throw ArgumentError("cannot write graph file '" + path + "'");
  save_graph(g, out);
}

//==============================================================================
Distribution discretize_shifted_gamma(
  double free_flow_s, double mean_delay_s, double cv, double dt)
{
  if (!(free_flow_s > 0.0))
    throw ValidationError("free-flow time must be positive");
  if (!(mean_delay_s >= 0.0) || !(cv >= 0.0))
    throw ValidationError("delay mean and cv must be non-negative");

  const Bin base = ceil_bins(free_flow_s, dt);
  if (free_flow_s / dt < 1.0 - kEps)
  {
    throw ValidationError(
      "free-flow time is below one time step; decrease dt");
  }

  if (mean_delay_s == 0.0 || cv == 0.0)
  {
    const Bin delay = static_cast<Bin>(std::lround(mean_delay_s / dt));
    return Distribution::point_mass(dt, base + delay);
  }

  const double shape = 1.0 / (cv * cv);
  const double scale = mean_delay_s * cv * cv;
  const auto delay_cdf = [&](double seconds) {
    return seconds <= 0.0 ? 0.0 : boost::math::gamma_p(shape, seconds / scale);
  };

  // Delay rounded to the nearest bin: bin m covers [(m - 1/2) dt, (m + 1/2) dt).
  std::vector<double> mass(static_cast<std::size_t>(base), 0.0);
  double lower = 0.0;
  for (Bin m = 0; m < kMaxSupportBins; ++m)
  {
    const double upper = delay_cdf((m + 0.5) * dt);
    mass.push_back(upper - lower);
    lower = upper;
    if (1.0 - upper < kTailCutoff)
      break;
  }

  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  for (double& m : mass)
    m /= total;
  return Distribution(dt, std::move(mass));
}

//==============================================================================
Distribution discretize_gaussian_mixture(
  std::span<const MixtureComponent> components, double min_s, double dt)
{
  if (components.empty())
    throw ValidationError("gaussian mixture needs at least one component");

  double weight_sum = 0.0;
  double hi_s = 0.0;
  for (const auto& c : components)
  {
    if (!(c.weight >= 0.0) || !(c.sd_s >= 0.0) || !std::isfinite(c.mean_s))
      throw ValidationError("invalid gaussian mixture component");
    weight_sum += c.weight;
    hi_s = std::max(hi_s, c.mean_s + 10.0 * c.sd_s);
  }
  if (!(weight_sum > 0.0))
    throw ValidationError("gaussian mixture weights sum to zero");

  const Bin first = std::max<Bin>(1, ceil_bins(min_s, dt));
  const Bin last = std::max(first, ceil_bins(hi_s, dt));
  if (last - first > kMaxSupportBins)
    throw ValidationError("gaussian mixture support too wide for dt");

  const auto mixture_cdf = [&](double x) {
    double p = 0.0;
    for (const auto& c : components)
    {
      const double cdf = c.sd_s > 0.0 ? normal_cdf(x, c.mean_s, c.sd_s)
                                      : (x >= c.mean_s ? 1.0 : 0.0);
      p += c.weight / weight_sum * cdf;
    }
    return p;
  };

  std::vector<double> mass(static_cast<std::size_t>(last) + 1, 0.0);
  double total = 0.0;
  // Bin k covers [(k - 1/2) dt, (k + 1/2) dt), cut below at min_s.
  for (Bin k = first; k <= last; ++k)
  {
    const double lo = k == first ? std::max(min_s, (k - 0.5) * dt) : (k - 0.5) * dt;
    const double p = mixture_cdf((k + 0.5) * dt) - mixture_cdf(lo);
    mass[static_cast<std::size_t>(k)] = std::max(0.0, p);
    total += mass[static_cast<std::size_t>(k)];
  }

  if (!(total > 0.0))
    throw ValidationError("gaussian mixture has no mass above its minimum");

  for (double& m : mass)
    m /= total;
  return Distribution(dt, std::move(mass));
}

//==============================================================================
Distribution discretize_histogram(
  Bin start_bin, std::span<const double> counts, double dt)
{
  if (start_bin < 0)
    throw ValidationError("histogram start bin must be non-negative");

  double total = 0.0;
  for (double c : counts)
  {
    if (!(c >= 0.0) || !std::isfinite(c))
      throw ValidationError("histogram counts must be non-negative");
    total += c;
  }
  if (!(total > 0.0))
    throw ValidationError("histogram has no mass");

  std::vector<double> mass(static_cast<std::size_t>(start_bin), 0.0);
  for (double c : counts)
    mass.push_back(c / total);
  return Distribution(dt, std::move(mass));
}

//==============================================================================
StochasticGraph synthesize_distributions(
  const Topology& topology,
  const GeneratorSpec& spec,
  double dt,
  std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Edge> edges;
  edges.reserve(topology.edges.size());
  for (const TopologyEdge& te : topology.edges)
  {
    const double ratio_draw = unit(rng);
    const double cv_draw = unit(rng);

    const auto fail = [&](const std::string& what) {
      throw ValidationError("edge '" + te.id + "': " + what);
    };

    if (!(te.length_m > 0.0) || !(te.speed_mps > 0.0))
      fail("length and speed limit must be positive");

    const double free_flow = te.length_m / te.speed_mps;
    if (free_flow / dt < 1.0 - kEps)
      fail("free-flow time is below one time step; decrease dt");

    const double ratio = spec.delay_ratio_min
      + (spec.delay_ratio_max - spec.delay_ratio_min) * ratio_draw;
    const double cv = spec.cv_min + (spec.cv_max - spec.cv_min) * cv_draw;
    const double mean_delay = spec.mean_delay_s.value_or(ratio * free_flow);

    try
    {
      Distribution dist = spec.model == GeneratorSpec::Model::zero_variance
        ? Distribution::point_mass(dt, ceil_bins(free_flow, dt))
        : discretize_shifted_gamma(free_flow, mean_delay, cv, dt);
      edges.push_back({te.id, te.tail, te.head, std::move(dist)});
    }
    catch (const ValidationError& err)
    {
      fail(err.what());
    }
  }

  return StochasticGraph(dt, topology.nodes, std::move(edges));
}

//==============================================================================
Topology grid_topology(int k, double spacing_m, std::uint64_t seed)
{
  if (k < 1)
    throw ArgumentError("grid size must be at least 1");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.0, 0.3);
  // Residential, arterial and highway speed limits in m/s.
  const double speeds[] = {8.33, 13.89, 22.22};
  std::discrete_distribution<int> road_class({5, 3, 1});

  Topology topo;
  for (int r = 0; r < k; ++r)
  {
    for (int c = 0; c < k; ++c)
    {
      topo.nodes.push_back(
        {std::to_string(r * k + c), c * spacing_m, r * spacing_m});
    }
  }

  const auto add_pair = [&](int a, int b) {
    const double length = spacing_m * (1.0 + jitter(rng));
    const double speed = speeds[road_class(rng)];
    const auto id = [&] { return "e" + std::to_string(topo.edges.size()); };
    topo.edges.push_back({id(), a, b, length, speed});
    topo.edges.push_back({id(), b, a, length, speed});
  };

  for (int r = 0; r < k; ++r)
  {
    for (int c = 0; c < k; ++c)
    {
      const int i = r * k + c;
      if (c + 1 < k)
        add_pair(i, i + 1);
      if (r + 1 < k)
        add_pair(i, i + k);
    }
  }
  return topo;
}

//==============================================================================
RegionPartition grid_partition(const StochasticGraph& g, int k)
{
  if (k < 1)
    throw ArgumentError("grid partition needs k >= 1");

  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  for (const Node& n : g.nodes())
  {
    min_x = std::min(min_x, n.x);
    max_x = std::max(max_x, n.x);
    min_y = std::min(min_y, n.y);
    max_y = std::max(max_y, n.y);
  }

  const auto cell_of = [k](double v, double lo, double hi) {
    if (!(hi > lo))
      return 0;
    const int c = static_cast<int>(std::floor((v - lo) / (hi - lo) * k));
    return std::clamp(c, 0, k - 1);
  };

  std::vector<int> cell(static_cast<std::size_t>(g.node_count()));
  std::vector<int> remap(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), -1);
  for (NodeIndex i = 0; i < g.node_count(); ++i)
  {
    const Node& n = g.node(i);
    const int c = cell_of(n.y, min_y, max_y) * k + cell_of(n.x, min_x, max_x);
    cell[static_cast<std::size_t>(i)] = c;
    remap[static_cast<std::size_t>(c)] = 0;
  }

  RegionPartition partition;
  for (int& r : remap)
  {
    if (r == 0)
      r = partition.region_count++;
  }

  partition.region_of.resize(cell.size());
  partition.members.resize(static_cast<std::size_t>(partition.region_count));
  for (std::size_t i = 0; i < cell.size(); ++i)
  {
    const int r = remap[static_cast<std::size_t>(cell[i])];
    partition.region_of[i] = r;
    partition.members[static_cast<std::size_t>(r)].push_back(static_cast<NodeIndex>(i));
  }
  return partition;
}

} // namespace sota
