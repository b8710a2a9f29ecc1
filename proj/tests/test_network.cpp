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

#include <doctest.h>

#include "support.hpp"

#include <sota/error.hpp>
#include <sota/network.hpp>

#include <set>
#include <sstream>

using namespace sota;

namespace {

StochasticGraph parse(const std::string& text)
{
  std::istringstream in(text);
  return load_graph(in);
}

const char* two_nodes = R"({"dt": 1, "nodes": [{"id": "a", "x": 0, "y": 0},
  {"id": "b", "x": 1, "y": 0}], "edges": [%EDGES%]})";

StochasticGraph with_edges(const std::string& edges)
{
  std::string text = two_nodes;
  text.replace(text.find("%EDGES%"), 7, edges);
  return parse(text);
}

Topology single_edge(double length, double speed)
{
  Topology t;
  t.nodes = {{"a", 0, 0}, {"b", 1, 0}};
  t.edges = {{"ab", 0, 1, length, speed}};
  return t;
}

} // namespace

TEST_CASE("load the counterexample fixture")
{
  const auto g = test::counterexample();
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 4);
  CHECK(g.dt() == 1.0);
  CHECK(g.node_index("v2") == 1);
  CHECK(g.edge(1).id == "e2");
  CHECK(g.edge(1).dist[3] == doctest::Approx(0.1));
  CHECK(g.out_edges(0).size() == 3);
  CHECK(g.in_edges(1).size() == 3);
  CHECK(g.out_edges(2).empty());
  CHECK_FALSE(g.find_node("v9").has_value());
  CHECK_THROWS_AS(g.node_index("v9"), ArgumentError);
}

TEST_CASE("graph validation")
{
  CHECK_THROWS_AS(parse(R"({"dt": 1, "nodes": [], "edges": []})"), ValidationError);
  CHECK_THROWS_AS(parse("{not json"), ParseError);
  CHECK_THROWS_AS(parse(R"({"nodes": []})"), ParseError);

  try
  {
    with_edges(R"({"id": "z", "from": "a", "to": "b", "dist": {"pmf": [[0, 0.5], [1, 0.5]]}})");
    FAIL("expected a validation error");
  }
  catch (const ValidationError& e)
  {
    const std::string msg = e.what();
    CHECK(msg.find("'z'") != std::string::npos);
    CHECK(msg.find("dt") != std::string::npos);
  }

  CHECK_THROWS_AS(
    with_edges(R"({"from": "a", "to": "b", "dist": {"dt": 2, "pmf": [[1, 1.0]]}})"),
    ValidationError);
  CHECK_THROWS_AS(
    with_edges(R"({"from": "a", "to": "a", "dist": {"pmf": [[1, 1.0]]}})"),
    ValidationError);
  CHECK_THROWS_AS(
    with_edges(R"({"from": "a", "to": "c", "dist": {"pmf": [[1, 1.0]]}})"),
    ValidationError);
  CHECK_THROWS_AS(
    with_edges(R"({"from": "a", "to": "b", "dist": {"pmf": [[1, 0.7]]}})"),
    ValidationError);
  CHECK_NOTHROW(with_edges(R"({"from": "a", "to": "b", "dist": {"pmf": [[1, 1.0]]}},
    {"from": "a", "to": "b", "dist": {"pmf": [[2, 1.0]]}})"));
}

TEST_CASE("parametric distribution literals")
{
  const auto g = with_edges(R"(
    {"from": "a", "to": "b", "dist": {"model": "histogram", "start_bin": 2, "counts": [1, 3]}},
    {"from": "b", "to": "a", "dist": {"model": "shifted-gamma", "free_flow": 10, "mean_delay": 5, "cv": 1}},
    {"from": "a", "to": "b", "dist": {"model": "discretized-gaussian-mixture", "min": 3,
      "components": [{"weight": 1, "mean": 8, "sd": 2}]}})");
  CHECK(g.edge(0).dist[2] == doctest::Approx(0.25));
  CHECK(g.edge(0).dist[3] == doctest::Approx(0.75));
  CHECK(g.edge(1).dist.min_bin() == 10);
  CHECK(g.edge(2).dist.min_bin() >= 3);
  CHECK(g.edge(2).dist.mean_bins() == doctest::Approx(8.0).epsilon(0.05));
}

TEST_CASE("save and load round trip")
{
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial)
  {
    const auto g = test::random_graph(rng, {});
    std::stringstream buffer;
    save_graph(g, buffer);
    const auto h = load_graph(buffer);
    REQUIRE(h.edge_count() == g.edge_count());
    for (EdgeIndex e = 0; e < g.edge_count(); ++e)
    {
      CHECK(h.edge(e).tail == g.edge(e).tail);
      CHECK(h.edge(e).head == g.edge(e).head);
      const Distribution& a = g.edge(e).dist;
      const Distribution& b = h.edge(e).dist;
      for (Bin k = 0; k < std::max(a.size(), b.size()); ++k)
        CHECK(a[k] == b[k]);
    }
  }
}

TEST_CASE("shifted gamma discretization")
{
  const auto d = discretize_shifted_gamma(10.0, 5.0, 1.0, 1.0);
  CHECK(d.min_bin() == 10);
  CHECK(d.mean_bins() == doctest::Approx(15.0).epsilon(0.5 / 15.0));

  const auto point = discretize_shifted_gamma(10.0, 0.0, 1.0, 1.0);
  CHECK(point.min_bin() == 10);
  CHECK(point[10] == 1.0);

  // Discretized mean tracks the analytic mean across shapes.
  for (double cv : {0.3, 0.7, 1.2})
  {
    const auto g = discretize_shifted_gamma(20.0, 12.0, cv, 1.0);
    CHECK(g.mean_bins() == doctest::Approx(32.0).epsilon(0.5 / 32.0));
  }
}

TEST_CASE("synthesize distributions")
{
  GeneratorSpec zero;
  zero.model = GeneratorSpec::Model::zero_variance;
  const auto g = synthesize_distributions(single_edge(100.0, 10.0), zero, 1.0, 1);
  CHECK(g.edge(0).dist.min_bin() == 10);
  CHECK(g.edge(0).dist[10] == 1.0);

  GeneratorSpec gamma;
  gamma.mean_delay_s = 5.0;
  const auto h = synthesize_distributions(single_edge(100.0, 10.0), gamma, 1.0, 1);
  CHECK(h.edge(0).dist.min_bin() == 10);
  CHECK(h.edge(0).dist.mean_bins() == doctest::Approx(15.0).epsilon(0.5 / 15.0));

  CHECK_THROWS_AS(synthesize_distributions(single_edge(0.5, 10.0), zero, 1.0, 1), ValidationError);
  CHECK_THROWS_AS(synthesize_distributions(single_edge(-1.0, 10.0), zero, 1.0, 1), ValidationError);

  const auto topo = grid_topology(5, 200.0, 9);
  const auto a = synthesize_distributions(topo, {}, 1.0, 9);
  const auto b = synthesize_distributions(topo, {}, 1.0, 9);
  REQUIRE(a.edge_count() == b.edge_count());
  CHECK(a.edge_count() == 2 * 2 * 5 * 4);
  for (EdgeIndex e = 0; e < a.edge_count(); ++e)
  {
    const auto x = a.edge(e).dist.mass();
    const auto y = b.edge(e).dist.mass();
    CHECK(std::equal(x.begin(), x.end(), y.begin(), y.end()));
    CHECK(a.edge(e).dist.min_bin() >= 1);
  }
}

TEST_CASE("grid partition")
{
  const auto g = test::counterexample();
  const auto one = grid_partition(g, 1);
  CHECK(one.region_count == 1);
  CHECK(one.members[0].size() == 3);

  std::vector<Node> corners{{"a", 0, 0}, {"b", 1, 0}, {"c", 0, 1}, {"d", 1, 1}};
  const StochasticGraph square(1.0, corners, {});
  const auto four = grid_partition(square, 2);
  CHECK(four.region_count == 4);
  std::set<int> seen(four.region_of.begin(), four.region_of.end());
  CHECK(seen.size() == 4);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coord(0.0, 100.0);
  std::vector<Node> scattered;
  for (int i = 0; i < 100; ++i)
    scattered.push_back({std::to_string(i), coord(rng), coord(rng)});
  const StochasticGraph cloud(1.0, scattered, {});
  const auto p = grid_partition(cloud, 4);
  const auto q = grid_partition(cloud, 4);
  CHECK(p.region_of == q.region_of);
  CHECK(p.region_of.size() == 100);
  std::set<int> ids(p.region_of.begin(), p.region_of.end());
  CHECK(static_cast<int>(ids.size()) == p.region_count);
  CHECK(*ids.rbegin() == p.region_count - 1);
  for (int r = 0; r < p.region_count; ++r)
  {
    for (NodeIndex i : p.members[static_cast<std::size_t>(r)])
      CHECK(p.region_of[static_cast<std::size_t>(i)] == r);
  }

  CHECK_THROWS_AS(grid_partition(g, 0), ArgumentError);
}
