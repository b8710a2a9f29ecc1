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

#include <sota/potentials.hpp>

#include <sota/error.hpp>

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace sota {

using json = nlohmann::json;

namespace {

json bin_to_json(Bin b)
{
  return b == kInfinitePotential ? json("inf") : json(b);
}

Bin bin_from_json(const json& j)
{
  if (j.is_string() && j.get<std::string>() == "inf")
    return kInfinitePotential;
  return j.get<Bin>();
}

} // namespace

//==============================================================================
std::string to_string(PotentialMode mode)
{
  return mode == PotentialMode::policy ? "policy" : "path";
}

//==============================================================================
PotentialMode potential_mode_from_string(const std::string& name)
{
  if (name == "policy")
    return PotentialMode::policy;
  if (name == "path")
    return PotentialMode::path;
  throw ArgumentError("unknown potential mode '" + name + "'");
}

//==============================================================================
PotentialTable::PotentialTable(
  PotentialMode mode,
  int dest_region,
  std::optional<int> source_region,
  Bin horizon,
  int k_intervals,
  std::vector<std::vector<ActivityInterval>> intervals,
  std::vector<Bin> next_activation)
  : _mode(mode),
    _dest_region(dest_region),
    _source_region(source_region),
    _horizon(horizon),
    _k(k_intervals),
    _intervals(std::move(intervals)),
    _next(std::move(next_activation))
{
  if (k_intervals < 1)
    throw ArgumentError("potential tables need k_intervals >= 1");
  if (_intervals.size() != _next.size())
    throw ArgumentError("interval and next-activation arrays differ in length");

  for (std::size_t e = 0; e < _intervals.size(); ++e)
  {
    const auto& list = _intervals[e];
    if (list.size() > static_cast<std::size_t>(_k))
      throw ArgumentError("more activity intervals than k_intervals");

    Bin prev_hi = -2;
    for (const auto& iv : list)
    {
      if (iv.lo > iv.hi || iv.lo <= prev_hi + 1 || iv.hi > horizon)
        throw ArgumentError("activity intervals must be disjoint, sorted and within the horizon");
      prev_hi = iv.hi;
    }
    if (_next[e] != kInfinitePotential && _next[e] <= prev_hi + 1)
      throw ArgumentError("next activation must follow the stored intervals");
  }
}

//==============================================================================
PotentialTable PotentialTable::from_activity(
  PotentialMode mode,
  int dest_region,
  std::optional<int> source_region,
  Bin horizon,
  int k_intervals,
  const std::vector<std::vector<bool>>& activity)
{
  std::vector<std::vector<ActivityInterval>> intervals(activity.size());
  std::vector<Bin> next(activity.size(), kInfinitePotential);

  for (std::size_t e = 0; e < activity.size(); ++e)
  {
    const auto& bits = activity[e];
    const Bin n = std::min<Bin>(static_cast<Bin>(bits.size()), horizon + 1);
    Bin t = 0;
    while (t < n)
    {
      if (!bits[static_cast<std::size_t>(t)])
      {
        ++t;
        continue;
      }

      if (static_cast<int>(intervals[e].size()) == k_intervals)
      {
        next[e] = t;
        break;
      }

      const Bin lo = t;
      while (t < n && bits[static_cast<std::size_t>(t)])
        ++t;
      intervals[e].push_back({lo, t - 1});
    }
  }

  return PotentialTable(mode, dest_region, source_region, horizon, k_intervals,
    std::move(intervals), std::move(next));
}

//==============================================================================
Bin PotentialTable::potential(EdgeIndex e) const
{
  const auto& list = intervals(e);
  return list.empty() ? next_activation(e) : list.front().lo;
}

//==============================================================================
bool PotentialTable::active_at(EdgeIndex e, Bin t) const
{
  if (t >= next_activation(e))
    return true;
  for (const auto& iv : intervals(e))
  {
    if (t < iv.lo)
      return false;
    if (t <= iv.hi)
      return true;
  }
  return false;
}

//==============================================================================
bool PotentialTable::active_up_to(EdgeIndex e, Bin t) const
{
  return potential(e) <= t;
}

//==============================================================================
EdgeMask prune(const StochasticGraph& g, const PotentialTable& table, Bin budget)
{
  if (table.edge_count() != g.edge_count())
    throw ArgumentError("potential table was built for a different graph");

  if (budget < 0 || budget > table.horizon())
  {
    std::ostringstream msg;
    msg << "budget " << budget << " outside potential table horizon "
        << table.horizon();
    throw ArgumentError(msg.str());
  }

  EdgeMask keep(static_cast<std::size_t>(g.edge_count()));
  for (EdgeIndex e = 0; e < g.edge_count(); ++e)
  {
    keep[static_cast<std::size_t>(e)] = table.mode() == PotentialMode::policy
      ? table.active_up_to(e, budget)
      : table.active_at(e, budget);
  }
  return keep;
}

//==============================================================================
const PotentialTable* PotentialSet::find(int dest_region, int source_region) const
{
  const PotentialTable* fallback = nullptr;
  for (const auto& table : tables)
  {
    if (table.dest_region() != dest_region)
      continue;
    if (table.source_region() == source_region)
      return &table;
    if (!table.source_region())
      fallback = &table;
  }
  return fallback;
}

//==============================================================================
void save_potentials(const PotentialSet& set, std::ostream& out)
{
  json tables = json::array();
  for (const auto& table : set.tables)
  {
    json phi = json::array();
    json intervals = json::array();
    json next = json::array();
    for (EdgeIndex e = 0; e < table.edge_count(); ++e)
    {
      phi.push_back(bin_to_json(table.potential(e)));
      json list = json::array();
      for (const auto& iv : table.intervals(e))
        list.push_back(json::array({iv.lo, iv.hi}));
      intervals.push_back(std::move(list));
      next.push_back(bin_to_json(table.next_activation(e)));
    }

    tables.push_back({
      {"dest_region", table.dest_region()},
      {"source_region", table.source_region() ? json(*table.source_region()) : json(nullptr)},
      {"phi", std::move(phi)},
      {"intervals", std::move(intervals)},
      {"next", std::move(next)},
    });
  }

  const json doc{
    {"format", "sota-potentials"},
    {"version", kPotentialFormatVersion},
    {"grid_k", set.grid_k},
    {"region_count", set.region_count},
    {"horizon", set.horizon},
    {"dt", set.dt},
    {"mode", to_string(set.mode)},
    {"k", set.k_intervals},
    {"regions", set.region_of},
    {"tables", std::move(tables)},
  };
  out << doc.dump() << '\n';
}

//==============================================================================
PotentialSet load_potentials(std::istream& in)
{
  json doc;
  try
  {
    doc = json::parse(in);
  }
  catch (const json::parse_error& e)
  {
    throw ParseError(std::string("potential file is not valid JSON: ") + e.what());
  }

  try
  {
    if (doc.at("format").get<std::string>() != "sota-potentials")
      throw ParseError("not a potential table file");
    if (doc.at("version").get<int>() != kPotentialFormatVersion)
      throw ParseError("unsupported potential table version");

    PotentialSet set;
    set.grid_k = doc.at("grid_k").get<int>();
    set.region_count = doc.at("region_count").get<int>();
    set.horizon = doc.at("horizon").get<Bin>();
    set.dt = doc.at("dt").get<double>();
    set.mode = potential_mode_from_string(doc.at("mode").get<std::string>());
    set.k_intervals = doc.at("k").get<int>();
    set.region_of = doc.at("regions").get<std::vector<int>>();

    for (const auto& t : doc.at("tables"))
    {
      std::vector<std::vector<ActivityInterval>> intervals;
      for (const auto& list : t.at("intervals"))
      {
        auto& dst = intervals.emplace_back();
        for (const auto& iv : list)
          dst.push_back({iv.at(0).get<Bin>(), iv.at(1).get<Bin>()});
      }

      std::vector<Bin> next;
      for (const auto& b : t.at("next"))
        next.push_back(bin_from_json(b));

      std::optional<int> source;
      if (!t.at("source_region").is_null())
        source = t.at("source_region").get<int>();

      set.tables.emplace_back(set.mode, t.at("dest_region").get<int>(), source,
        set.horizon, set.k_intervals, std::move(intervals), std::move(next));
    }
    return set;
  }
  catch (const json::exception& e)
  {
    throw ParseError(std::string("malformed potential file: ") + e.what());
  }
  catch (const ArgumentError& e)
  {
    throw ParseError(std::string("inconsistent potential file: ") + e.what());
  }
}

} // namespace sota
