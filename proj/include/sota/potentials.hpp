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

#ifndef SOTA__POTENTIALS_HPP
#define SOTA__POTENTIALS_HPP

#include <sota/network.hpp>

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace sota {

/// Potential of an edge that is never active up to the table horizon.
inline constexpr Bin kInfinitePotential = std::numeric_limits<Bin>::max();

enum class PotentialMode
{
  /// Edge activity in optimal policies toward the destination region. Time
  /// is the remaining budget at the edge's tail.
  policy,
  /// Membership in optimal paths into the destination region. Time is the
  /// query budget at the source.
  path,
};

std::string to_string(PotentialMode mode);
PotentialMode potential_mode_from_string(const std::string& name);

struct ActivityInterval
{
  Bin lo;
  Bin hi;

  bool operator==(const ActivityInterval&) const = default;
};

//==============================================================================
/// Arc activation potentials for one destination region.
///
/// Each edge stores up to k lowermost activity intervals and a lower bound on
/// its next activation after them (kInfinitePotential when there is none up
/// to the horizon). The scalar potential is the start of the first interval.
class PotentialTable
{
public:
  PotentialTable(
    PotentialMode mode,
    int dest_region,
    std::optional<int> source_region,
    Bin horizon,
    int k_intervals,
    std::vector<std::vector<ActivityInterval>> intervals,
    std::vector<Bin> next_activation);

  /// Builds the table from a per-edge activity set over 0..horizon.
  static PotentialTable from_activity(
    PotentialMode mode,
    int dest_region,
    std::optional<int> source_region,
    Bin horizon,
    int k_intervals,
    const std::vector<std::vector<bool>>& activity);

  PotentialMode mode() const { return _mode; }
  int dest_region() const { return _dest_region; }
  const std::optional<int>& source_region() const { return _source_region; }
  Bin horizon() const { return _horizon; }
  int k_intervals() const { return _k; }
  EdgeIndex edge_count() const { return static_cast<EdgeIndex>(_intervals.size()); }

  Bin potential(EdgeIndex e) const;
  const std::vector<ActivityInterval>& intervals(EdgeIndex e) const
  {
    return _intervals[static_cast<std::size_t>(e)];
  }
  Bin next_activation(EdgeIndex e) const
  {
    return _next[static_cast<std::size_t>(e)];
  }

  /// True when t is inside a stored interval or at/after the next
  /// activation bound.
  bool active_at(EdgeIndex e, Bin t) const;

  /// True when the edge may be active anywhere in [0, t].
  bool active_up_to(EdgeIndex e, Bin t) const;

private:
  PotentialMode _mode;
  int _dest_region;
  std::optional<int> _source_region;
  Bin _horizon;
  int _k;
  std::vector<std::vector<ActivityInterval>> _intervals;
  std::vector<Bin> _next;
};

/// Edge mask for a query with the given budget. Policy tables keep an edge
/// when it may be active at any remaining budget up to `budget`; path tables
/// keep it when it may lie on an optimal path for exactly this budget.
/// Throws ArgumentError when the budget exceeds the table horizon or the
/// table was built for a different edge count.
EdgeMask prune(const StochasticGraph& g, const PotentialTable& table, Bin budget);

//==============================================================================
/// All tables produced by one preprocessing run, plus the partition they
/// refer to.
struct PotentialSet
{
  int grid_k = 0;
  std::vector<int> region_of;
  int region_count = 0;
  Bin horizon = 0;
  double dt = 1.0;
  PotentialMode mode = PotentialMode::policy;
  int k_intervals = 1;
  std::vector<PotentialTable> tables;

  /// Table for a query into `dest_region` from `source_region`; source-free
  /// tables match any source.
  const PotentialTable* find(int dest_region, int source_region) const;
};

inline constexpr int kPotentialFormatVersion = 1;

void save_potentials(const PotentialSet& set, std::ostream& out);
PotentialSet load_potentials(std::istream& in);

} // namespace sota

#endif // SOTA__POTENTIALS_HPP
