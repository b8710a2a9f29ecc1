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

#ifndef SOTA__TIMESERIES_HPP
#define SOTA__TIMESERIES_HPP

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace sota {

/// Index of a time bin. Bin k covers travel time k * dt.
using Bin = std::int32_t;

inline constexpr Bin kUnboundedHorizon = std::numeric_limits<Bin>::max();

/// Tolerance on the total mass of a distribution.
inline constexpr double kNormTolerance = 1e-9;

//==============================================================================
/// Probability mass function on a uniform time grid.
///
/// Mass is stored densely over bins [0, size()). Mass that fell past a
/// truncation horizon is kept as truncated_tail(), so stored mass plus tail
/// always sums to one. Values are immutable after construction.
class Distribution
{
public:
  /// Throws ValidationError on negative or non-finite mass, a non-positive
  /// dt, or a total (stored + tail) that is not within kNormTolerance of 1.
  Distribution(double dt, std::vector<double> mass, double truncated_tail = 0.0);

  static Distribution point_mass(double dt, Bin bin);

  /// Sparse (bin, probability) pairs. Bins may repeat; their mass adds up.
  static Distribution from_pairs(
    double dt, std::span<const std::pair<Bin, double>> pairs);

  double dt() const { return _dt; }

  /// Number of stored bins.
  Bin size() const { return static_cast<Bin>(_mass.size()); }

  /// First bin with positive mass; size() when all mass is in the tail.
  Bin min_bin() const { return _min_bin; }

  std::span<const double> mass() const { return _mass; }

  double operator[](Bin k) const
  {
    return (k >= 0 && k < size()) ? _mass[static_cast<std::size_t>(k)] : 0.0;
  }

  double truncated_tail() const { return _tail; }
  bool truncated() const { return _tail > 0.0; }

  /// Sum of the stored mass, excluding the tail.
  double stored_mass() const { return _stored; }

  /// Expected bin over the stored mass, renormalized.
  double mean_bins() const;

private:
  double _dt;
  std::vector<double> _mass;
  double _tail;
  double _stored = 0.0;
  Bin _min_bin = 0;
};

//==============================================================================
/// Direct convolution. Bins at or beyond `cap` go into the truncated tail.
/// Throws ConfigError on mismatched dt and ArgumentError when cap < 1.
Distribution convolve(const Distribution& a, const Distribution& b, Bin cap);

/// P(travel time <= t * dt) over the stored mass.
double cdf(const Distribution& d, Bin t);

/// Smallest bin t with cdf(d, t) >= p. Cumulative sums are compared with a
/// 1e-12 slack so that exact decimal percentiles land on their bin.
/// Throws ArgumentError when p is outside [0, 1] or lies in the truncated
/// tail.
Bin percentile(const Distribution& d, double p);

/// sum_{t=0..T} q[t] * u[T - t]. Throws ArgumentError unless u covers 0..T.
double shifted_dot(const Distribution& q, std::span<const double> u, Bin T);

//==============================================================================
struct ZdcConfig
{
  /// Kernel blocks shorter than this are multiplied directly, longer ones
  /// through an FFT.
  Bin crossover = 32;
};

/// Streaming convolution of an input sequence with a fixed kernel.
///
/// Inputs are fed one bin at a time, starting at bin 0. Output bin t is
/// available as soon as every input up to t - kernel.min_bin() is known.
/// The kernel is cut into power-of-two blocks [2^k, 2^(k+1)) (relative to
/// its first support bin); block k is applied once every 2^k inputs, so the
/// amortized cost per input is O(log^2 n).
class ZdcConvolver
{
public:
  /// Outputs past `horizon` are never computed.
  explicit ZdcConvolver(
    const Distribution& kernel,
    Bin horizon = kUnboundedHorizon,
    ZdcConfig config = {});

  /// Throws UsageError unless t == fed().
  void feed(Bin t, double value);

  /// Throws UsageError when inputs up to t - min_bin() have not been fed,
  /// ArgumentError when t exceeds the horizon.
  double read(Bin t) const;

  Bin fed() const { return static_cast<Bin>(_input.size()); }
  Bin min_bin() const { return _shift; }

private:
  struct Segment
  {
    Bin offset;    // first kernel bin (relative to _shift) in this block
    Bin length;    // nominal block size, a power of two equal to offset
    std::vector<double> taps;
    std::vector<std::complex<double>> spectrum;  // only when using the FFT
  };

  void apply(const Segment& segment, Bin last_input);

  Bin _shift;
  Bin _horizon;  // in shifted coordinates
  double _head;  // kernel mass at _shift
  ZdcConfig _config;
  std::vector<Segment> _segments;
  std::vector<double> _input;
  std::vector<double> _acc;
  std::vector<double> _scratch;
  std::vector<std::complex<double>> _scratch_spectrum;
};

} // namespace sota

#endif // SOTA__TIMESERIES_HPP
