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

#include <sota/timeseries.hpp>

#include <sota/error.hpp>

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sota {

namespace {

constexpr double kPercentileSlack = 1e-12;

bool same_dt(double a, double b)
{
  return std::abs(a - b) <= kNormTolerance * std::max(std::abs(a), std::abs(b));
}

} // namespace

//==============================================================================
Distribution::Distribution(double dt, std::vector<double> mass, double tail)
  : _dt(dt),
    _mass(std::move(mass)),
    _tail(tail)
{
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ValidationError("distribution dt must be positive and finite");

  if (!(tail >= 0.0) || !std::isfinite(tail))
    throw ValidationError("truncated tail mass must be non-negative");

  _min_bin = size();
  for (std::size_t k = 0; k < _mass.size(); ++k)
  {
    const double m = _mass[k];
    if (!(m >= 0.0) || !std::isfinite(m))
    {
      std::ostringstream msg;
      msg << "negative or non-finite probability " << m << " at bin " << k;
      throw ValidationError(msg.str());
    }

    if (m > 0.0 && _min_bin == size())
      _min_bin = static_cast<Bin>(k);

    _stored += m;
  }

  if (std::abs(_stored + _tail - 1.0) > kNormTolerance)
  {
    std::ostringstream msg;
    msg.precision(17);
    msg << "distribution mass sums to " << _stored + _tail
        << " (stored " << _stored << ", truncated " << _tail << ")";
    throw ValidationError(msg.str());
  }
}

//==============================================================================
Distribution Distribution::point_mass(double dt, Bin bin)
{
  if (bin < 0)
    throw ArgumentError("point mass bin must be non-negative");

  std::vector<double> mass(static_cast<std::size_t>(bin) + 1, 0.0);
  mass.back() = 1.0;
  return Distribution(dt, std::move(mass));
}

//==============================================================================
Distribution Distribution::from_pairs(
  double dt, std::span<const std::pair<Bin, double>> pairs)
{
  Bin last = -1;
  for (const auto& [bin, p] : pairs)
  {
    if (bin < 0)
      throw ValidationError("pmf bins must be non-negative");
    last = std::max(last, bin);
  }

  std::vector<double> mass(static_cast<std::size_t>(last + 1), 0.0);
  for (const auto& [bin, p] : pairs)
    mass[static_cast<std::size_t>(bin)] += p;

  return Distribution(dt, std::move(mass));
}

//==============================================================================
double Distribution::mean_bins() const
{
  if (_stored <= 0.0)
    return std::numeric_limits<double>::infinity();

  double sum = 0.0;
  for (Bin k = _min_bin; k < size(); ++k)
    sum += static_cast<double>(k) * _mass[static_cast<std::size_t>(k)];
  return sum / _stored;
}

//==============================================================================
Distribution convolve(const Distribution& a, const Distribution& b, Bin cap)
{
  if (!same_dt(a.dt(), b.dt()))
  {
    std::ostringstream msg;
    msg << "cannot convolve distributions with dt " << a.dt() << " and "
        << b.dt();
    throw ConfigError(msg.str());
  }

  if (cap < 1)
    throw ArgumentError("convolution cap must be at least one bin");

  const Bin full = a.size() + b.size() - 1;
  const Bin length = std::max<Bin>(0, std::min(cap, full));
  std::vector<double> out(static_cast<std::size_t>(length), 0.0);

  // suffix[j] = sum of b's mass at bins >= j
  const auto bm = b.mass();
  std::vector<double> suffix(bm.size() + 1, 0.0);
  for (std::size_t j = bm.size(); j-- > 0;)
    suffix[j] = suffix[j + 1] + bm[j];

  double beyond = 0.0;
  const auto am = a.mass();
  for (Bin i = a.min_bin(); i < a.size(); ++i)
  {
    const double ai = am[static_cast<std::size_t>(i)];
    if (ai == 0.0)
      continue;

    const Bin j_end = std::min(b.size(), length - i);
    for (Bin j = b.min_bin(); j < j_end; ++j)
      out[static_cast<std::size_t>(i + j)] += ai * bm[static_cast<std::size_t>(j)];

    const Bin j_cut = std::max(b.min_bin(), std::max<Bin>(0, j_end));
    if (j_cut < b.size())
      beyond += ai * suffix[static_cast<std::size_t>(j_cut)];
  }

  const double tail = beyond
    + a.truncated_tail() * (b.stored_mass() + b.truncated_tail())
    + a.stored_mass() * b.truncated_tail();

  return Distribution(a.dt(), std::move(out), tail);
}

//==============================================================================
double cdf(const Distribution& d, Bin t)
{
  if (t < d.min_bin())
    return 0.0;

  const auto m = d.mass();
  const Bin end = std::min(t + 1, d.size());
  double sum = 0.0;
  for (Bin k = d.min_bin(); k < end; ++k)
    sum += m[static_cast<std::size_t>(k)];
  return sum;
}

//==============================================================================
Bin percentile(const Distribution& d, double p)
{
  if (!(p >= 0.0 && p <= 1.0))
    throw ArgumentError("percentile fraction must lie in [0, 1]");

  if (p <= kPercentileSlack)
    return 0;

  const auto m = d.mass();
  double sum = 0.0;
  for (Bin k = 0; k < d.size(); ++k)
  {
    sum += m[static_cast<std::size_t>(k)];
    if (sum >= p - kPercentileSlack)
      return k;
  }

  throw ArgumentError("requested percentile lies in the truncated tail");
}

//==============================================================================
double shifted_dot(const Distribution& q, std::span<const double> u, Bin T)
{
  if (T < 0 || static_cast<std::size_t>(T) >= u.size())
  {
    std::ostringstream msg;
    msg << "budget " << T << " outside reliability array of length "
        << u.size();
    throw ArgumentError(msg.str());
  }

  const auto m = q.mass();
  const Bin end = std::min(T + 1, q.size());
  double sum = 0.0;
  for (Bin t = q.min_bin(); t < end; ++t)
    sum += m[static_cast<std::size_t>(t)] * u[static_cast<std::size_t>(T - t)];
  return sum;
}

//==============================================================================
ZdcConvolver::ZdcConvolver(
  const Distribution& kernel, Bin horizon, ZdcConfig config)
  : _shift(kernel.min_bin()),
    _horizon(kUnboundedHorizon),
    _head(0.0),
    _config(config)
{
  if (horizon < 0)
    throw ArgumentError("convolver horizon must be non-negative");

  if (config.crossover < 1)
    throw ConfigError("zdc crossover must be at least one bin");

  if (horizon != kUnboundedHorizon)
    _horizon = horizon - _shift;

  const auto m = kernel.mass();
  Bin length = kernel.size() - _shift;
  if (_horizon != kUnboundedHorizon)
    length = std::min(length, std::max<Bin>(0, _horizon + 1));

  if (length <= 0)
    return;

  const auto tap = [&](Bin k) { return m[static_cast<std::size_t>(_shift + k)]; };
  _head = tap(0);

  for (Bin offset = 1; offset < length; offset *= 2)
  {
    Segment segment{offset, offset, {}, {}};
    const Bin end = std::min(length, 2 * offset);
    bool any = false;
    for (Bin k = offset; k < end; ++k)
    {
      segment.taps.push_back(tap(k));
      any = any || tap(k) != 0.0;
    }

    if (!any)
      continue;

    if (offset >= _config.crossover)
    {
      const std::size_t n = 2 * static_cast<std::size_t>(offset);
      std::vector<double> padded(n, 0.0);
      std::copy(segment.taps.begin(), segment.taps.end(), padded.begin());
      segment.spectrum.resize(n / 2 + 1);
      detail::RealFft(n).forward(padded, segment.spectrum);
    }

    _segments.push_back(std::move(segment));
  }
}

//==============================================================================
void ZdcConvolver::feed(Bin t, double value)
{
  if (t != fed())
  {
    std::ostringstream msg;
    msg << "zdc feed out of order: got bin " << t << ", expected " << fed();
    throw UsageError(msg.str());
  }

  _input.push_back(value);
  for (const Segment& segment : _segments)
  {
    if ((t + 1) % segment.length == 0)
      apply(segment, t);
  }
}

//==============================================================================
void ZdcConvolver::apply(const Segment& segment, Bin last_input)
{
  // The block of inputs ending at last_input meets kernel taps starting at
  // segment.offset == segment.length, so its earliest output is
  // last_input + 1 and no output that could already have been read changes.
  const Bin first_out = last_input + 1;
  if (first_out > _horizon)
    return;

  const Bin block = segment.length;
  const Bin start = last_input + 1 - block;
  const auto input = std::span<const double>(_input).subspan(
    static_cast<std::size_t>(start), static_cast<std::size_t>(block));

  if (std::all_of(input.begin(), input.end(), [](double v) { return v == 0.0; }))
    return;

  const Bin taps = static_cast<Bin>(segment.taps.size());
  Bin out_len = block + taps - 1;
  if (_horizon != kUnboundedHorizon)
    out_len = std::min(out_len, _horizon - first_out + 1);

  const std::size_t needed = static_cast<std::size_t>(first_out + out_len);
  if (_acc.size() < needed)
    _acc.resize(_horizon != kUnboundedHorizon
        ? static_cast<std::size_t>(_horizon) + 1
        : std::max(needed, 2 * _acc.size()),
      0.0);

  double* out = _acc.data() + first_out;

  if (segment.spectrum.empty())
  {
    for (Bin i = 0; i < block; ++i)
    {
      const double x = input[static_cast<std::size_t>(i)];
      if (x == 0.0)
        continue;
      const Bin j_end = std::min(taps, out_len - i);
      for (Bin j = 0; j < j_end; ++j)
        out[i + j] += x * segment.taps[static_cast<std::size_t>(j)];
    }
    return;
  }

  const std::size_t n = 2 * static_cast<std::size_t>(block);
  _scratch.assign(n, 0.0);
  std::copy(input.begin(), input.end(), _scratch.begin());
  _scratch_spectrum.resize(n / 2 + 1);

  const detail::RealFft fft(n);
  fft.forward(_scratch, _scratch_spectrum);
  for (std::size_t k = 0; k < _scratch_spectrum.size(); ++k)
    _scratch_spectrum[k] *= segment.spectrum[k];
  fft.inverse(_scratch_spectrum, _scratch);

  const double scale = 1.0 / static_cast<double>(n);
  for (Bin k = 0; k < out_len; ++k)
    out[k] += _scratch[static_cast<std::size_t>(k)] * scale;
}

//==============================================================================
double ZdcConvolver::read(Bin t) const
{
  if (t < 0)
    return 0.0;

  const Bin z = t - _shift;
  if (_horizon != kUnboundedHorizon && z > _horizon)
  {
    std::ostringstream msg;
    msg << "zdc read at bin " << t << " beyond horizon";
    throw ArgumentError(msg.str());
  }

  if (z < 0)
    return 0.0;

  if (z >= fed())
  {
    std::ostringstream msg;
    msg << "zdc read at bin " << t << " needs input up to bin " << z
        << " but only " << fed() << " fed";
    throw UsageError(msg.str());
  }

  const auto zi = static_cast<std::size_t>(z);
  const double acc = zi < _acc.size() ? _acc[zi] : 0.0;
  return acc + _head * _input[zi];
}

} // namespace sota
