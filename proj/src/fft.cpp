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

#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace sota {
namespace detail {

namespace {

struct PlanPair
{
  fftw_plan forward;
  fftw_plan inverse;
};

// FFTW's planner is not thread-safe; execution through the new-array
// interface is.
PlanPair plans_for(std::size_t n)
{
  static std::mutex mutex;
  static std::map<std::size_t, PlanPair> cache;

  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end())
    return it->second;

  std::vector<double> real(n);
  std::vector<std::complex<double>> spectrum(n / 2 + 1);
  const int size = static_cast<int>(n);
  auto* cplx = reinterpret_cast<fftw_complex*>(spectrum.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair plans{
    fftw_plan_dft_r2c_1d(size, real.data(), cplx, flags),
    fftw_plan_dft_c2r_1d(size, cplx, real.data(), flags)};
  cache.emplace(n, plans);
  return plans;
}

} // namespace

//==============================================================================
RealFft::RealFft(std::size_t n)
  : _n(n)
{
  const PlanPair plans = plans_for(n);
  _forward = plans.forward;
  _inverse = plans.inverse;
}

//==============================================================================
void RealFft::forward(
  std::span<const double> in, std::span<std::complex<double>> out) const
{
  // The r2c transform does not modify its input.
  fftw_execute_dft_r2c(
    static_cast<fftw_plan>(_forward),
    const_cast<double*>(in.data()),
    reinterpret_cast<fftw_complex*>(out.data()));
}

//==============================================================================
void RealFft::inverse(
  std::span<std::complex<double>> in, std::span<double> out) const
{
  fftw_execute_dft_c2r(
    static_cast<fftw_plan>(_inverse),
    reinterpret_cast<fftw_complex*>(in.data()),
    out.data());
}

} // namespace detail
} // namespace sota
