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

#ifndef SOTA__SRC__FFT_HPP
#define SOTA__SRC__FFT_HPP

#include <complex>
#include <cstddef>
#include <span>

namespace sota {
namespace detail {

//==============================================================================
/// Real-to-complex FFT of a fixed size, backed by a process-wide cache of
/// FFTW plans. Instances are cheap handles and may be used from any thread.
class RealFft
{
public:
  explicit RealFft(std::size_t n);

  std::size_t size() const { return _n; }

  /// `in` holds n reals, `out` receives n/2 + 1 coefficients.
  void forward(std::span<const double> in,
    std::span<std::complex<double>> out) const;

  /// Unnormalized inverse. Overwrites `in`.
  void inverse(std::span<std::complex<double>> in, std::span<double> out) const;

private:
  std::size_t _n;
  void* _forward;
  void* _inverse;
};

} // namespace detail
} // namespace sota

#endif // SOTA__SRC__FFT_HPP
