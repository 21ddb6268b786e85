/*
 * Copyright (c) 2026, The gsync Authors.
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
 */

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <type_traits>

namespace gsync {

/// Purpose tags that separate the random streams of one seed.
enum class StreamTag : std::uint64_t {
  Truth = 1,
  EdgeObserved = 2,
  EdgeClean = 3,
  EdgeOutlier = 4,
  EdgeNoise = 5,
  SolverStart = 6,
  Sampling = 7,
  Generic = 8,
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/**
 * Counter-based random stream keyed by (seed, tag, i, j).
 *
 * The k-th output is a pure function of the key and k, so streams for
 * different edges can be drawn in any order or on any thread and give the
 * same values. Satisfies UniformRandomBitGenerator.
 */
class KeyedStream {
 public:
  using result_type = std::uint64_t;

  explicit KeyedStream(std::uint64_t seed, StreamTag tag = StreamTag::Generic,
                       std::uint64_t i = 0, std::uint64_t j = 0) noexcept {
    std::uint64_t h = detail::splitmix64(seed);
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(tag));
    h = detail::splitmix64(h ^ (i * 0xd1342543de82ef95ULL));
    h = detail::splitmix64(h ^ (j * 0xa0761d6478bd642fULL));
    key_ = h;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    return detail::splitmix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; no cached state, one draw per call.
  double normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925 * u2);
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// Unit-second-moment Gaussian in the scalar field: N(0,1) for real,
/// X + iY with X, Y ~ N(0, 1/2) for complex.
template <typename Scalar>
Scalar standard_gaussian(KeyedStream& rng) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return rng.normal();
  } else {
    const double s = std::sqrt(0.5);
    const double re = rng.normal();
    const double im = rng.normal();
    return Scalar(s * re, s * im);
  }
}

}  // namespace gsync
