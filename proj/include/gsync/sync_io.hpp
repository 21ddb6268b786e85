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

// Debug dump of an instance as a flat binary container:
//
//   "SYNC1"                     5 bytes magic
//   n, d                        uint64 little-endian
//   field                       uint8, 0 = real, 1 = complex
//   Y                           (nd)^2 row-major little-endian doubles
//                               (complex: real part then imaginary part)
//   observed mask, corrupted    n*n uint8 each, row-major, symmetric

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "gsync/errors.hpp"
#include "gsync/instance.hpp"

namespace gsync {

inline constexpr std::array<char, 5> kSyncMagic = {'S', 'Y', 'N', 'C', '1'};

/// Contents of a SYNC1 file; Y is stored as complex regardless of field.
struct SyncDump {
  std::uint64_t n = 0;
  std::uint64_t d = 0;
  Field field = Field::Real;
  Mat<cplx> Y;
  std::vector<std::uint8_t> observed;
  std::vector<std::uint8_t> corrupted;
};

namespace detail {

template <typename T>
void put_le(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  os.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  std::array<char, sizeof(T)> bytes;
  if (!is.read(bytes.data(), sizeof(T))) throw InvalidArgument("SYNC1: truncated file");
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace detail

template <typename Scalar>
void write_sync_dump(const SyncInstance<Scalar>& inst, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  const auto n = static_cast<std::uint64_t>(inst.n());
  const auto d = static_cast<std::uint64_t>(inst.d());
  os.write(kSyncMagic.data(), kSyncMagic.size());
  detail::put_le(os, n);
  detail::put_le(os, d);
  detail::put_le(os, static_cast<std::uint8_t>(is_complex_v<Scalar> ? 1 : 0));
  for (Eigen::Index r = 0; r < inst.Y.rows(); ++r) {
    for (Eigen::Index c = 0; c < inst.Y.cols(); ++c) {
      const Scalar v = inst.Y(r, c);
      detail::put_le(os, std::real(v));
      if constexpr (is_complex_v<Scalar>) detail::put_le(os, std::imag(v));
    }
  }
  std::vector<std::uint8_t> observed(n * n, 0), corrupted(n * n, 0);
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    const auto [i, j] = inst.edges[e];
    observed[i * n + j] = observed[j * n + i] = 1;
    if (inst.corrupted[e]) corrupted[i * n + j] = corrupted[j * n + i] = 1;
  }
  os.write(reinterpret_cast<const char*>(observed.data()),
           static_cast<std::streamsize>(observed.size()));
  os.write(reinterpret_cast<const char*>(corrupted.data()),
           static_cast<std::streamsize>(corrupted.size()));
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

inline SyncDump read_sync_dump(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  std::array<char, 5> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kSyncMagic) {
    throw InvalidArgument("'" + path + "' is not a SYNC1 file");
  }
  SyncDump dump;
  dump.n = detail::get_le<std::uint64_t>(is);
  dump.d = detail::get_le<std::uint64_t>(is);
  const auto tag = detail::get_le<std::uint8_t>(is);
  if (tag > 1) throw InvalidArgument("SYNC1: bad field tag");
  dump.field = tag == 1 ? Field::Complex : Field::Real;
  const auto m = static_cast<Eigen::Index>(dump.n * dump.d);
  dump.Y.resize(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) {
      const double re = detail::get_le<double>(is);
      const double im = tag == 1 ? detail::get_le<double>(is) : 0.0;
      dump.Y(r, c) = cplx(re, im);
    }
  }
  dump.observed.resize(dump.n * dump.n);
  dump.corrupted.resize(dump.n * dump.n);
  is.read(reinterpret_cast<char*>(dump.observed.data()),
          static_cast<std::streamsize>(dump.observed.size()));
  is.read(reinterpret_cast<char*>(dump.corrupted.data()),
          static_cast<std::streamsize>(dump.corrupted.size()));
  if (!is) throw InvalidArgument("SYNC1: truncated mask section");
  return dump;
}

}  // namespace gsync
