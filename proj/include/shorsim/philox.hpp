// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

namespace shorsim::noise {

// Philox4x32-10 counter-based generator. Each output block is a pure
// function of (counter, key), so independent noise streams are addressed by
// structured counters instead of sequential draws. The round constants are
// the reference ones; the test suite freezes three known-answer vectors.
using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr void philox_round(PhiloxBlock& c, const PhiloxKey& k) {
  const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * c[0];
  const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * c[2];
  c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0],
       static_cast<std::uint32_t>(p1),
       static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1],
       static_cast<std::uint32_t>(p0)};
}

}  // namespace detail

constexpr PhiloxBlock philox4x32(PhiloxBlock counter, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    detail::philox_round(counter, key);
    key[0] += detail::kPhiloxW0;
    key[1] += detail::kPhiloxW1;
  }
  return counter;
}

// Maps 64 bits to the half-open unit interval (0, 1]. The shift keeps the
// 53 bits a double can hold exactly; the +1 excludes zero so downstream
// logarithms and phase maps never see it.
constexpr double uniform_open_closed(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// One uniform double in (0, 1] addressed by seed and a 4-word counter.
constexpr double uniform_at(std::uint64_t seed, std::uint32_t c0,
                            std::uint32_t c1, std::uint32_t c2,
                            std::uint32_t c3) {
  const PhiloxKey key{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32)};
  const PhiloxBlock out = philox4x32({c0, c1, c2, c3}, key);
  const std::uint64_t bits =
      (std::uint64_t{out[0]} << 32) | std::uint64_t{out[1]};
  return uniform_open_closed(bits);
}

}  // namespace shorsim::noise
