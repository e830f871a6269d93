// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace shorsim::core {

// Smallest w with 2^w >= v. Requires v >= 1.
inline int ceil_log2(std::int64_t v) {
  if (v < 1) throw std::invalid_argument("ceil_log2 requires v >= 1");
  int w = 0;
  while ((std::int64_t{1} << w) < v) ++w;
  return w;
}

// Reverses the lowest `width` bits of c. Maps the order in which qubits are
// processed by the final transform onto ascending frequency labels.
inline std::int64_t bit_reverse(std::int64_t c, int width) {
  if (width < 0 || width > 62)
    throw std::out_of_range("bit_reverse width must be in [0, 62]");
  if (c < 0 || c >= (std::int64_t{1} << width))
    throw std::out_of_range("bit_reverse argument " + std::to_string(c) +
                            " does not fit in " + std::to_string(width) +
                            " bits");
  std::int64_t out = 0;
  for (int b = 0; b < width; ++b) {
    out = (out << 1) | ((c >> b) & 1);
  }
  return out;
}

// Qubit layout of the two-register machine. Register 1 holds l1 work qubits
// that accumulate the period signal; register 2 holds l2 qubits carrying the
// modular value. Qubit 1 of a register is its least significant bit, so a
// register value a decomposes as a = sum_l a_l 2^(l-1). A dense basis index
// packs both registers as a + 2^l1 * s with a in register 1 and s in
// register 2. Sites are numbered globally 1..l1 for register 1 and
// l1+1..l1+l2 for register 2.
struct RegisterLayout {
  std::int64_t n = 0;  // odd modulus to factor
  std::int64_t x = 0;  // coprime base, 1 < x < n
  int l1 = 0;
  int l2 = 0;

  int total_qubits() const { return l1 + l2; }
  std::int64_t r1_dim() const { return std::int64_t{1} << l1; }
  std::int64_t r2_dim() const { return std::int64_t{1} << l2; }
  std::int64_t dense_dim() const { return std::int64_t{1} << (l1 + l2); }
  std::int64_t pack(std::int64_t a, std::int64_t s) const {
    return a + (s << l1);
  }

  friend bool operator==(const RegisterLayout&,
                         const RegisterLayout&) = default;
};

namespace detail {

inline void validate_problem(std::int64_t n, std::int64_t x) {
  if (n < 3 || n % 2 == 0)
    throw std::invalid_argument("modulus must be an odd integer >= 3");
  if (x <= 1 || x >= n)
    throw std::invalid_argument("base must satisfy 1 < x < n");
  if (std::gcd(n, x) != 1)
    throw std::invalid_argument("base must be coprime to the modulus");
}

}  // namespace detail

// Explicit register sizes. Register 2 may be smaller than the modulus needs;
// such layouts only support operations whose values stay inside 2^l2.
inline RegisterLayout make_layout(std::int64_t n, std::int64_t x, int l1,
                                  int l2) {
  detail::validate_problem(n, x);
  if (l1 < 1 || l2 < 1)
    throw std::invalid_argument("register sizes must be at least 1 qubit");
  if (l1 + l2 > 62)
    throw std::invalid_argument("layout exceeds 62 total qubits");
  return RegisterLayout{n, x, l1, l2};
}

// Default sizing: register 2 is just wide enough to hold residues mod n and
// register 1 twice that, which makes the label grid fine enough for the
// continued fraction step to recover any order below n.
inline RegisterLayout make_layout(std::int64_t n, std::int64_t x) {
  detail::validate_problem(n, x);
  const int l2 = ceil_log2(n);
  return make_layout(n, x, 2 * l2, l2);
}

}  // namespace shorsim::core
