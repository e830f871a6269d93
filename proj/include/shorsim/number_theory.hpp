// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "shorsim/layout.hpp"
#include "shorsim/state.hpp"

namespace shorsim::shor {

// base^exp mod m by square and multiply. Requires m < 2^31 so intermediate
// products fit in 64 bits.
inline std::int64_t pow_mod(std::int64_t base, std::int64_t exp,
                            std::int64_t m) {
  if (m < 1 || m > (std::int64_t{1} << 31))
    throw std::invalid_argument("modulus out of supported range");
  if (exp < 0) throw std::invalid_argument("negative exponent");
  std::int64_t acc = 1 % m;
  std::int64_t b = ((base % m) + m) % m;
  while (exp > 0) {
    if (exp & 1) acc = (acc * b) % m;
    b = (b * b) % m;
    exp >>= 1;
  }
  return acc;
}

// Smallest r >= 1 with x^r = 1 mod n, by direct iteration.
inline std::int64_t multiplicative_order(std::int64_t x, std::int64_t n) {
  if (n < 2) throw std::invalid_argument("modulus must be at least 2");
  if (std::gcd(x % n, n) != 1)
    throw std::invalid_argument("order undefined for non-coprime base");
  std::int64_t r = 1;
  for (std::int64_t v = ((x % n) + n) % n; v != 1; v = (v * x) % n) ++r;
  return r;
}

// Classical post-processing of one measured register-1 label. `cbar` is the
// bit-reversed (frequency-ordered) label; the estimate is the qualifying
// continued fraction convergent of cbar / 2^l1 with the largest denominator.
struct OrderEstimate {
  enum class Outcome { success, wrong_order, no_convergent };

  Outcome outcome = Outcome::no_convergent;
  std::int64_t cbar = 0;
  std::int64_t numerator = 0;
  std::int64_t denominator = 0;
};

// A convergent p/q qualifies when q < n and |cbar / 2^l1 - p / q| is at most
// 2^-(l1+1); the latter is checked in exact integer arithmetic as
// 2 |cbar q - p 2^l1| <= q. Success means x^q = 1 mod n, which includes
// denominators that are proper divisors' multiples recovered exactly.
inline OrderEstimate order_from_cbar(std::int64_t cbar,
                                     const core::RegisterLayout& layout) {
  if (cbar < 0 || cbar >= layout.r1_dim())
    throw std::out_of_range("measured label outside register 1's range");
  OrderEstimate est;
  est.cbar = cbar;

  // Continued fraction expansion of cbar / 2^l1 with convergents tracked by
  // the standard recurrence.
  std::int64_t num = cbar;
  std::int64_t den = layout.r1_dim();
  std::int64_t p_prev = 1, q_prev = 0;  // convergent -1
  std::int64_t p_cur = 0, q_cur = 1;    // seeded so the first step lands
  bool first = true;
  bool found = false;
  std::int64_t best_p = 0, best_q = 0;
  while (true) {
    const std::int64_t a = num / den;
    const std::int64_t rem = num % den;
    std::int64_t p, q;
    if (first) {
      p = a;
      q = 1;
      p_prev = 1;
      q_prev = 0;
      first = false;
    } else {
      p = a * p_cur + p_prev;
      q = a * q_cur + q_prev;
      p_prev = p_cur;
      q_prev = q_cur;
    }
    p_cur = p;
    q_cur = q;
    if (q < layout.n) {
      const std::int64_t resid = cbar * q - p * layout.r1_dim();
      if (2 * (resid < 0 ? -resid : resid) <= q) {
        best_p = p;
        best_q = q;
        found = true;
      }
    }
    if (rem == 0) break;
    num = den;
    den = rem;
  }

  if (!found) {
    est.outcome = OrderEstimate::Outcome::no_convergent;
    return est;
  }
  est.numerator = best_p;
  est.denominator = best_q;
  est.outcome = pow_mod(layout.x, best_q, layout.n) == 1
                    ? OrderEstimate::Outcome::success
                    : OrderEstimate::Outcome::wrong_order;
  return est;
}

// Same, starting from a raw measured value c in machine bit order.
inline OrderEstimate order_from_measurement(std::int64_t c,
                                            const core::RegisterLayout& layout) {
  return order_from_cbar(core::bit_reverse(c, layout.l1), layout);
}

// All frequency labels whose post-processing recovers exactly the order r.
struct SuccessSet {
  struct Entry {
    std::int64_t cbar = 0;
    std::int64_t numerator = 0;
    std::int64_t denominator = 0;
  };

  std::int64_t r = 0;
  std::vector<Entry> entries;  // ascending in cbar
};

inline SuccessSet success_set(const core::RegisterLayout& layout,
                              std::int64_t r) {
  SuccessSet set;
  set.r = r;
  for (std::int64_t cbar = 0; cbar < layout.r1_dim(); ++cbar) {
    const OrderEstimate est = order_from_cbar(cbar, layout);
    if (est.outcome == OrderEstimate::Outcome::success &&
        est.denominator == r)
      set.entries.push_back({cbar, est.numerator, est.denominator});
  }
  return set;
}

// Probability that measuring register 1 lands in the success set.
template <typename Real>
Real success_probability(const core::PureState<Real>& state,
                         const SuccessSet& set) {
  const auto dist = core::register1_distribution(state);
  Real total{};
  for (const auto& entry : set.entries)
    total += dist[core::bit_reverse(entry.cbar, state.layout.l1)];
  return total;
}

}  // namespace shorsim::shor
