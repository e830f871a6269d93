// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shorsim {

// Thrown when materializing a dense state would exceed the configured
// amplitude cap. Carries both sides of the comparison so callers can report
// how much memory the request would have needed.
class MemoryCapError : public std::runtime_error {
 public:
  MemoryCapError(std::size_t required_amplitudes, std::size_t cap)
      : std::runtime_error("dense state requires " +
                           std::to_string(required_amplitudes) +
                           " amplitudes but the cap is " + std::to_string(cap)),
        required_amplitudes_(required_amplitudes),
        cap_(cap) {}

  std::size_t required_amplitudes() const noexcept {
    return required_amplitudes_;
  }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t required_amplitudes_;
  std::size_t cap_;
};

// Thrown on a malformed, unknown, or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shorsim
