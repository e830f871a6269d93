// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace shorsim {

// Runs fn(i) for every i in [0, count) across at most max_threads workers
// (0 picks the hardware count). Indices are dealt to workers in fixed
// contiguous blocks and each call writes only into its own i-indexed slot,
// so results never depend on the worker count or interleaving. The first
// exception thrown by any call is rethrown after all workers join.
template <typename Fn>
void parallel_for_index(std::int64_t count, Fn&& fn,
                        unsigned max_threads = 0) {
  if (count <= 0) return;
  unsigned workers = max_threads ? max_threads
                                 : std::thread::hardware_concurrency();
  if (workers < 1) workers = 1;
  if (static_cast<std::int64_t>(workers) > count)
    workers = static_cast<unsigned>(count);

  if (workers == 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::mutex error_lock;
  std::exception_ptr first_error;
  auto run_block = [&](std::int64_t begin, std::int64_t end) {
    try {
      for (std::int64_t i = begin; i < end; ++i) fn(i);
    } catch (...) {
      const std::lock_guard<std::mutex> hold(error_lock);
      if (!first_error) first_error = std::current_exception();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::int64_t per = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::int64_t begin = per * w;
    const std::int64_t end = std::min<std::int64_t>(begin + per, count);
    if (begin >= end) break;
    pool.emplace_back(run_block, begin, end);
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace shorsim
