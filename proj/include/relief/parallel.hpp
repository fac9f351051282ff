#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace relief {

/// Runs fn(block) for every block in [0, blocks) on up to `workers` threads.
/// Blocks are a fixed partition chosen by the caller, so any reduction the
/// caller performs over per-block results in block order is independent of
/// the worker count.
template <class Fn>
void for_each_block(std::size_t blocks, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, blocks));
  if (workers == 1) {
    for (std::size_t b = 0; b < blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) {
        try {
          fn(b);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

constexpr std::size_t block_count(std::size_t items, std::size_t block_size) noexcept {
  return (items + block_size - 1) / block_size;
}

}  // namespace relief
