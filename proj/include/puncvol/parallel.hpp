#pragma once

// Deterministic parallel reduction: terms are grouped in fixed-size chunks,
// each chunk is pairwise-summed, then the chunk partials are pairwise-summed.
// The result does not depend on the worker count.

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace puncvol {

/// hardware_concurrency, capped by the PUNCVOL_THREADS environment variable.
inline std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PUNCVOL_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    } catch (...) {
    }
  }
  return n;
}

namespace detail {

template <std::size_t K>
std::array<double, K> pairwise(std::vector<std::array<double, K>>& v) {
  if (v.empty()) return {};
  std::size_t len = v.size();
  while (len > 1) {
    const std::size_t half = (len + 1) / 2;
    for (std::size_t i = 0; i + half < len; ++i)
      for (std::size_t k = 0; k < K; ++k) v[i][k] += v[i + half][k];
    len = half;
  }
  return v[0];
}

}  // namespace detail

template <std::size_t K, class F>
std::array<double, K> parallel_sum(std::size_t count, F&& term) {
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<std::array<double, K>> partial(chunks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    std::vector<std::array<double, K>> buf;
    buf.reserve(kChunk);
    while (true) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        buf.clear();
        const std::size_t end = std::min(count, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) buf.push_back(term(i));
        partial[c] = detail::pairwise(buf);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };

  const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(1, chunks));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return detail::pairwise(partial);
}

}  // namespace puncvol
