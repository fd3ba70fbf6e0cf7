#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace isowalk {

// Independent stream for trajectory `index`; reproducible under any schedule.
inline std::mt19937_64 trajectory_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq s{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                  static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(s);
}

// 53-bit uniform in [0,1), identical across standard libraries
inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

// Runs body(begin, end) over contiguous chunks of [0, count).
template <class Body>
void parallel_chunks(std::size_t count, int threads, Body&& body) {
  threads = std::max(1, threads);
  if (threads == 1 || count < 2) {
    body(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    std::size_t b = t * chunk, e = std::min(count, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace isowalk
