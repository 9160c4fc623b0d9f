#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace bigjump {

inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : (hw > 16 ? 16 : hw);
}

inline constexpr std::uint64_t kDefaultChunk = 1 << 16;

// Splits [0, n_items) into fixed-size chunks and maps fn over them on a small
// thread pool. Results come back indexed by chunk, so the fold order never
// depends on scheduling or worker count; combined with counter-based draws
// this makes every parallel computation bit-reproducible.
template <class Part, class Fn>
std::vector<Part> map_chunks(std::uint64_t n_items, unsigned workers, Fn fn,
                             std::uint64_t chunk_size = kDefaultChunk) {
  const std::uint64_t n_chunks = n_items == 0 ? 0 : (n_items + chunk_size - 1) / chunk_size;
  std::vector<Part> parts(n_chunks);
  if (n_chunks == 0) return parts;
  workers = resolve_workers(workers);
  if (workers > n_chunks) workers = static_cast<unsigned>(n_chunks);

  std::atomic<std::uint64_t> next{0};
  auto body = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) return;
      const std::uint64_t begin = c * chunk_size;
      const std::uint64_t end = std::min(begin + chunk_size, n_items);
      parts[c] = fn(c, begin, end);
    }
  };

  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  return parts;
}

}  // namespace bigjump
