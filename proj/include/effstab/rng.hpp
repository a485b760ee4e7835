#pragma once

// Reproducible random streams.
//
// Generator: std::mt19937_64, whose output sequence is fixed by the C++
// standard. Doubles are formed from the top 53 bits of one draw, so no
// implementation-defined std distribution is involved and results are
// identical across platforms and standard libraries.
//
// Randomized work is cut into fixed-size chunks. Chunk k draws from its own
// generator seeded with derive_seed(master, k), so the result does not depend
// on how many worker threads process the chunks.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace effstab::rng {

inline constexpr std::size_t kChunkSize = std::size_t{1} << 16;

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master,
                                                  std::uint64_t stream) noexcept {
  return splitmix64(master ^ splitmix64(stream + 1));
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  // Uniform on the open interval (0, 1).
  double uniform_open() {
    double u = 0.0;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

[[nodiscard]] inline std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Runs `body(chunk_index, begin, end, stream)` over [0, n) in kChunkSize
// pieces and returns the per-chunk results in chunk order. `Result` must be
// default-constructible.
template <class Result, class Body>
std::vector<Result> run_chunked(std::size_t n, std::uint64_t master_seed,
                                std::size_t threads, Body body) {
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<Result> results(chunks);
  const auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t k = first; k < chunks; k += stride) {
      Stream stream(derive_seed(master_seed, k));
      const std::size_t begin = k * kChunkSize;
      const std::size_t end = std::min(n, begin + kChunkSize);
      results[k] = body(k, begin, end, stream);
    }
  };
  const std::size_t workers = std::min(resolve_threads(threads),
                                       std::max<std::size_t>(1, chunks));
  if (workers <= 1) {
    work(0, 1);
    return results;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  pool.clear();
  return results;
}

}  // namespace effstab::rng
