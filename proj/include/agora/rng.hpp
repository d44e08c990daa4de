#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace agora {

// splitmix64 finalizer. Used for seed derivation so that nearby inputs map to
// well-separated outputs.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counts raw engine invocations so that generator state can be reproduced by
// replaying the recorded number of draws from the same seed.
class CountingRng {
 public:
  using result_type = std::uint64_t;

  explicit CountingRng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  result_type operator()() {
    ++draws_;
    return engine_();
  }

  std::uint64_t draws() const { return draws_; }

  // Fast-forwards a freshly seeded generator to a recorded draw count.
  void discard_to(std::uint64_t target_draws) {
    if (target_draws < draws_) return;
    engine_.discard(target_draws - draws_);
    draws_ = target_draws;
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

// Unbiased integer in [0, n) via rejection sampling. std::uniform_int_distribution
// is implementation-defined, which would break cross-platform reproducibility.
template <typename Rng>
std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

// Uniform double in [0, 1) with 53 random bits.
template <typename Rng>
double uniform_real01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates partial shuffle: deterministically samples `k` distinct indices
// from [0, n).
template <typename Rng>
std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

template <typename Rng, typename T>
void shuffle_in_place(Rng& rng, std::vector<T>& items) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace agora
