#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ntruknap {

// Seedable generator used for every sampled object. Output depends only on
// the seed: the engine is mt19937_64 (standardized output sequence) and
// bounded draws use our own rejection sampling rather than
// std::uniform_int_distribution, whose output differs between libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be positive.
  std::uint64_t uniform(std::uint64_t bound);

  // Fisher-Yates over the whole span.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  // `count` distinct values drawn uniformly from [0, n), ascending.
  std::vector<int> sample_positions(int n, int count);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Sub-seed for stream `counter` under `master`:
//   mix64(master ^ mix64(counter + 0x9e3779b97f4a7c15)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter);

}  // namespace ntruknap
