#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace taxaug {

/// SplitMix64. Used only to expand a 64-bit seed into generator state and to
/// derive child seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

/// xoshiro256** seeded through SplitMix64. The exact update rule is written
/// down in docs/rng.md so fold plans and SMOTE draws are portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform double in [0, 1): top 53 bits of next() times 2^-53.
  double uniform01();

  /// Unbiased integer in [0, n), n >= 1, by rejection of the low remainder.
  std::uint64_t below(std::uint64_t n);

  /// Fisher-Yates, walking from the last index down.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t s_[4];
};

/// Mixes a base seed with a list of integers (repeat, fold, class, ...) into
/// an independent child seed.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> parts);

}  // namespace taxaug
