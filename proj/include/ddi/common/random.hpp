// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>

namespace ddi {

//! SplitMix64 finalizer; used to decorrelate neighbouring integer seeds.
std::uint64_t splitMix64(std::uint64_t x);

//! Combines several integers into one well-mixed seed.
std::uint64_t mixSeed(std::initializer_list<std::uint64_t> parts);

//! Seeded generator with distribution code that does not depend on the
//! standard library implementation, so streams are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitMix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  //! Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  //! Standard normal via Box-Muller.
  double normal();

  //! Uniform integer in [0, n).
  std::size_t below(std::size_t n);

  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ddi
