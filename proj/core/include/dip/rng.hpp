#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace dip {

// Seeded random source with pinned output derivations.
//
// mt19937_64 is fully specified by the standard, but the standard
// distributions are not, so the conversions below are spelled out here:
//   - unit doubles take the top 53 bits of one engine draw,
//   - bounded integers use rejection sampling on the raw draw,
//   - normals use the Marsaglia polar method.
// Given the same seed, the streams are identical across standard libraries
// (normals may differ in the last ulp where libm's log differs).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer on [0, n), n >= 1.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw = next_u64();
    while (draw >= limit) draw = next_u64();
    return draw % n;
  }

  // Standard normal, Marsaglia polar method.
  double next_normal();

  // Fisher-Yates, back to front.
  template <class T>
  void shuffle(std::vector<T>& values) {
    if (values.empty()) return;
    for (std::size_t i = values.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i + 1));
      std::swap(values[i], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// 0..n-1 shuffled under the given seed.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

// Derives a per-purpose stream from a user seed (splitmix64 finalizer), so
// that e.g. data sampling and split shuffling never consume the same
// underlying sequence even when the caller reuses one seed everywhere.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Stream tags used by the library.
inline constexpr std::uint64_t kStreamHoldout = 1;
inline constexpr std::uint64_t kStreamKfold = 2;
inline constexpr std::uint64_t kStreamSageOrderings = 3;

}  // namespace dip
