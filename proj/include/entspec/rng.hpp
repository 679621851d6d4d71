// rng.hpp — deterministic random primitives. mt19937_64 output is pinned by
// the standard and the gaussian transform is our own, so streams are
// reproducible across platforms for a fixed seed.
#pragma once

#include "entspec/qcore.hpp"

#include <cstdint>
#include <random>

namespace entspec {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  // Independent stream for a subtask; stable in (seed, index) so parallel
  // schedules cannot change results.
  Rng derive(std::uint64_t index) const {
    return Rng(splitmix64(seed_ ^ (0x9E3779B97F4A7C15ULL * (index + 1))));
  }

  std::uint64_t bits() { return engine_(); }
  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double gaussian();
  Complex gaussian_complex() { return {gaussian(), gaussian()}; }
  int uniform_int(int lo, int hi);  // inclusive bounds

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

ComplexMatrix random_matrix(Rng& rng, int rows, int cols);
ComplexMatrix random_hermitian(Rng& rng, int d);
ComplexMatrix random_psd(Rng& rng, int d);       // unnormalized, PSD
ComplexMatrix haar_unitary(Rng& rng, int d);
PureState random_pure(Rng& rng, int d,
                      std::optional<BipartiteSplit> split = std::nullopt);
DensityMatrix random_density(Rng& rng, int d,
                             std::optional<BipartiteSplit> split = std::nullopt);
// 0 <= P <= I with a spread spectrum (for Lemma 1 draws).
ComplexMatrix random_contraction(Rng& rng, int d);
RealVector random_probability_vector(Rng& rng, int k);

}  // namespace entspec
