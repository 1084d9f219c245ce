#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace lfo {

/// Splitmix64 finalizer. Used to turn arbitrary 64-bit inputs into
/// well-mixed engine seeds; fixed here so that seed derivation is part of
/// the reproducibility contract.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Seeded random source producing uniform doubles in [0,1) and standard
/// normals. Two sources built with the same seed emit identical streams.
///
/// The engine is std::mt19937_64 (bit-exact per the C++ standard); the
/// uniform mapping takes the top 53 bits, and normals come from Box-Muller
/// over that uniform, so the whole stream is reproducible across
/// implementations. Distributions from <random> are deliberately not used:
/// their output is implementation-defined.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed)
      : seed_(seed), engine_(mix64(seed)) {}

  /// Stream seed for replication `replication` of algorithm `stream` under
  /// `master_seed`: three chained splitmix64 rounds, one per component.
  /// Results therefore do not depend on the order replications are run in.
  static std::uint64_t derive_seed(std::uint64_t master_seed,
                                   std::uint64_t stream,
                                   std::uint64_t replication) noexcept {
    return mix64(mix64(mix64(master_seed) ^ stream) ^ replication);
  }

  static RandomSource for_replication(std::uint64_t master_seed,
                                      std::uint64_t stream,
                                      std::uint64_t replication) {
    return RandomSource(derive_seed(master_seed, stream, replication));
  }

  /// Uniform double in the half-open interval [0,1), 53-bit resolution.
  /// Exact 0.0 is possible (probability 2^-53).
  double uniform() {
    ++draws_;
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; generates pairs, caching the second.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0,1], keeps log() finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  std::uint64_t seed() const noexcept { return seed_; }

  /// Number of raw engine draws consumed so far (one per uniform, two per
  /// Box-Muller pair). Exposed for draw-accounting tests.
  std::uint64_t draws() const noexcept { return draws_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lfo
