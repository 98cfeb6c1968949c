#pragma once

#include <cstdint>
#include <random>

namespace advscore {

// Deterministic random source with explicitly specified sampling
// algorithms, so seeded runs reproduce bit-identically across platforms:
//   - uniforms take the top 53 bits of std::mt19937_64 (whose output
//     sequence is fixed by the standard),
//   - normals use Box-Muller, consuming exactly two uniforms per draw,
//   - gamma draws use Marsaglia-Tsang, with the shape<1 boost.
// std::normal_distribution and friends are implementation-defined and are
// deliberately not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform();

  // Standard normal.
  double normal();

  // Gamma(shape, scale); strictly positive result. Throws
  // InvalidArgumentError unless shape > 0 and scale > 0.
  double gamma(double shape, double scale);

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer over (seed, stream). Modules that share one
// user-facing seed draw from distinct substreams (fit initialization,
// holdout split, synthetic generation, ...) so their values never coincide
// by construction.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

namespace streams {
inline constexpr std::uint64_t kFitInit = 1;
inline constexpr std::uint64_t kFitSplit = 2;
inline constexpr std::uint64_t kSynth = 3;
}  // namespace streams

}  // namespace advscore
