#ifndef SPCS_RNG_HPP_
#define SPCS_RNG_HPP_

#include <cstdint>
#include <random>

namespace spcs {

// Stream derivation: every consumer gets its own generator seeded by
// splitmix64-mixing (parent seed, stream index). Trial i of an experiment with
// master seed s draws from derive_seed(s, i); within a trial the ensemble,
// signal, perturbation and noise use fixed sub-stream indices.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

enum class Stream : std::uint64_t {
  ensemble = 1,
  signal = 2,
  perturbation = 3,
  noise = 4,
  scene = 5,
};

inline std::uint64_t derive_seed(std::uint64_t parent, Stream stream) {
  return derive_seed(parent, static_cast<std::uint64_t>(stream));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  double sign() { return integer(0, 1) == 0 ? -1.0 : 1.0; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace spcs

#endif  // SPCS_RNG_HPP_
