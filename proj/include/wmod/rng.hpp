#pragma once

#include <cstdint>
#include <random>

namespace wmod {

/// SplitMix64 finalizer. Used to derive independent child seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic seed for the (a, b) child stream of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Distribution code is written out here instead of using <random>'s
// distributions, whose output is implementation-defined. Same seed gives the
// same numbers with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01();
  /// Uniform on (0, 1].
  double uniform_open_closed();
  double uniform(double lo, double hi);
  /// Uniform integer on [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  bool bernoulli(double p);
  double normal(double mean = 0.0, double sd = 1.0);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wmod
