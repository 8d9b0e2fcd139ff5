#pragma once

#include <cstdint>
#include <random>

namespace ixsim
{

/// SplitMix64 step. Used to derive independent child seeds from a parent seed.
std::uint64_t splitmix64(std::uint64_t x);

/// Seeded random source with platform-independent output.
///
/// std::mt19937_64 is bit-exact across standard libraries, but the standard
/// distributions are not, so the uniform and normal draws are computed here
/// from raw engine output.
class Rng
{
public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one spare value cached).
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ixsim
