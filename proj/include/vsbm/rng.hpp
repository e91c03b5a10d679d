#pragma once

#include <cstdint>
#include <random>

namespace vsbm {

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// master seed so that replicate r always sees the same generator no matter
/// which thread runs it.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `stream` of master seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Random source used by every sampler: a 64-bit Mersenne Twister seeded
/// through derive_seed. Uniform draws use the top 53 bits directly so the
/// stream of doubles does not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(derive_seed(seed, stream)) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via the polar method.
  double normal();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace vsbm
