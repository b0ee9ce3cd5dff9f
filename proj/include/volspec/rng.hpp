#pragma once

#include <cstdint>
#include <random>

namespace volspec {

// Sub-stream identifiers. A replication's path, noise and volatility driver
// never share a generator.
enum class Stream : std::uint64_t {
  Path = 1,
  Noise = 2,
  VolDriver = 3,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Keyed seed derivation: (base, replication, stream) -> independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t replication,
                          Stream stream) noexcept;

class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  double operator()() { return dist_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace volspec
