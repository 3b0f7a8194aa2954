#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace selgov {

// Seeded stream with platform-independent derived draws (the standard
// distributions are implementation-defined, the engine is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

// Stream seed from (run seed, label), e.g. derive_seed(7, "fraud_detection/contexts").
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

}  // namespace selgov
