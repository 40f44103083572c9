#pragma once

#include <cstdint>
#include <random>

namespace rpci {

/// Seeded generator with implementation-independent draws.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are not, so the conversions are
/// spelled out here: uniform01 takes the top 53 bits, index() rejects the
/// biased tail, and normal() is Box-Muller using two uniform01 draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// In [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform in [0, n), n > 0.
  std::uint64_t index(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace rpci
