#include "rpci/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rpci/error.hpp"

namespace rpci {

std::uint64_t Rng::index(std::uint64_t n) {
  if (n == 0) throw ValidationError("Rng::index needs n > 0");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % n + 1) % n;
  for (;;) {
    const std::uint64_t v = engine_();
    if (v <= limit) return v % n;
  }
}

double Rng::normal() {
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rpci
