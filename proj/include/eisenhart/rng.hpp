#pragma once

#include <cstdint>
#include <random>

namespace eisenhart {

// Seeded uniform doubles with a fixed engine-to-double mapping.  The standard
// distribution classes differ between library implementations; this mapping
// keeps sampled configurations byte-identical everywhere.
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : eng_(seed) {}

  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace eisenhart
