#pragma once

#include "fnmr/common.hpp"

#include <random>

namespace fnmr {

/// Portable random stream: std::mt19937_64 bits with hand-rolled
/// distributions, since the standard distributions are implementation
/// defined and would break cross-platform reproducibility.
class Rng {
public:
  explicit Rng(Seed seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 bits of mantissa.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via Box-Muller; the second deviate is cached.
  double normal();

  std::uint64_t bits() { return engine_(); }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fnmr
