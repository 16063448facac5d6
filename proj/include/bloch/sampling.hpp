#pragma once

#include <cmath>
#include <cstdint>

#include "bloch/types.hpp"

namespace bloch {

/// Seeded generator with a platform-independent stream, so seeded runs
/// produce identical samples everywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double log_uniform(double lo, double hi) {
    return lo * std::exp(uniform() * std::log(hi / lo));
  }

  bool coin() { return (next() & 1ULL) != 0; }

 private:
  std::uint64_t state_;
};

struct SystemSample {
  FieldVector field;
  RelaxationRates rates;
};

/// Rates log-uniform in [1e-2, 1e4] 1/s, field components log-uniform in
/// [1e-2, 1e5] rad/s with optional random signs.
inline SystemSample sample_system(SplitMix64& rng, bool signed_fields = false,
                                  double rate_lo = 1e-2, double rate_hi = 1e4,
                                  double field_lo = 1e-2, double field_hi = 1e5) {
  SystemSample s;
  s.rates = {rng.log_uniform(rate_lo, rate_hi), rng.log_uniform(rate_lo, rate_hi),
             rng.log_uniform(rate_lo, rate_hi)};
  double w[3];
  for (double& wi : w) {
    wi = rng.log_uniform(field_lo, field_hi);
    if (signed_fields && rng.coin()) wi = -wi;
  }
  s.field = {w[0], w[1], w[2]};
  return s;
}

}  // namespace bloch
