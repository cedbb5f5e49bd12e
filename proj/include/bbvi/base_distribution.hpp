#pragma once

#include <cmath>
#include <numbers>
#include <span>

#include "bbvi/rng.hpp"

namespace bbvi {

/// Base distributions are i.i.d. per coordinate, symmetric and standardized
/// (zero mean, unit variance, zero third moment, finite kurtosis).
enum class BaseDistribution { StandardGaussian, ScaledUniform };

inline constexpr double kSqrt3 = 1.7320508075688772;

inline double kurtosis(BaseDistribution d) {
  return d == BaseDistribution::StandardGaussian ? 3.0 : 1.8;
}

inline double sample_base_scalar(BaseDistribution d, RngStream& rng) {
  return d == BaseDistribution::StandardGaussian ? rng.normal()
                                                 : rng.uniform(-kSqrt3, kSqrt3);
}

inline void sample_base(BaseDistribution d, RngStream& rng, std::span<double> out) {
  for (double& v : out) v = sample_base_scalar(d, rng);
}

/// Differential entropy of one coordinate of the base distribution; the
/// additive constant used by entropy reporting.
inline double base_entropy_per_dim(BaseDistribution d) {
  if (d == BaseDistribution::StandardGaussian)
    return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  return std::log(2.0 * kSqrt3);
}

}  // namespace bbvi
