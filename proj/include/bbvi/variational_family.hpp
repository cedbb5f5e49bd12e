#pragma once

#include <Eigen/Core>

#include "bbvi/base_distribution.hpp"
#include "bbvi/scale_matrix.hpp"
#include "bbvi/target.hpp"

namespace bbvi {

/// The optimization variable lambda = (m, C) of the location-scale family
/// z = C u + m.
struct VariationalParams {
  Eigen::VectorXd m;
  ScaleMatrix C;

  int dim() const { return static_cast<int>(m.size()); }

  static VariationalParams standard_init(ScaleMatrix c_shape) {
    VariationalParams p;
    p.m = Eigen::VectorXd::Zero(c_shape.dim());
    p.C = std::move(c_shape);
    for (double& v : p.C.values()) v = 0.0;
    p.C.for_each_diagonal([&](int, size_t pos) { p.C.values()[pos] = 1.0; });
    return p;
  }

  /// q = N(0, scale^2 I) in the given structure; scale 0.1 reproduces the
  /// realistic-run initialization.
  static VariationalParams scaled_init(ScaleMatrix c_shape, double scale) {
    VariationalParams p = standard_init(std::move(c_shape));
    p.C.for_each_diagonal([&](int, size_t pos) { p.C.values()[pos] = scale; });
    return p;
  }

  /// Diagonal-covariance Gaussian expressed in an arbitrary structure.
  static VariationalParams diagonal_gaussian(const Eigen::VectorXd& mean,
                                             const Eigen::VectorXd& scale_diag,
                                             ScaleMatrix c_shape) {
    detail::require(mean.size() == c_shape.dim() && scale_diag.size() == c_shape.dim(),
                    "diagonal_gaussian: dimension mismatch");
    VariationalParams p;
    p.m = mean;
    p.C = std::move(c_shape);
    for (double& v : p.C.values()) v = 0.0;
    p.C.for_each_diagonal(
        [&](int i, size_t pos) { p.C.values()[pos] = scale_diag[i]; });
    return p;
  }
};

inline Eigen::VectorXd reparameterize(const VariationalParams& params,
                                      const Eigen::VectorXd& u) {
  detail::require(u.size() == params.dim(), "reparameterize: dimension mismatch");
  return params.C.matvec(u) + params.m;
}

enum class EntropyMode {
  Optimization,  // -log det C only, matching the proximal objective's h
  Reporting      // adds the base distribution's entropy constant
};

inline double negative_entropy(const VariationalParams& params,
                               EntropyMode mode = EntropyMode::Optimization,
                               BaseDistribution base = BaseDistribution::StandardGaussian) {
  double h = -params.C.log_det_diag();
  if (mode == EntropyMode::Reporting) h -= params.dim() * base_entropy_per_dim(base);
  return h;
}

inline double entropy(const VariationalParams& params,
                      EntropyMode mode = EntropyMode::Reporting,
                      BaseDistribution base = BaseDistribution::StandardGaussian) {
  return -negative_entropy(params, mode, base);
}

/// Squared distance between parameter vectors. Identical layouts compare
/// stored entries; mixed layouts fall back to dense expansion.
inline double param_distance_sq(const VariationalParams& a, const VariationalParams& b) {
  detail::require(a.dim() == b.dim(), "param_distance_sq: dimension mismatch");
  double acc = (a.m - b.m).squaredNorm();
  if (a.C.same_shape(b.C)) {
    const auto va = a.C.values();
    const auto vb = b.C.values();
    // four partial sums; a single accumulator serializes on add latency
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    size_t i = 0;
    for (; i + 4 <= va.size(); i += 4) {
      const double d0 = va[i] - vb[i];
      const double d1 = va[i + 1] - vb[i + 1];
      const double d2 = va[i + 2] - vb[i + 2];
      const double d3 = va[i + 3] - vb[i + 3];
      s0 += d0 * d0;
      s1 += d1 * d1;
      s2 += d2 * d2;
      s3 += d3 * d3;
    }
    for (; i < va.size(); ++i) {
      const double d = va[i] - vb[i];
      s0 += d * d;
    }
    acc += (s0 + s1) + (s2 + s3);
  } else {
    acc += (a.C.to_dense() - b.C.to_dense()).squaredNorm();
  }
  return acc;
}

/// Monte Carlo ELBO with reporting-mode entropy, unbiased for
/// E[-l(T(u))] + H(q).
inline double elbo_estimate(const VariationalParams& params, const Target& target,
                            int num_samples, RngStream& rng,
                            BaseDistribution base = BaseDistribution::StandardGaussian) {
  detail::require(num_samples >= 1, "elbo_estimate: need at least one sample");
  detail::require(params.dim() == target.dim(), "elbo_estimate: dimension mismatch");
  const double ent = entropy(params, EntropyMode::Reporting, base);
  const int d = params.dim();
  Eigen::VectorXd u(d), z(d);
  double acc = 0.0;
  for (int s = 0; s < num_samples; ++s) {
    sample_base(base, rng, {u.data(), static_cast<size_t>(d)});
    params.C.matvec(u.data(), z.data());
    z += params.m;
    acc -= target.full_value_gradient(z.data(), nullptr);
  }
  return acc / num_samples + ent;
}

}  // namespace bbvi
