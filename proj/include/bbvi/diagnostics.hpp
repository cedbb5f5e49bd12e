#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "bbvi/gradient_estimator.hpp"
#include "bbvi/optimizer.hpp"

namespace bbvi {

struct VarianceEstimate {
  double estimate = 0.0;
  double stderr_jackknife = 0.0;
};

/// Trace of the sample covariance (sum of per-entry sample variances) of S
/// flattened gradient draws, with a leave-one-out jackknife standard error.
/// The generator is called twice per sample index, so draws must be a pure
/// function of the index; memory stays O(P + S).
template <class Gen>
VarianceEstimate trace_variance_jackknife(size_t dim, int num_samples, Gen&& gen) {
  detail::require(num_samples >= 2, "trace variance needs at least two samples");
  const double s = num_samples;
  std::vector<double> sum(dim, 0.0), sum_sq(dim, 0.0), x(dim);
  for (int i = 0; i < num_samples; ++i) {
    gen(i, std::span<double>(x));
    for (size_t e = 0; e < dim; ++e) {
      sum[e] += x[e];
      sum_sq[e] += x[e] * x[e];
    }
  }
  VarianceEstimate out;
  for (size_t e = 0; e < dim; ++e)
    out.estimate += (sum_sq[e] - sum[e] * sum[e] / s) / (s - 1.0);

  if (num_samples < 3) return out;  // jackknife undefined at S = 2
  std::vector<double> theta(num_samples, 0.0);
  for (int i = 0; i < num_samples; ++i) {
    gen(i, std::span<double>(x));
    double acc = 0.0;
    for (size_t e = 0; e < dim; ++e) {
      const double s1 = sum[e] - x[e];
      const double s2 = sum_sq[e] - x[e] * x[e];
      acc += (s2 - s1 * s1 / (s - 1.0)) / (s - 2.0);
    }
    theta[i] = acc;
  }
  double mean = 0.0;
  for (double t : theta) mean += t;
  mean /= s;
  double var = 0.0;
  for (double t : theta) var += (t - mean) * (t - mean);
  out.stderr_jackknife = std::sqrt((s - 1.0) / s * var);
  return out;
}

/// Same statistic from an explicit list of flattened draws.
inline VarianceEstimate trace_variance_of(const std::vector<std::vector<double>>& draws) {
  detail::require(draws.size() >= 2, "trace variance needs at least two samples");
  const size_t dim = draws[0].size();
  return trace_variance_jackknife(dim, static_cast<int>(draws.size()),
                                  [&](int i, std::span<double> x) {
                                    for (size_t e = 0; e < dim; ++e) x[e] = draws[i][e];
                                  });
}

/// Measured tr V[g_M] at a fixed lambda from S independent estimates, each
/// drawn from a substream derived from (seed, sample index).
inline VarianceEstimate empirical_gradient_variance(
    const VariationalParams& params, const Target& target, int num_samples,
    int outer_samples, std::uint64_t seed,
    BaseDistribution base = BaseDistribution::StandardGaussian) {
  EnergyGradientEstimator est(target, base);
  GradientEstimate g = GradientEstimate::zeros_like(params);
  const size_t d = static_cast<size_t>(params.dim());
  const size_t dim = d + params.C.stored_count();
  return trace_variance_jackknife(dim, outer_samples, [&](int i, std::span<double> x) {
    RngStream rng(derive_seed(seed, 0x7a3e, static_cast<std::uint64_t>(i)));
    est.estimate(params, num_samples, rng, g);
    for (size_t e = 0; e < d; ++e) x[e] = g.grad_m[e];
    const auto cv = g.grad_C.values();
    for (size_t e = 0; e < cv.size(); ++e) x[d + e] = cv[e];
  });
}

/// (N/M)(d* + k_phi) sum_n L_n^2 (|m_n - zbar_n|^2 + |C_n|_F^2), with m_n the
/// restriction of m to component n's index set and |C_n|_F^2 the stored
/// entries in component n's rows.
inline double theoretical_variance_bound(const VariationalParams& params,
                                         const Target& target,
                                         const SparsityDescriptor& desc, int num_samples,
                                         double k_phi) {
  if (!target.has_quadratic_metadata())
    throw UnsupportedOperationError("variance bound needs smoothness metadata");
  detail::require(num_samples >= 1, "variance bound: M must be >= 1");
  const int nc = target.components();
  double sum = 0.0;
  for (int n = 0; n < nc; ++n) {
    const auto idx = target.component_indices(n);
    const Eigen::VectorXd zbar = target.component_stationary_point(n);
    double m_dist = 0.0;
    for (size_t k = 0; k < idx.size(); ++k) {
      const double diff = params.m[idx[k]] - zbar[static_cast<Eigen::Index>(k)];
      m_dist += diff * diff;
    }
    const double ln = target.component_smoothness(n);
    sum += ln * ln * (m_dist + params.C.frobenius_norm_sq_rows(idx));
  }
  const double dstar = desc.effective_dimensionality();
  return static_cast<double>(nc) / num_samples * (dstar + k_phi) * sum;
}

struct VarianceReport {
  VarianceEstimate empirical;
  double bound = 0.0;
  int d_star = 0;
  double k_phi = 0.0;
  std::vector<double> per_component_bound;

  bool bound_holds(double se_slack = 3.0) const {
    const double rel_se =
        empirical.estimate > 0.0 ? empirical.stderr_jackknife / empirical.estimate : 0.0;
    return empirical.estimate <= bound * (1.0 + se_slack * rel_se);
  }
};

inline VarianceReport variance_report(const VariationalParams& params,
                                      const Target& target, int num_samples,
                                      int outer_samples, std::uint64_t seed,
                                      BaseDistribution base) {
  const SparsityDescriptor desc = SparsityDescriptor::build(params.C, target);
  VarianceReport rep;
  rep.k_phi = kurtosis(base);
  rep.d_star = desc.effective_dimensionality();
  rep.empirical =
      empirical_gradient_variance(params, target, num_samples, outer_samples, seed, base);
  const int nc = target.components();
  rep.per_component_bound.resize(nc);
  const double front = static_cast<double>(nc) / num_samples * (rep.d_star + rep.k_phi);
  rep.bound = 0.0;
  for (int n = 0; n < nc; ++n) {
    const auto idx = target.component_indices(n);
    const Eigen::VectorXd zbar = target.component_stationary_point(n);
    double m_dist = 0.0;
    for (size_t k = 0; k < idx.size(); ++k) {
      const double diff = params.m[idx[k]] - zbar[static_cast<Eigen::Index>(k)];
      m_dist += diff * diff;
    }
    const double ln = target.component_smoothness(n);
    rep.per_component_bound[n] =
        front * ln * ln * (m_dist + params.C.frobenius_norm_sq_rows(idx));
    rep.bound += rep.per_component_bound[n];
  }
  return rep;
}

struct ComplexityConstants {
  double c_var = 0.0;
  double c_bias = 0.0;

  double predicted_iterations(double eps, double delta0) const {
    return std::max(c_var / eps, c_bias) * std::log(2.0 * delta0 * delta0 / eps);
  }
};

/// C_var = 4 N/M (d*+k_phi) sum kappa_n^2 (|m*_n - zbar_n|^2 + |C*_n|_F^2),
/// C_bias = 2 N/M (d*+k_phi) sum kappa_n^2 + kappa.
inline ComplexityConstants complexity_constants(const Target& target,
                                                const SparsityDescriptor& desc,
                                                int num_samples,
                                                const VariationalParams& optimum,
                                                double k_phi) {
  const SmoothnessConstants sc = smoothness_constants(target);
  detail::require(sc.mu > 0.0, "complexity constants need mu > 0");
  const int nc = target.components();
  const double front =
      static_cast<double>(nc) / num_samples * (desc.effective_dimensionality() + k_phi);
  double kappa_sq_sum = 0.0, weighted = 0.0;
  for (int n = 0; n < nc; ++n) {
    const double kappa_n = sc.per_component[n] / sc.mu;
    kappa_sq_sum += kappa_n * kappa_n;
    const auto idx = target.component_indices(n);
    const Eigen::VectorXd zbar = target.component_stationary_point(n);
    double m_dist = 0.0;
    for (size_t k = 0; k < idx.size(); ++k) {
      const double diff = optimum.m[idx[k]] - zbar[static_cast<Eigen::Index>(k)];
      m_dist += diff * diff;
    }
    weighted += kappa_n * kappa_n * (m_dist + optimum.C.frobenius_norm_sq_rows(idx));
  }
  ComplexityConstants out;
  out.c_var = 4.0 * front * weighted;
  out.c_bias = 2.0 * front * kappa_sq_sum + sc.L / sc.mu;
  return out;
}

struct MomentReport {
  std::array<double, 4> moments{};  // E u, E u^2, E u^3, E u^4
  std::array<double, 4> stderrs{};
  std::array<double, 4> expected{};
  bool pass = true;
};

inline MomentReport base_moment_check(BaseDistribution dist, int num_samples,
                                      std::uint64_t seed, double se_tolerance = 4.0) {
  detail::require(num_samples >= 1000, "moment check needs at least 1e3 samples");
  RngStream rng(derive_seed(seed, 0x40e));
  std::array<double, 8> sums{};  // powers 1..8 for the moment variances
  for (int i = 0; i < num_samples; ++i) {
    const double u = sample_base_scalar(dist, rng);
    double p = 1.0;
    for (int k = 0; k < 8; ++k) {
      p *= u;
      sums[k] += p;
    }
  }
  MomentReport rep;
  rep.expected = {0.0, 1.0, 0.0, kurtosis(dist)};
  for (int k = 0; k < 4; ++k) {
    const double mean_k = sums[k] / num_samples;
    const double mean_2k = sums[2 * k + 1] / num_samples;
    rep.moments[k] = mean_k;
    rep.stderrs[k] =
        std::sqrt(std::max(0.0, mean_2k - mean_k * mean_k) / num_samples);
    if (std::abs(mean_k - rep.expected[k]) > se_tolerance * rep.stderrs[k])
      rep.pass = false;
  }
  return rep;
}

struct TraceIdentityReport {
  double estimate = 0.0;
  double exact = 0.0;
  double stderr_mc = 0.0;
  bool pass = true;
};

/// Monte Carlo check of E|Au|^2 = |A|_F^2 for standardized bases.
inline TraceIdentityReport trace_identity_check(const Eigen::MatrixXd& a,
                                                BaseDistribution dist, int num_samples,
                                                std::uint64_t seed,
                                                double se_tolerance = 5.0) {
  detail::require(num_samples >= 1000, "trace identity needs at least 1e3 samples");
  RngStream rng(derive_seed(seed, 0x77ace));
  Eigen::VectorXd u(a.cols());
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < num_samples; ++i) {
    sample_base(dist, rng, {u.data(), static_cast<size_t>(u.size())});
    const double v = (a * u).squaredNorm();
    sum += v;
    sum_sq += v * v;
  }
  TraceIdentityReport rep;
  rep.estimate = sum / num_samples;
  rep.exact = a.squaredNorm();
  rep.stderr_mc = std::sqrt(
      std::max(0.0, sum_sq / num_samples - rep.estimate * rep.estimate) / num_samples);
  rep.pass = std::abs(rep.estimate - rep.exact) <= se_tolerance * rep.stderr_mc;
  return rep;
}

struct NonconvexityProbe {
  double energy = 0.0;
  Eigen::Matrix3d hessian;
  double det = 0.0;
  double min_eigenvalue = 0.0;
};

/// The non-standardized parameterization's energy f(x,y,z) = x^2 + z^2 +
/// x^2 y^2 with its analytic Hessian; its determinant 8x^2(1 - 3y^2) turns
/// negative, ruling out convexity.
inline NonconvexityProbe nonconvexity_probe(double x, double y, double z) {
  NonconvexityProbe p;
  p.energy = x * x + z * z + x * x * y * y;
  p.hessian << 2.0 + 2.0 * y * y, 4.0 * x * y, 0.0,
               4.0 * x * y, 2.0 * x * x, 0.0,
               0.0, 0.0, 2.0;
  p.det = 8.0 * x * x * (1.0 - 3.0 * y * y);
  const double a = p.hessian(0, 0), b = p.hessian(0, 1), c = p.hessian(1, 1);
  const double lower = 0.5 * ((a + c) - std::sqrt((a - c) * (a - c) + 4.0 * b * b));
  p.min_eigenvalue = std::min(lower, 2.0);
  return p;
}

}  // namespace bbvi
