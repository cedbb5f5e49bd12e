#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "bbvi/base_distribution.hpp"
#include "bbvi/sparsity.hpp"
#include "bbvi/target.hpp"
#include "bbvi/variational_family.hpp"

namespace bbvi {

/// Lambda-shaped gradient: a location part and a scale part stored in the
/// same pattern as the optimized C. Off-pattern positions do not exist.
struct GradientEstimate {
  Eigen::VectorXd grad_m;
  ScaleMatrix grad_C;

  static GradientEstimate zeros_like(const VariationalParams& params) {
    GradientEstimate g;
    g.grad_m = Eigen::VectorXd::Zero(params.dim());
    g.grad_C = ScaleMatrix::zeros_like(params.C);
    return g;
  }

  void set_zero() {
    grad_m.setZero();
    std::fill(grad_C.values().begin(), grad_C.values().end(), 0.0);
  }
};

/// M-sample reparameterization gradient of the energy f(lambda) = E l(T(u)).
/// Samples are outer, components inner: each u_m is drawn once and shared by
/// all components. Per-sample component gradients are scattered into a full
/// vector first, then pulled back through one pattern-restricted outer
/// product, which touches every stored position exactly once per sample.
class EnergyGradientEstimator {
 public:
  EnergyGradientEstimator(const Target& target,
                          BaseDistribution base = BaseDistribution::StandardGaussian)
      : target_(&target), base_(base) {}

  void estimate(const VariationalParams& params, int num_samples, RngStream& rng,
                GradientEstimate& out) {
    detail::require(num_samples >= 1, "estimate: need at least one sample");
    detail::require(params.dim() == target_->dim(), "estimate: dimension mismatch");
    const int d = params.dim();
    const int m = num_samples;
    const size_t dm = static_cast<size_t>(d) * m;
    u_.resize(dm);
    v_.resize(dm);
    g_.assign(dm, 0.0);
    const int max_sub = target_->max_component_size();
    sub_.resize(max_sub);
    gsub_.resize(max_sub);

    for (int s = 0; s < m; ++s)
      for (int j = 0; j < d; ++j)
        u_[static_cast<size_t>(j) * m + s] = sample_base_scalar(base_, rng);

    params.C.matvec_multi(u_.data(), m, v_.data());

    out.grad_m.setZero();
    std::fill(out.grad_C.values().begin(), out.grad_C.values().end(), 0.0);
    const double* loc = params.m.data();
    const double w = 1.0 / m;
    for (int s = 0; s < m; ++s) {
      for (int n = 0; n < target_->components(); ++n) {
        const auto idx = target_->component_indices(n);
        const size_t k = idx.size();
        for (size_t a = 0; a < k; ++a)
          sub_[a] = v_[static_cast<size_t>(idx[a]) * m + s] + loc[idx[a]];
        target_->eval_component(n, {sub_.data(), k}, {gsub_.data(), k});
        for (size_t a = 0; a < k; ++a) {
          g_[static_cast<size_t>(idx[a]) * m + s] += gsub_[a];
          out.grad_m[idx[a]] += w * gsub_[a];
        }
      }
    }
    out.grad_C.add_outer_multi(g_.data(), u_.data(), m, w);
  }

  GradientEstimate estimate(const VariationalParams& params, int num_samples,
                            RngStream& rng) {
    GradientEstimate out = GradientEstimate::zeros_like(params);
    estimate(params, num_samples, rng, out);
    return out;
  }

 private:
  const Target* target_;
  BaseDistribution base_;
  std::vector<double> u_, v_, g_;
  std::vector<double> sub_, gsub_;
};

inline GradientEstimate estimate_energy_gradient(
    const VariationalParams& params, const Target& target, int num_samples,
    RngStream& rng, BaseDistribution base = BaseDistribution::StandardGaussian) {
  EnergyGradientEstimator est(target, base);
  return est.estimate(params, num_samples, rng);
}

/// 1 + sum_j delta_{n,j} u_j^2, the squared-Jacobian scalar of the
/// component reparameterization map.
inline double jacobian_factor(std::span<const double> u, const SparsityDescriptor& desc,
                              int n) {
  detail::require(n >= 0 && n < desc.components(), "jacobian_factor: bad component");
  detail::require(u.size() == static_cast<size_t>(desc.dim()),
                  "jacobian_factor: dimension mismatch");
  double acc = 1.0;
  for (int j : desc.marked_columns(n)) acc += u[j] * u[j];
  return acc;
}

}  // namespace bbvi
