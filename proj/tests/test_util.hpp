#pragma once

#include <numbers>

#include <Eigen/Dense>

#include "bbvi/rng.hpp"
#include "bbvi/scale_matrix.hpp"
#include "bbvi/target.hpp"

namespace testutil {

// Normalized isotropic Gaussian negative log density as a one-component
// target; closed-form ELBO/KL oracle material.
class NormalizedGaussianTarget : public bbvi::Target {
 public:
  NormalizedGaussianTarget(Eigen::VectorXd mean, double variance)
      : Target(static_cast<int>(mean.size()), full_structure(static_cast<int>(mean.size()))),
        mean_(std::move(mean)),
        prec_(1.0 / variance),
        log_norm_(0.5 * mean_.size() * std::log(2.0 * std::numbers::pi * variance)) {}

  double eval_component(int, std::span<const double> z_sub,
                        std::span<double> grad) const override {
    const Eigen::Map<const Eigen::VectorXd> z(z_sub.data(), dim());
    Eigen::Map<Eigen::VectorXd> g(grad.data(), dim());
    const Eigen::VectorXd r = z - mean_;
    g = prec_ * r;
    return 0.5 * prec_ * r.squaredNorm() + log_norm_;
  }

  bool has_quadratic_metadata() const override { return true; }
  Eigen::MatrixXd component_hessian(int) const override {
    return prec_ * Eigen::MatrixXd::Identity(dim(), dim());
  }
  Eigen::VectorXd component_stationary_point(int) const override { return mean_; }

  // Exact energy E l(Cu + m) for any scale matrix.
  double exact_energy(const Eigen::VectorXd& m, const bbvi::ScaleMatrix& c) const {
    return 0.5 * prec_ * ((m - mean_).squaredNorm() + c.frobenius_norm_sq()) + log_norm_;
  }

 private:
  static bbvi::ComponentStructure full_structure(int d) {
    bbvi::ComponentStructure cs;
    cs.index_sets.push_back({});
    for (int j = 0; j < d; ++j) cs.index_sets[0].push_back(j);
    return cs;
  }

  Eigen::VectorXd mean_;
  double prec_;
  double log_norm_;
};

// Central-difference gradient; the oracle side of analytic-gradient checks.
template <class F>
Eigen::VectorXd fd_gradient(F&& f, const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

// Central-difference Hessian with one Richardson step (exact for quartics
// up to roundoff).
template <class F>
Eigen::MatrixXd fd_hessian(F&& f, const Eigen::VectorXd& x, double h = 1e-2) {
  const auto hess_at = [&](double step) {
    const Eigen::Index d = x.size();
    Eigen::MatrixXd out(d, d);
    Eigen::VectorXd p = x;
    const double f0 = f(x);
    for (Eigen::Index i = 0; i < d; ++i) {
      p[i] = x[i] + step;
      const double fp = f(p);
      p[i] = x[i] - step;
      const double fm = f(p);
      p[i] = x[i];
      out(i, i) = (fp - 2.0 * f0 + fm) / (step * step);
      for (Eigen::Index j = i + 1; j < d; ++j) {
        p[i] = x[i] + step;
        p[j] = x[j] + step;
        const double fpp = f(p);
        p[j] = x[j] - step;
        const double fpm = f(p);
        p[i] = x[i] - step;
        const double fmm = f(p);
        p[j] = x[j] + step;
        const double fmp = f(p);
        p[i] = x[i];
        p[j] = x[j];
        out(i, j) = out(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
      }
    }
    return out;
  };
  const Eigen::MatrixXd coarse = hess_at(2.0 * h);
  const Eigen::MatrixXd fine = hess_at(h);
  return (4.0 * fine - coarse) / 3.0;
}

inline Eigen::VectorXd random_vector(int d, bbvi::RngStream& rng, double scale = 1.0) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = scale * rng.normal();
  return v;
}

// Random scale matrix with a safely positive diagonal.
inline bbvi::ScaleMatrix randomize(bbvi::ScaleMatrix shape, bbvi::RngStream& rng) {
  auto vals = shape.values();
  shape.for_each_entry([&](int i, int j, size_t pos) {
    vals[pos] = (i == j) ? 0.4 + rng.uniform01() : 0.5 * rng.normal();
  });
  return shape;
}

}  // namespace testutil
