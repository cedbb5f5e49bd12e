#pragma once

#include <algorithm>
#include <fstream>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "bbvi/block_layout.hpp"
#include "bbvi/common.hpp"
#include "bbvi/rng.hpp"

namespace bbvi {

/// Which coordinates each summand of the negative log-joint touches.
struct ComponentStructure {
  std::vector<std::vector<int>> index_sets;

  void validate(int d) const {
    for (const auto& set : index_sets) {
      detail::require(!set.empty(), "ComponentStructure: empty index set");
      detail::require(std::is_sorted(set.begin(), set.end()),
                      "ComponentStructure: index set not sorted");
      detail::require(std::adjacent_find(set.begin(), set.end()) == set.end(),
                      "ComponentStructure: duplicate index");
      detail::require(set.front() >= 0 && set.back() < d,
                      "ComponentStructure: index out of range");
    }
  }

  static ComponentStructure hierarchical(const BlockLayout& layout) {
    ComponentStructure cs;
    cs.index_sets.resize(layout.n_blocks);
    for (int n = 0; n < layout.n_blocks; ++n) {
      auto& set = cs.index_sets[n];
      set.reserve(layout.dz + layout.dy);
      for (int j = 0; j < layout.dz; ++j) set.push_back(j);
      for (int j = 0; j < layout.dy; ++j) set.push_back(layout.local_offset(n) + j);
    }
    return cs;
  }
};

/// Finite-sum negative log-joint l = sum_n l_n with per-component variable
/// index sets and analytic gradients. Quadratic-family targets additionally
/// expose smoothness constants and per-component stationary points.
class Target {
 public:
  virtual ~Target() = default;

  int dim() const { return d_; }
  int components() const { return static_cast<int>(comps_.index_sets.size()); }
  std::span<const int> component_indices(int n) const {
    detail::require(n >= 0 && n < components(), "component index out of range");
    return comps_.index_sets[n];
  }
  const ComponentStructure& component_structure() const { return comps_; }
  int max_component_size() const {
    size_t m = 0;
    for (const auto& s : comps_.index_sets) m = std::max(m, s.size());
    return static_cast<int>(m);
  }

  /// Value and gradient of l_n in the component subspace (sorted index order).
  virtual double eval_component(int n, std::span<const double> z_sub,
                                std::span<double> grad) const = 0;

  /// l(z) and optionally its full gradient as the scattered component sum.
  double full_value_gradient(const double* z, double* grad) const {
    if (grad) std::fill(grad, grad + d_, 0.0);
    std::vector<double> sub(max_component_size()), gsub(max_component_size());
    double total = 0.0;
    for (int n = 0; n < components(); ++n) {
      const auto idx = component_indices(n);
      for (size_t k = 0; k < idx.size(); ++k) sub[k] = z[idx[k]];
      total += eval_component(n, {sub.data(), idx.size()}, {gsub.data(), idx.size()});
      if (grad)
        for (size_t k = 0; k < idx.size(); ++k) grad[idx[k]] += gsub[k];
    }
    return total;
  }

  double value(const Eigen::VectorXd& z) const {
    detail::require(z.size() == d_, "target value: dimension mismatch");
    return full_value_gradient(z.data(), nullptr);
  }

  // Quadratic-family metadata.
  virtual bool has_quadratic_metadata() const { return false; }
  virtual double component_smoothness(int n) const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(component_hessian(n));
    return es.eigenvalues().maxCoeff();
  }
  virtual Eigen::VectorXd component_stationary_point(int) const {
    throw UnsupportedOperationError("stationary points unavailable for this target");
  }
  virtual Eigen::MatrixXd component_hessian(int) const {
    throw UnsupportedOperationError("component Hessian unavailable for this target");
  }
  /// (L, mu) of the assembled Hessian; dense assembly unless overridden.
  virtual std::pair<double, double> assembled_spectrum() const {
    detail::require(d_ <= 2000, "assembled_spectrum: dimension guard exceeded");
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d_, d_);
    for (int n = 0; n < components(); ++n) {
      const auto idx = component_indices(n);
      const Eigen::MatrixXd hn = component_hessian(n);
      for (size_t a = 0; a < idx.size(); ++a)
        for (size_t b = 0; b < idx.size(); ++b) h(idx[a], idx[b]) += hn(a, b);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    return {es.eigenvalues().maxCoeff(), es.eigenvalues().minCoeff()};
  }

 protected:
  Target(int d, ComponentStructure comps) : d_(d), comps_(std::move(comps)) {
    comps_.validate(d_);
  }

  int d_;
  ComponentStructure comps_;
};

struct SmoothnessConstants {
  double L = 0.0;
  double mu = 0.0;
  std::vector<double> per_component;
};

inline SmoothnessConstants smoothness_constants(const Target& target) {
  if (!target.has_quadratic_metadata())
    throw UnsupportedOperationError("smoothness constants need quadratic metadata");
  SmoothnessConstants out;
  out.per_component.resize(target.components());
  for (int n = 0; n < target.components(); ++n)
    out.per_component[n] = target.component_smoothness(n);
  std::tie(out.L, out.mu) = target.assembled_spectrum();
  return out;
}

inline std::vector<Eigen::VectorXd> stationary_points(const Target& target) {
  if (!target.has_quadratic_metadata())
    throw UnsupportedOperationError("stationary points need quadratic metadata");
  std::vector<Eigen::VectorXd> out(target.components());
  for (int n = 0; n < target.components(); ++n)
    out[n] = target.component_stationary_point(n);
  return out;
}

/// Isotropic Gaussian hierarchy: every local block y_n ~ N(mean, var I) and
/// the global z ~ N(mean, var I), with the z term split evenly across the N
/// components so that l = sum_n l_n counts the global prior exactly once.
/// The posterior is N(mean, var I) on all d coordinates.
class IsotropicGaussianHierarchy : public Target {
 public:
  explicit IsotropicGaussianHierarchy(const BlockLayout& layout, double mean = 5.0,
                                      double variance = 0.1)
      : Target(layout.dim(), ComponentStructure::hierarchical(layout)),
        layout_(layout),
        mean_(mean),
        prec_(1.0 / variance) {
    detail::require(variance > 0.0, "variance must be positive");
    const double two_pi_var = 2.0 * std::numbers::pi * variance;
    log_norm_y_ = 0.5 * layout.dy * std::log(two_pi_var);
    log_norm_z_ = 0.5 * layout.dz * std::log(two_pi_var);
  }

  const BlockLayout& layout() const { return layout_; }
  double mean() const { return mean_; }
  double variance() const { return 1.0 / prec_; }

  double eval_component(int n, std::span<const double> z_sub,
                        std::span<double> grad) const override {
    detail::require(n >= 0 && n < components(), "component index out of range");
    detail::require(z_sub.size() == static_cast<size_t>(layout_.dz + layout_.dy),
                    "eval_component: bad subspace dimension");
    const double inv_n = 1.0 / components();
    double quad_z = 0.0, quad_y = 0.0;
    for (int j = 0; j < layout_.dz; ++j) {
      const double r = z_sub[j] - mean_;
      grad[j] = inv_n * prec_ * r;
      quad_z += r * r;
    }
    for (int j = 0; j < layout_.dy; ++j) {
      const double r = z_sub[layout_.dz + j] - mean_;
      grad[layout_.dz + j] = prec_ * r;
      quad_y += r * r;
    }
    return 0.5 * prec_ * quad_y + log_norm_y_ +
           inv_n * (0.5 * prec_ * quad_z + log_norm_z_);
  }

  bool has_quadratic_metadata() const override { return true; }
  double component_smoothness(int) const override { return prec_; }
  Eigen::VectorXd component_stationary_point(int) const override {
    return Eigen::VectorXd::Constant(layout_.dz + layout_.dy, mean_);
  }
  Eigen::MatrixXd component_hessian(int) const override {
    Eigen::VectorXd diag(layout_.dz + layout_.dy);
    diag.head(layout_.dz).setConstant(prec_ / components());
    diag.tail(layout_.dy).setConstant(prec_);
    return diag.asDiagonal();
  }
  std::pair<double, double> assembled_spectrum() const override {
    return {prec_, prec_};  // assembled Hessian is prec * I
  }

  Eigen::VectorXd posterior_mean() const {
    return Eigen::VectorXd::Constant(d_, mean_);
  }
  Eigen::VectorXd posterior_scale_diag() const {
    return Eigen::VectorXd::Constant(d_, std::sqrt(1.0 / prec_));
  }

 private:
  BlockLayout layout_;
  double mean_, prec_;
  double log_norm_y_, log_norm_z_;
};

struct PosteriorOracle {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double log_evidence = 0.0;
};

/// Correlated hierarchy with a closed-form joint-Gaussian posterior:
///   z ~ N(mu0, sigma0^2 I), y_n | z ~ N(A z + b, Sigma_y),
///   x_n | y_n ~ N(y_n, sigma_x^2 I).
/// Observations are generated internally from a seed or loaded from CSV.
class CorrelatedGaussianHierarchy : public Target {
 public:
  struct Params {
    Eigen::VectorXd mu0;
    double sigma0 = 1.0;
    Eigen::MatrixXd A;        // dy x dz
    Eigen::VectorXd b;        // dy
    Eigen::MatrixXd sigma_y;  // dy x dy, SPD
    double sigma_x = 1.0;
  };

  static Params default_params(const BlockLayout& layout) {
    Params p;
    p.mu0 = Eigen::VectorXd::Zero(layout.dz);
    p.sigma0 = 1.0;
    p.A = Eigen::MatrixXd::Zero(layout.dy, layout.dz);
    for (int r = 0; r < layout.dy; ++r)
      for (int c = 0; c < layout.dz; ++c) p.A(r, c) = 0.6 / (1.0 + std::abs(r - c));
    p.b = Eigen::VectorXd::Constant(layout.dy, 0.3);
    p.sigma_y = Eigen::MatrixXd::Identity(layout.dy, layout.dy) * 0.8;
    for (int r = 0; r + 1 < layout.dy; ++r) {
      p.sigma_y(r, r + 1) = 0.2;
      p.sigma_y(r + 1, r) = 0.2;
    }
    p.sigma_x = 0.7;
    return p;
  }

  CorrelatedGaussianHierarchy(const BlockLayout& layout, Params params,
                              Eigen::MatrixXd observations)
      : Target(layout.dim(), ComponentStructure::hierarchical(layout)),
        layout_(layout),
        p_(std::move(params)),
        x_(std::move(observations)) {
    detail::require(layout.dz >= 1, "CorrelatedGaussianHierarchy needs dz >= 1");
    detail::require(x_.rows() == layout.n_blocks && x_.cols() == layout.dy,
                    "observations must be N x dy");
    detail::require(p_.sigma0 > 0.0 && p_.sigma_x > 0.0, "scales must be positive");
    Eigen::LLT<Eigen::MatrixXd> llt(p_.sigma_y);
    detail::require(llt.info() == Eigen::Success, "Sigma_y must be SPD");
    q_ = llt.solve(Eigen::MatrixXd::Identity(layout.dy, layout.dy));
    log_det_sigma_y_ = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    atq_ = p_.A.transpose() * q_;
  }

  static CorrelatedGaussianHierarchy with_synthetic_observations(
      const BlockLayout& layout, Params params, std::uint64_t seed) {
    RngStream rng(derive_seed(seed, 0x0b5e7));
    Eigen::VectorXd z(layout.dz);
    for (int j = 0; j < layout.dz; ++j)
      z[j] = params.mu0[j] + params.sigma0 * rng.normal();
    Eigen::LLT<Eigen::MatrixXd> llt(params.sigma_y);
    detail::require(llt.info() == Eigen::Success, "Sigma_y must be SPD");
    const Eigen::MatrixXd ly = llt.matrixL();
    Eigen::MatrixXd x(layout.n_blocks, layout.dy);
    Eigen::VectorXd noise(layout.dy);
    for (int n = 0; n < layout.n_blocks; ++n) {
      for (int j = 0; j < layout.dy; ++j) noise[j] = rng.normal();
      Eigen::VectorXd y = params.A * z + params.b + ly * noise;
      for (int j = 0; j < layout.dy; ++j) x(n, j) = y[j] + params.sigma_x * rng.normal();
    }
    return CorrelatedGaussianHierarchy(layout, std::move(params), std::move(x));
  }

  /// One observation row per datapoint, plain decimal columns.
  static Eigen::MatrixXd load_observations_csv(const std::string& path, int dy) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open observation file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string tok;
      std::vector<double> row;
      while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
      detail::require(static_cast<int>(row.size()) == dy,
                      "observation row has wrong arity");
      rows.push_back(std::move(row));
    }
    detail::require(!rows.empty(), "observation file is empty");
    Eigen::MatrixXd x(rows.size(), dy);
    for (size_t i = 0; i < rows.size(); ++i)
      for (int j = 0; j < dy; ++j) x(i, j) = rows[i][j];
    return x;
  }

  const BlockLayout& layout() const { return layout_; }
  const Params& params() const { return p_; }
  const Eigen::MatrixXd& observations() const { return x_; }

  double eval_component(int n, std::span<const double> z_sub,
                        std::span<double> grad) const override {
    detail::require(n >= 0 && n < components(), "component index out of range");
    const int dz = layout_.dz, dy = layout_.dy;
    detail::require(z_sub.size() == static_cast<size_t>(dz + dy),
                    "eval_component: bad subspace dimension");
    const double inv_n = 1.0 / components();
    const Eigen::Map<const Eigen::VectorXd> z(z_sub.data(), dz);
    const Eigen::Map<const Eigen::VectorXd> y(z_sub.data() + dz, dy);

    const Eigen::VectorXd dz0 = z - p_.mu0;
    const Eigen::VectorXd r = y - p_.A * z - p_.b;
    const Eigen::VectorXd qr = q_ * r;
    const Eigen::VectorXd dx = y - x_.row(n).transpose();

    const double inv_s0 = 1.0 / (p_.sigma0 * p_.sigma0);
    const double inv_sx = 1.0 / (p_.sigma_x * p_.sigma_x);
    const double log2pi = std::log(2.0 * std::numbers::pi);

    double value = inv_n * (0.5 * inv_s0 * dz0.squaredNorm() +
                            0.5 * dz * (log2pi + 2.0 * std::log(p_.sigma0)));
    value += 0.5 * r.dot(qr) + 0.5 * (dy * log2pi + log_det_sigma_y_);
    value += 0.5 * inv_sx * dx.squaredNorm() +
             0.5 * dy * (log2pi + 2.0 * std::log(p_.sigma_x));

    Eigen::Map<Eigen::VectorXd> gz(grad.data(), dz);
    Eigen::Map<Eigen::VectorXd> gy(grad.data() + dz, dy);
    gz = inv_n * inv_s0 * dz0 - p_.A.transpose() * qr;
    gy = qr + inv_sx * dx;
    return value;
  }

  bool has_quadratic_metadata() const override { return true; }
  Eigen::MatrixXd component_hessian(int) const override {
    const int dz = layout_.dz, dy = layout_.dy;
    Eigen::MatrixXd h(dz + dy, dz + dy);
    const double inv_s0 = 1.0 / (p_.sigma0 * p_.sigma0);
    const double inv_sx = 1.0 / (p_.sigma_x * p_.sigma_x);
    h.topLeftCorner(dz, dz) =
        (inv_s0 / components()) * Eigen::MatrixXd::Identity(dz, dz) + atq_ * p_.A;
    h.topRightCorner(dz, dy) = -atq_;
    h.bottomLeftCorner(dy, dz) = -atq_.transpose();
    h.bottomRightCorner(dy, dy) = q_ + inv_sx * Eigen::MatrixXd::Identity(dy, dy);
    return h;
  }
  Eigen::VectorXd component_stationary_point(int n) const override {
    const int dz = layout_.dz, dy = layout_.dy;
    const double inv_s0 = 1.0 / (p_.sigma0 * p_.sigma0);
    const double inv_sx = 1.0 / (p_.sigma_x * p_.sigma_x);
    Eigen::VectorXd rhs(dz + dy);
    rhs.head(dz) = (inv_s0 / components()) * p_.mu0 - atq_ * p_.b;
    rhs.tail(dy) = q_ * p_.b + inv_sx * x_.row(n).transpose();
    return component_hessian(n).ldlt().solve(rhs);
  }

  /// Exact posterior moments and log evidence via dense linear algebra.
  PosteriorOracle posterior_oracle() const {
    detail::require(d_ <= 2000, "posterior_oracle: dimension guard exceeded");
    const int dz = layout_.dz, dy = layout_.dy, nb = layout_.n_blocks;
    const double inv_s0 = 1.0 / (p_.sigma0 * p_.sigma0);
    const double inv_sx = 1.0 / (p_.sigma_x * p_.sigma_x);

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d_, d_);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(d_);
    h.topLeftCorner(dz, dz) = inv_s0 * Eigen::MatrixXd::Identity(dz, dz);
    eta.head(dz) = inv_s0 * p_.mu0;
    const Eigen::MatrixXd ataq = atq_ * p_.A;
    for (int n = 0; n < nb; ++n) {
      const int o = layout_.local_offset(n);
      h.topLeftCorner(dz, dz) += ataq;
      h.block(o, 0, dy, dz) = -atq_.transpose();
      h.block(0, o, dz, dy) = -atq_;
      h.block(o, o, dy, dy) = q_ + inv_sx * Eigen::MatrixXd::Identity(dy, dy);
      eta.head(dz) -= atq_ * p_.b;
      eta.segment(o, dy) = q_ * p_.b + inv_sx * x_.row(n).transpose();
    }

    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("posterior_oracle: assembled precision not SPD");
    PosteriorOracle out;
    out.mean = llt.solve(eta);
    out.covariance = llt.solve(Eigen::MatrixXd::Identity(d_, d_));
    const double log_det_h =
        2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double value_at_mode = full_value_gradient(out.mean.data(), nullptr);
    out.log_evidence =
        -value_at_mode + 0.5 * d_ * std::log(2.0 * std::numbers::pi) - 0.5 * log_det_h;
    return out;
  }

 private:
  BlockLayout layout_;
  Params p_;
  Eigen::MatrixXd x_;
  Eigen::MatrixXd q_;    // Sigma_y^{-1}
  Eigen::MatrixXd atq_;  // A^T Sigma_y^{-1}
  double log_det_sigma_y_ = 0.0;
};

/// l_n(z_sub) = 0.5 (z_sub - zbar_n)^T A_n (z_sub - zbar_n), A_n SPD.
class FiniteSumQuadratic : public Target {
 public:
  FiniteSumQuadratic(int d, ComponentStructure comps, std::vector<Eigen::MatrixXd> a,
                     std::vector<Eigen::VectorXd> zbar)
      : Target(d, std::move(comps)), a_(std::move(a)), zbar_(std::move(zbar)) {
    detail::require(a_.size() == comps_.index_sets.size() && zbar_.size() == a_.size(),
                    "FiniteSumQuadratic: per-component data arity mismatch");
    for (size_t n = 0; n < a_.size(); ++n) {
      const auto k = static_cast<Eigen::Index>(comps_.index_sets[n].size());
      detail::require(a_[n].rows() == k && a_[n].cols() == k && zbar_[n].size() == k,
                      "FiniteSumQuadratic: component shape mismatch");
    }
  }

  static FiniteSumQuadratic single(Eigen::MatrixXd a, Eigen::VectorXd zbar) {
    const int d = static_cast<int>(a.rows());
    ComponentStructure cs;
    cs.index_sets.push_back({});
    for (int j = 0; j < d; ++j) cs.index_sets[0].push_back(j);
    std::vector<Eigen::MatrixXd> as{std::move(a)};
    std::vector<Eigen::VectorXd> zs{std::move(zbar)};
    return FiniteSumQuadratic(d, std::move(cs), std::move(as), std::move(zs));
  }

  /// Coordinate-factorized instance: component n touches coordinate n only.
  static FiniteSumQuadratic factorized(const Eigen::VectorXd& curvature,
                                       const Eigen::VectorXd& zbar) {
    const int d = static_cast<int>(curvature.size());
    ComponentStructure cs;
    std::vector<Eigen::MatrixXd> as;
    std::vector<Eigen::VectorXd> zs;
    for (int j = 0; j < d; ++j) {
      cs.index_sets.push_back({j});
      as.push_back(Eigen::MatrixXd::Constant(1, 1, curvature[j]));
      zs.push_back(Eigen::VectorXd::Constant(1, zbar[j]));
    }
    return FiniteSumQuadratic(d, std::move(cs), std::move(as), std::move(zs));
  }

  /// Overlapping pair chain: component n touches {n, (n+1) mod d}; d = N.
  static FiniteSumQuadratic pair_chain(int d, std::uint64_t seed) {
    detail::require(d >= 3, "pair_chain needs d >= 3");
    RngStream rng(derive_seed(seed, 0x9a1c));
    ComponentStructure cs;
    std::vector<Eigen::MatrixXd> as;
    std::vector<Eigen::VectorXd> zs;
    for (int n = 0; n < d; ++n) {
      const int j0 = std::min(n, (n + 1) % d);
      const int j1 = std::max(n, (n + 1) % d);
      cs.index_sets.push_back({j0, j1});
      Eigen::MatrixXd a(2, 2);
      const double c = 0.3 + 0.2 * rng.uniform01();
      a << 2.0, c, c, 1.2;
      as.push_back(a);
      Eigen::VectorXd z(2);
      z << 1.0 + rng.normal() * 0.3, 1.0 + rng.normal() * 0.3;
      zs.push_back(z);
    }
    return FiniteSumQuadratic(d, std::move(cs), std::move(as), std::move(zs));
  }

  /// Hierarchical instance with random well-conditioned SPD blocks.
  static FiniteSumQuadratic random_hierarchical(const BlockLayout& layout,
                                                std::uint64_t seed) {
    RngStream rng(derive_seed(seed, 0x4a2d));
    ComponentStructure cs = ComponentStructure::hierarchical(layout);
    const int k = layout.dz + layout.dy;
    std::vector<Eigen::MatrixXd> as;
    std::vector<Eigen::VectorXd> zs;
    for (int n = 0; n < layout.n_blocks; ++n) {
      Eigen::MatrixXd g(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) g(i, j) = rng.normal();
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
      Eigen::MatrixXd qmat = qr.householderQ();
      Eigen::VectorXd eigs(k);
      for (int i = 0; i < k; ++i) eigs[i] = 0.5 + 1.5 * rng.uniform01();
      as.push_back(qmat * eigs.asDiagonal() * qmat.transpose());
      Eigen::VectorXd z(k);
      for (int i = 0; i < k; ++i) z[i] = rng.normal();
      zs.push_back(z);
    }
    return FiniteSumQuadratic(layout.dim(), std::move(cs), std::move(as), std::move(zs));
  }

  double eval_component(int n, std::span<const double> z_sub,
                        std::span<double> grad) const override {
    detail::require(n >= 0 && n < components(), "component index out of range");
    const auto k = static_cast<Eigen::Index>(component_indices(n).size());
    detail::require(z_sub.size() == static_cast<size_t>(k),
                    "eval_component: bad subspace dimension");
    const Eigen::Map<const Eigen::VectorXd> zv(z_sub.data(), k);
    const Eigen::VectorXd r = zv - zbar_[n];
    Eigen::Map<Eigen::VectorXd> g(grad.data(), k);
    g = a_[n] * r;
    return 0.5 * r.dot(g);
  }

  bool has_quadratic_metadata() const override { return true; }
  Eigen::MatrixXd component_hessian(int n) const override { return a_[n]; }
  Eigen::VectorXd component_stationary_point(int n) const override { return zbar_[n]; }

 private:
  std::vector<Eigen::MatrixXd> a_;
  std::vector<Eigen::VectorXd> zbar_;
};

}  // namespace bbvi
