#include "bbvi/target.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "test_util.hpp"

using bbvi::BlockLayout;
using bbvi::CorrelatedGaussianHierarchy;
using bbvi::FiniteSumQuadratic;
using bbvi::IsotropicGaussianHierarchy;
using bbvi::RngStream;
using bbvi::Target;

namespace {

// quartic, so quadratic metadata is genuinely unavailable
class QuarticTarget : public Target {
 public:
  QuarticTarget() : Target(1, structure()) {}
  double eval_component(int, std::span<const double> z, std::span<double> g) const override {
    g[0] = 4.0 * z[0] * z[0] * z[0];
    return z[0] * z[0] * z[0] * z[0];
  }

 private:
  static bbvi::ComponentStructure structure() {
    bbvi::ComponentStructure cs;
    cs.index_sets.push_back({0});
    return cs;
  }
};

void check_gradients(const Target& target, RngStream& rng, int points,
                     double rel_tol = 1e-6) {
  for (int rep = 0; rep < points; ++rep) {
    const Eigen::VectorXd z = testutil::random_vector(target.dim(), rng, 1.5);
    Eigen::VectorXd grad(target.dim());
    target.full_value_gradient(z.data(), grad.data());
    const Eigen::VectorXd fd = testutil::fd_gradient(
        [&](const Eigen::VectorXd& p) { return target.full_value_gradient(p.data(), nullptr); },
        z);
    ASSERT_LE((grad - fd).norm(), rel_tol * (1.0 + fd.norm()));
  }
}

CorrelatedGaussianHierarchy small_chg(std::uint64_t seed = 5) {
  const BlockLayout layout(2, 2, 4);
  return CorrelatedGaussianHierarchy::with_synthetic_observations(
      layout, CorrelatedGaussianHierarchy::default_params(layout), seed);
}

}  // namespace

TEST(Targets, FiniteDifferenceGradientChecks) {
  RngStream rng(211);
  check_gradients(IsotropicGaussianHierarchy(BlockLayout(2, 3, 5)), rng, 20);
  check_gradients(small_chg(), rng, 20);
  check_gradients(FiniteSumQuadratic::random_hierarchical(BlockLayout(2, 2, 3), 17), rng, 20);
  check_gradients(FiniteSumQuadratic::pair_chain(8, 3), rng, 20);
}

TEST(Targets, SyntheticComponentAtItsMode) {
  const BlockLayout layout(2, 3, 4);
  const IsotropicGaussianHierarchy target(layout);
  std::vector<double> sub(5, 5.0), grad(5);
  const double value = target.eval_component(1, sub, grad);
  for (double g : grad) EXPECT_EQ(g, 0.0);
  // only normalization constants remain at the mode
  const double expected = 0.5 * (3.0 + 2.0 / 4.0) * std::log(2.0 * std::numbers::pi * 0.1);
  EXPECT_NEAR(value, expected, 1e-12);

  // full value at the joint mode is the log normalizer of N(5, 0.1 I_d)
  const Eigen::VectorXd mode = Eigen::VectorXd::Constant(target.dim(), 5.0);
  EXPECT_NEAR(target.value(mode),
              0.5 * target.dim() * std::log(2.0 * std::numbers::pi * 0.1), 1e-10);

  EXPECT_THROW(target.eval_component(4, sub, grad), std::invalid_argument);
  EXPECT_THROW(target.eval_component(-1, sub, grad), std::invalid_argument);
}

TEST(Targets, QuadraticExample) {
  const auto target =
      FiniteSumQuadratic::single(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2));
  std::vector<double> sub = {3.0, 4.0}, grad(2);
  EXPECT_DOUBLE_EQ(target.eval_component(0, sub, grad), 12.5);
  EXPECT_DOUBLE_EQ(grad[0], 3.0);
  EXPECT_DOUBLE_EQ(grad[1], 4.0);
}

TEST(Targets, ScatteredComponentSumMatchesOracleGradient) {
  const auto target = small_chg();
  const auto oracle = target.posterior_oracle();
  const Eigen::MatrixXd precision = oracle.covariance.inverse();
  RngStream rng(223);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::VectorXd v = testutil::random_vector(target.dim(), rng);
    Eigen::VectorXd grad(target.dim());
    target.full_value_gradient(v.data(), grad.data());
    const Eigen::VectorXd expected = precision * (v - oracle.mean);
    ASSERT_LE((grad - expected).norm(), 1e-8 * (1.0 + expected.norm()));
  }
}

TEST(Targets, PosteriorOracleUninformativeLikelihoodRecoversPrior) {
  const BlockLayout layout(2, 2, 3);
  auto params = CorrelatedGaussianHierarchy::default_params(layout);
  params.sigma_x = 1e8;
  const auto target =
      CorrelatedGaussianHierarchy::with_synthetic_observations(layout, params, 7);
  const auto oracle = target.posterior_oracle();
  EXPECT_LE((oracle.mean.head(2) - params.mu0).norm(), 1e-6);
  const Eigen::VectorXd y_prior_mean = params.A * params.mu0 + params.b;
  for (int n = 0; n < 3; ++n)
    EXPECT_LE((oracle.mean.segment(layout.local_offset(n), 2) - y_prior_mean).norm(),
              1e-6);
}

TEST(Targets, PosteriorOracleTwoVariableExample) {
  const BlockLayout layout(1, 1, 1);
  CorrelatedGaussianHierarchy::Params p;
  p.mu0 = Eigen::VectorXd::Zero(1);
  p.sigma0 = 1.0;
  p.A = Eigen::MatrixXd::Constant(1, 1, 1.0);
  p.b = Eigen::VectorXd::Zero(1);
  p.sigma_y = Eigen::MatrixXd::Identity(1, 1);
  p.sigma_x = 1.0;
  const CorrelatedGaussianHierarchy target(layout, p, Eigen::MatrixXd::Zero(1, 1));
  const auto oracle = target.posterior_oracle();
  const Eigen::MatrixXd precision = oracle.covariance.inverse();
  Eigen::MatrixXd expected(2, 2);
  expected << 2.0, -1.0, -1.0, 2.0;
  EXPECT_LE((precision - expected).norm(), 1e-10);
}

TEST(Targets, PosteriorOracleLogEvidenceMatchesGridQuadrature) {
  const BlockLayout layout(1, 1, 1);
  CorrelatedGaussianHierarchy::Params p;
  p.mu0 = Eigen::VectorXd::Zero(1);
  p.sigma0 = 1.0;
  p.A = Eigen::MatrixXd::Constant(1, 1, 1.0);
  p.b = Eigen::VectorXd::Zero(1);
  p.sigma_y = Eigen::MatrixXd::Identity(1, 1);
  p.sigma_x = 1.0;
  const CorrelatedGaussianHierarchy target(layout, p,
                                           Eigen::MatrixXd::Constant(1, 1, 0.5));

  const int grid = 1601;
  const double lo = -8.0, hi = 8.0;
  const double step = (hi - lo) / (grid - 1);
  double min_neg = std::numeric_limits<double>::infinity();
  std::vector<double> negs;
  negs.reserve(static_cast<size_t>(grid) * grid);
  std::vector<double> pt(2);
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      pt[0] = lo + i * step;
      pt[1] = lo + j * step;
      const double v = target.full_value_gradient(pt.data(), nullptr);
      negs.push_back(v);
      min_neg = std::min(min_neg, v);
    }
  double acc = 0.0;
  for (double v : negs) acc += std::exp(-(v - min_neg));
  const double quadrature = std::log(acc) - min_neg + 2.0 * std::log(step);

  EXPECT_NEAR(target.posterior_oracle().log_evidence, quadrature, 1e-3);
}

TEST(Targets, PosteriorPrecisionVanishesBetweenLocalBlocks) {
  const auto target = small_chg();
  const auto& layout = target.layout();
  const auto oracle = target.posterior_oracle();
  const Eigen::MatrixXd precision = oracle.covariance.inverse();
  for (int a = 0; a < layout.n_blocks; ++a)
    for (int b = 0; b < layout.n_blocks; ++b) {
      if (a == b) continue;
      const Eigen::MatrixXd blk = precision.block(layout.local_offset(a),
                                                  layout.local_offset(b),
                                                  layout.dy, layout.dy);
      ASSERT_LE(blk.cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Targets, SmoothnessConstants) {
  const IsotropicGaussianHierarchy synthetic(BlockLayout(5, 3, 7));
  const auto sc = smoothness_constants(synthetic);
  for (double ln : sc.per_component) EXPECT_DOUBLE_EQ(ln, 10.0);
  EXPECT_DOUBLE_EQ(sc.mu, 10.0);
  EXPECT_DOUBLE_EQ(sc.L, 10.0);

  Eigen::MatrixXd a = Eigen::Vector2d(1.0, 4.0).asDiagonal();
  const auto quad = FiniteSumQuadratic::single(a, Eigen::VectorXd::Zero(2));
  const auto qc = smoothness_constants(quad);
  EXPECT_NEAR(qc.per_component[0], 4.0, 1e-10);
  EXPECT_NEAR(qc.L, 4.0, 1e-10);
  EXPECT_NEAR(qc.mu, 1.0, 1e-10);

  EXPECT_THROW(smoothness_constants(QuarticTarget()), bbvi::UnsupportedOperationError);
}

TEST(Targets, AssembledSpectrumViaDenseAssembly) {
  const auto target = FiniteSumQuadratic::pair_chain(6, 11);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(6, 6);
  for (int n = 0; n < target.components(); ++n) {
    const auto idx = target.component_indices(n);
    const Eigen::MatrixXd hn = target.component_hessian(n);
    for (size_t p = 0; p < idx.size(); ++p)
      for (size_t q = 0; q < idx.size(); ++q) h(idx[p], idx[q]) += hn(p, q);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const auto [l, mu] = target.assembled_spectrum();
  EXPECT_NEAR(l, es.eigenvalues().maxCoeff(), 1e-10);
  EXPECT_NEAR(mu, es.eigenvalues().minCoeff(), 1e-10);
}

TEST(Targets, StationaryPoints) {
  const IsotropicGaussianHierarchy synthetic(BlockLayout(2, 3, 4));
  for (const auto& z : stationary_points(synthetic))
    EXPECT_EQ(z, Eigen::VectorXd::Constant(5, 5.0));

  const auto quad = FiniteSumQuadratic::random_hierarchical(BlockLayout(2, 2, 3), 13);
  const auto points = stationary_points(quad);
  for (int n = 0; n < quad.components(); ++n) {
    std::vector<double> sub(points[n].data(), points[n].data() + points[n].size());
    std::vector<double> grad(sub.size());
    quad.eval_component(n, sub, grad);
    for (double g : grad) ASSERT_LE(std::abs(g), 1e-12);
  }

  const auto chg = small_chg();
  const auto chg_points = stationary_points(chg);
  for (int n = 0; n < chg.components(); ++n) {
    std::vector<double> sub(chg_points[n].data(),
                            chg_points[n].data() + chg_points[n].size());
    std::vector<double> grad(sub.size());
    chg.eval_component(n, sub, grad);
    for (double g : grad) ASSERT_LE(std::abs(g), 1e-10);
  }
}

TEST(Targets, SyntheticOptimumHasVanishingElboGradient) {
  // exact negative ELBO of a diagonal family on the synthetic target:
  // F(m, c) = sum_i [ prec/2 ((m_i - 5)^2 + c_i^2) - log c_i ] + const
  const double prec = 10.0;
  const auto exact_negative_elbo = [&](const Eigen::VectorXd& mc) {
    const int d = static_cast<int>(mc.size()) / 2;
    double f = 0.0;
    for (int i = 0; i < d; ++i) {
      const double m = mc[i], c = mc[d + i];
      f += 0.5 * prec * ((m - 5.0) * (m - 5.0) + c * c) - std::log(c);
    }
    return f;
  };
  const int d = 6;
  Eigen::VectorXd at_opt(2 * d);
  at_opt.head(d).setConstant(5.0);
  at_opt.tail(d).setConstant(std::sqrt(0.1));
  const Eigen::VectorXd grad = testutil::fd_gradient(exact_negative_elbo, at_opt);
  EXPECT_LE(grad.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Targets, ObservationCsvLoader) {
  const auto path = std::filesystem::temp_directory_path() / "bbvi_obs_test.csv";
  {
    std::ofstream os(path);
    os << "0.5,-1.25\n2.0,3.5\n";
  }
  const Eigen::MatrixXd x =
      CorrelatedGaussianHierarchy::load_observations_csv(path.string(), 2);
  EXPECT_EQ(x.rows(), 2);
  EXPECT_DOUBLE_EQ(x(0, 1), -1.25);
  EXPECT_DOUBLE_EQ(x(1, 0), 2.0);
  std::filesystem::remove(path);

  EXPECT_THROW(CorrelatedGaussianHierarchy::load_observations_csv("/nonexistent", 2),
               bbvi::IoError);
}
