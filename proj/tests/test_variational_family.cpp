#include "bbvi/variational_family.hpp"

#include <gtest/gtest.h>

#include "bbvi/base_distribution.hpp"
#include "test_util.hpp"

using bbvi::BaseDistribution;
using bbvi::BlockLayout;
using bbvi::EntropyMode;
using bbvi::RngStream;
using bbvi::ScaleMatrix;
using bbvi::VariationalParams;

TEST(BaseDistribution, GaussianMomentsByMonteCarlo) {
  RngStream rng(101);
  const int s = 1000000;
  double sum = 0.0, sum4 = 0.0;
  for (int i = 0; i < s; ++i) {
    const double u = bbvi::sample_base_scalar(BaseDistribution::StandardGaussian, rng);
    sum += u;
    sum4 += u * u * u * u;
  }
  EXPECT_NEAR(sum / s, 0.0, 4.0 / std::sqrt(double(s)));
  // Var(u^4) = E u^8 - 9 = 96 for a standard Gaussian
  EXPECT_NEAR(sum4 / s, 3.0, 4.0 * std::sqrt(96.0 / s));
}

TEST(BaseDistribution, ScaledUniformSupportAndKurtosis) {
  RngStream rng(103);
  const int s = 1000000;
  double sum4 = 0.0;
  for (int i = 0; i < s; ++i) {
    const double u = bbvi::sample_base_scalar(BaseDistribution::ScaledUniform, rng);
    ASSERT_GE(u, -bbvi::kSqrt3);
    ASSERT_LE(u, bbvi::kSqrt3);
    sum4 += u * u * u * u;
  }
  // E u^8 = 3^4/9 = 9, Var(u^4) = 9 - 1.8^2
  EXPECT_NEAR(sum4 / s, 1.8, 4.0 * std::sqrt((9.0 - 1.8 * 1.8) / s));
  EXPECT_DOUBLE_EQ(bbvi::kurtosis(BaseDistribution::ScaledUniform), 1.8);
}

TEST(BaseDistribution, SamplingIsDeterministicGivenTheStream) {
  RngStream a(7), b(7);
  Eigen::VectorXd ua(16), ub(16);
  bbvi::sample_base(BaseDistribution::StandardGaussian, a, {ua.data(), 16});
  bbvi::sample_base(BaseDistribution::StandardGaussian, b, {ub.data(), 16});
  EXPECT_EQ((ua - ub).norm(), 0.0);
}

TEST(Reparameterize, Examples) {
  VariationalParams ident = VariationalParams::standard_init(ScaleMatrix::diagonal(3));
  Eigen::VectorXd u(3);
  u << 0.3, -1.2, 2.0;
  EXPECT_EQ((reparameterize(ident, u) - u).norm(), 0.0);

  VariationalParams p;
  p.m = Eigen::VectorXd::Constant(1, 5.0);
  p.C = ScaleMatrix::diagonal(1, 2.0);
  EXPECT_DOUBLE_EQ(reparameterize(p, Eigen::VectorXd::Constant(1, 1.0))[0], 7.0);

  // bordered example shifted by m = 1
  VariationalParams b;
  b.C = ScaleMatrix::bordered(BlockLayout(1, 1, 2));
  auto v = b.C.values();
  v[b.C.tri_pos(0, 0)] = 2.0;
  v[b.C.border_pos(0, 0, 0)] = 1.0;
  v[b.C.yy_pos(0, 0, 0)] = 3.0;
  v[b.C.border_pos(1, 0, 0)] = -1.0;
  v[b.C.yy_pos(1, 0, 0)] = 4.0;
  b.m = Eigen::VectorXd::Ones(3);
  Eigen::VectorXd u3(3);
  u3 << 1.0, 1.0, 2.0;
  const Eigen::VectorXd z = reparameterize(b, u3);
  EXPECT_DOUBLE_EQ(z[0], 3.0);
  EXPECT_DOUBLE_EQ(z[1], 5.0);
  EXPECT_DOUBLE_EQ(z[2], 8.0);

  EXPECT_THROW(reparameterize(b, Eigen::VectorXd::Zero(4)), std::invalid_argument);
}

TEST(Reparameterize, AffineInTheNoise) {
  RngStream rng(107);
  VariationalParams p;
  p.C = testutil::randomize(ScaleMatrix::bordered(BlockLayout(2, 2, 3)), rng);
  p.m = testutil::random_vector(p.C.dim(), rng);
  const Eigen::VectorXd u = testutil::random_vector(p.dim(), rng);
  const Eigen::VectorXd v = testutil::random_vector(p.dim(), rng);
  const double a = 0.7, b = -1.3;
  const Eigen::VectorXd lhs = reparameterize(p, a * u + b * v);
  const Eigen::VectorXd rhs = a * p.C.matvec(u) + b * p.C.matvec(v) + p.m;
  EXPECT_LE((lhs - rhs).norm(), 1e-12);
}

TEST(Entropy, OptimizationAndReportingModes) {
  VariationalParams ident = VariationalParams::standard_init(ScaleMatrix::diagonal(4));
  EXPECT_DOUBLE_EQ(negative_entropy(ident), 0.0);

  VariationalParams e;
  e.m = Eigen::VectorXd::Zero(1);
  e.C = ScaleMatrix::diagonal(1, std::exp(1.0));
  EXPECT_NEAR(negative_entropy(e), -1.0, 1e-14);

  VariationalParams std2 = VariationalParams::standard_init(ScaleMatrix::diagonal(2));
  EXPECT_NEAR(entropy(std2, EntropyMode::Reporting),
              std::log(2.0 * std::numbers::pi * std::numbers::e), 1e-12);

  VariationalParams bad = std2;
  bad.C.values()[0] = -1.0;
  EXPECT_THROW(negative_entropy(bad), std::domain_error);
}

TEST(Entropy, ConvexAlongDiagonalDirections) {
  RngStream rng(109);
  for (int rep = 0; rep < 200; ++rep) {
    VariationalParams a = VariationalParams::standard_init(ScaleMatrix::diagonal(5));
    VariationalParams b = a;
    VariationalParams mid = a;
    for (int i = 0; i < 5; ++i) {
      const double ca = 0.1 + 3.0 * rng.uniform01();
      const double cb = 0.1 + 3.0 * rng.uniform01();
      a.C.values()[i] = ca;
      b.C.values()[i] = cb;
      mid.C.values()[i] = 0.5 * (ca + cb);
    }
    EXPECT_LE(negative_entropy(mid),
              0.5 * (negative_entropy(a) + negative_entropy(b)) + 1e-12);
  }
}

TEST(ParamDistance, ExamplesAndSymmetry) {
  VariationalParams a, b;
  a.m = Eigen::VectorXd::Zero(1);
  a.C = ScaleMatrix::diagonal(1, 1.0);
  b.m = Eigen::VectorXd::Constant(1, 5.0);
  b.C = ScaleMatrix::diagonal(1, std::sqrt(0.1));

  EXPECT_DOUBLE_EQ(param_distance_sq(a, a), 0.0);
  const double expected = 25.0 + std::pow(1.0 - std::sqrt(0.1), 2);
  EXPECT_NEAR(param_distance_sq(a, b), expected, 1e-12);
  EXPECT_NEAR(expected, 25.46754, 5e-5);
  EXPECT_DOUBLE_EQ(param_distance_sq(a, b), param_distance_sq(b, a));
}

TEST(ParamDistance, MixedStructuresCompareAfterDenseExpansion) {
  RngStream rng(113);
  const BlockLayout layout(2, 1, 2);
  VariationalParams bord;
  bord.C = testutil::randomize(ScaleMatrix::bordered(layout), rng);
  bord.m = testutil::random_vector(layout.dim(), rng);

  VariationalParams full;
  full.C = testutil::randomize(ScaleMatrix::dense_lower(layout.dim()), rng);
  full.m = testutil::random_vector(layout.dim(), rng);

  const double got = param_distance_sq(bord, full);
  const double expected = (bord.m - full.m).squaredNorm() +
                          (bord.C.to_dense() - full.C.to_dense()).squaredNorm();
  EXPECT_NEAR(got, expected, 1e-12);

  VariationalParams small;
  small.m = Eigen::VectorXd::Zero(2);
  small.C = ScaleMatrix::diagonal(2);
  EXPECT_THROW(param_distance_sq(bord, small), std::invalid_argument);
}

TEST(Elbo, ZeroKlWhenVariationalEqualsTarget) {
  const testutil::NormalizedGaussianTarget target(Eigen::VectorXd::Zero(1), 1.0);
  const VariationalParams q = VariationalParams::standard_init(ScaleMatrix::diagonal(1));
  RngStream rng(127);
  const double est = elbo_estimate(q, target, 20000, rng);
  // per-sample variance of l is 1/2
  EXPECT_NEAR(est, 0.0, 4.0 * std::sqrt(0.5 / 20000.0));
}

TEST(Elbo, MatchesClosedFormGaussianKl) {
  const testutil::NormalizedGaussianTarget target(Eigen::VectorXd::Zero(1), 4.0);
  const VariationalParams q = VariationalParams::standard_init(ScaleMatrix::diagonal(1));
  const double kl = 0.5 * (0.25 + std::log(4.0) - 1.0);
  EXPECT_NEAR(kl, 0.31815, 5e-6);
  RngStream rng(131);
  const double est = elbo_estimate(q, target, 200000, rng);
  EXPECT_NEAR(est, -kl, 2e-3);
}

TEST(Elbo, EstimatorMeanApproachesClosedForm) {
  const Eigen::VectorXd mean = Eigen::VectorXd::Constant(3, 1.5);
  const testutil::NormalizedGaussianTarget target(mean, 2.0);
  RngStream rng(137);
  VariationalParams q;
  q.C = testutil::randomize(ScaleMatrix::dense_lower(3), rng);
  q.m = testutil::random_vector(3, rng);
  const double exact =
      -target.exact_energy(q.m, q.C) + entropy(q, EntropyMode::Reporting);
  const double est = elbo_estimate(q, target, 400000, rng);
  EXPECT_NEAR(est, exact, 0.02);
}

TEST(Sampling, EmpiricalCovarianceMatchesCCt) {
  RngStream rng(139);
  VariationalParams p;
  p.C = testutil::randomize(ScaleMatrix::bordered(BlockLayout(1, 1, 2)), rng);
  p.m = testutil::random_vector(3, rng);
  const int s = 200000;
  Eigen::MatrixXd sum2 = Eigen::MatrixXd::Zero(3, 3);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd u(3);
  for (int i = 0; i < s; ++i) {
    bbvi::sample_base(BaseDistribution::StandardGaussian, rng, {u.data(), 3});
    const Eigen::VectorXd z = reparameterize(p, u);
    sum += z;
    sum2 += z * z.transpose();
  }
  const Eigen::VectorXd mean = sum / s;
  const Eigen::MatrixXd cov = sum2 / s - mean * mean.transpose();
  const Eigen::MatrixXd dense = p.C.to_dense();
  EXPECT_LE((cov - dense * dense.transpose()).cwiseAbs().maxCoeff(), 0.05);
}
