#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "bbvi/gradient_estimator.hpp"
#include "bbvi/variational_family.hpp"

namespace bbvi {

enum class OptimMethod { ProximalSgd, Sgd, Adam };

inline const char* to_string(OptimMethod m) {
  switch (m) {
    case OptimMethod::ProximalSgd: return "proximal_sgd";
    case OptimMethod::Sgd: return "sgd";
    case OptimMethod::Adam: return "adam";
  }
  return "?";
}

struct OptimizerConfig {
  OptimMethod method = OptimMethod::ProximalSgd;
  double stepsize = 1e-2;
  int samples_per_step = 8;
  int max_iters = 1000;
  int eval_every = 0;  // 0 disables ELBO recording
  int eval_samples = 256;
  double beta1 = 0.9, beta2 = 0.999, eps_adam = 1e-8;
  BaseDistribution base = BaseDistribution::StandardGaussian;
  double divergence_threshold = 1e12;

  void validate() const {
    detail::require(stepsize > 0.0, "stepsize must be positive");
    detail::require(samples_per_step >= 1, "samples per step must be >= 1");
    detail::require(max_iters >= 0, "max iterations must be >= 0");
    detail::require(eval_every >= 0, "eval cadence must be >= 0");
  }
};

/// Per-iteration record of one seeded run.
struct RunTrace {
  std::vector<double> r;                      // distance to optimum, when known
  std::vector<std::pair<int, double>> elbo;   // (iteration, estimate) at cadence
  bool diverged = false;
  int iterations = 0;
};

/// Energy gradient plus the analytic entropy gradient dh/dC_ii = -1/C_ii,
/// for the sgd/adam modes that step on the full negative-ELBO gradient.
inline GradientEstimate full_elbo_gradient(
    const VariationalParams& params, const Target& target, int num_samples,
    RngStream& rng, BaseDistribution base = BaseDistribution::StandardGaussian) {
  detail::require_domain(params.C.positive_diagonal(),
                         "full_elbo_gradient: C outside the feasible domain");
  GradientEstimate g = estimate_energy_gradient(params, target, num_samples, rng, base);
  const auto cvals = params.C.values();
  auto gvals = g.grad_C.values();
  params.C.for_each_diagonal(
      [&](int, size_t pos) { gvals[pos] += -1.0 / cvals[pos]; });
  return g;
}

/// One optimization run as a stepping object so that sweeps can drive
/// several replications in lockstep.
class OptimRunner {
 public:
  OptimRunner(const Target& target, VariationalParams initial, OptimizerConfig config,
              const VariationalParams* optimum, std::uint64_t seed)
      : target_(&target),
        params_(std::move(initial)),
        cfg_(config),
        rng_(seed),
        estimator_(target, config.base),
        grad_(GradientEstimate::zeros_like(params_)) {
    cfg_.validate();
    detail::require(params_.dim() == target.dim(), "run: dimension mismatch");
    if (optimum) {
      optimum_ = *optimum;
      detail::require(optimum_->dim() == params_.dim(), "run: optimum shape mismatch");
    }
    if (cfg_.method == OptimMethod::Adam) {
      adam_m1_m_ = Eigen::VectorXd::Zero(params_.dim());
      adam_m2_m_ = Eigen::VectorXd::Zero(params_.dim());
      adam_m1_c_.assign(params_.C.stored_count(), 0.0);
      adam_m2_c_.assign(params_.C.stored_count(), 0.0);
    }
  }

  bool diverged() const { return diverged_; }
  int iteration() const { return iter_; }
  const VariationalParams& params() const { return params_; }
  RngStream& rng() { return rng_; }

  double distance() const {
    return optimum_ ? param_distance_sq(params_, *optimum_)
                    : std::numeric_limits<double>::quiet_NaN();
  }

  /// One update; returns false once the run has diverged.
  bool step() {
    if (diverged_) return false;
    ++iter_;

    if (cfg_.method != OptimMethod::ProximalSgd && !params_.C.positive_diagonal()) {
      diverged_ = true;  // the entropy term is +infinity outside the domain
      return false;
    }
    estimator_.estimate(params_, cfg_.samples_per_step, rng_, grad_);
    if (cfg_.method != OptimMethod::ProximalSgd) {
      const auto cvals = params_.C.values();
      auto gvals = grad_.grad_C.values();
      params_.C.for_each_diagonal(
          [&](int, size_t pos) { gvals[pos] += -1.0 / cvals[pos]; });
    }

    const double gamma = cfg_.stepsize;
    auto cvals = params_.C.values();
    const auto gc = grad_.grad_C.values();
    switch (cfg_.method) {
      case OptimMethod::ProximalSgd:
        params_.m.noalias() -= gamma * grad_.grad_m;
        for (size_t i = 0; i < cvals.size(); ++i) cvals[i] -= gamma * gc[i];
        params_.C.prox_diagonal_inplace(gamma);
        break;
      case OptimMethod::Sgd:
        params_.m.noalias() -= gamma * grad_.grad_m;
        for (size_t i = 0; i < cvals.size(); ++i) cvals[i] -= gamma * gc[i];
        break;
      case OptimMethod::Adam: {
        ++adam_t_;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, adam_t_);
        const double bc2 = 1.0 - std::pow(cfg_.beta2, adam_t_);
        for (int i = 0; i < params_.m.size(); ++i) {
          const double g = grad_.grad_m[i];
          adam_m1_m_[i] = cfg_.beta1 * adam_m1_m_[i] + (1.0 - cfg_.beta1) * g;
          adam_m2_m_[i] = cfg_.beta2 * adam_m2_m_[i] + (1.0 - cfg_.beta2) * g * g;
          params_.m[i] -= gamma * (adam_m1_m_[i] / bc1) /
                          (std::sqrt(adam_m2_m_[i] / bc2) + cfg_.eps_adam);
        }
        for (size_t i = 0; i < cvals.size(); ++i) {
          const double g = gc[i];
          adam_m1_c_[i] = cfg_.beta1 * adam_m1_c_[i] + (1.0 - cfg_.beta1) * g;
          adam_m2_c_[i] = cfg_.beta2 * adam_m2_c_[i] + (1.0 - cfg_.beta2) * g * g;
          cvals[i] -= gamma * (adam_m1_c_[i] / bc1) /
                      (std::sqrt(adam_m2_c_[i] / bc2) + cfg_.eps_adam);
        }
        break;
      }
    }

    if (optimum_) {
      const double r = distance();
      if (!std::isfinite(r) || r > cfg_.divergence_threshold) diverged_ = true;
    } else if (iter_ % 64 == 0) {
      if (!params_.m.allFinite()) diverged_ = true;
      for (double v : cvals)
        if (!std::isfinite(v)) diverged_ = true;
    }
    return !diverged_;
  }

 private:
  const Target* target_;
  VariationalParams params_;
  OptimizerConfig cfg_;
  RngStream rng_;
  EnergyGradientEstimator estimator_;
  GradientEstimate grad_;
  std::optional<VariationalParams> optimum_;
  bool diverged_ = false;
  int iter_ = 0;
  long adam_t_ = 0;
  Eigen::VectorXd adam_m1_m_, adam_m2_m_;
  std::vector<double> adam_m1_c_, adam_m2_c_;
};

/// Executes max_iters steps (or stops at divergence), recording r_t after
/// every full update and ELBO estimates at the configured cadence.
inline RunTrace run(const Target& target, const VariationalParams& initial,
                    const OptimizerConfig& config, const VariationalParams* optimum,
                    std::uint64_t seed) {
  OptimRunner runner(target, initial, config, optimum, derive_seed(seed, 0x5eed));
  RunTrace trace;
  const bool track = optimum != nullptr;
  if (track) trace.r.push_back(runner.distance());
  auto record_elbo = [&](int t) {
    if (config.eval_every <= 0 || t % config.eval_every != 0) return;
    RngStream eval_rng(derive_seed(seed, 0xe1b0, static_cast<std::uint64_t>(t)));
    trace.elbo.emplace_back(
        t, elbo_estimate(runner.params(), target, config.eval_samples, eval_rng,
                         config.base));
  };
  record_elbo(0);
  for (int t = 1; t <= config.max_iters; ++t) {
    if (!runner.step()) break;
    if (track) trace.r.push_back(runner.distance());
    record_elbo(t);
  }
  trace.diverged = runner.diverged();
  trace.iterations = runner.iteration();
  return trace;
}

/// Smallest T with r_{T-1} > eps and r_T <= eps on a replication-averaged
/// trace; 0 when already inside at the start, nullopt when never hit.
inline std::optional<int> first_hit_time(std::span<const double> mean_trace,
                                         double eps) {
  detail::require(!mean_trace.empty(), "first_hit_time: empty trace");
  detail::require(eps > 0.0, "first_hit_time: eps must be positive");
  if (mean_trace[0] <= eps) return 0;
  for (size_t t = 1; t < mean_trace.size(); ++t)
    if (mean_trace[t - 1] > eps && mean_trace[t] <= eps) return static_cast<int>(t);
  return std::nullopt;
}

inline void write_trace_csv(const RunTrace& trace, std::ostream& os) {
  os << "iteration,r,elbo\n";
  size_t e = 0;
  const size_t rows = trace.r.empty() ? static_cast<size_t>(trace.iterations) + 1
                                      : trace.r.size();
  for (size_t t = 0; t < rows; ++t) {
    os << t << ',';
    if (t < trace.r.size()) os << trace.r[t];
    os << ',';
    if (e < trace.elbo.size() && trace.elbo[e].first == static_cast<int>(t)) {
      os << trace.elbo[e].second;
      ++e;
    }
    os << '\n';
  }
}

}  // namespace bbvi
