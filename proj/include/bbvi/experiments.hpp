#pragma once

#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bbvi/diagnostics.hpp"
#include "bbvi/optimizer.hpp"

namespace bbvi {

enum class Family { MeanField, Structured, FullRank };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::MeanField: return "mean_field";
    case Family::Structured: return "structured";
    case Family::FullRank: return "full_rank";
  }
  return "?";
}

inline Family family_from_string(const std::string& s) {
  if (s == "mean_field") return Family::MeanField;
  if (s == "structured") return Family::Structured;
  if (s == "full_rank") return Family::FullRank;
  throw ConfigError("family", "unknown family: " + s);
}

inline ScaleMatrix family_shape(Family f, const BlockLayout& layout) {
  switch (f) {
    case Family::MeanField: return ScaleMatrix::diagonal(layout.dim());
    case Family::Structured: return ScaleMatrix::bordered(layout);
    case Family::FullRank: return ScaleMatrix::dense_lower(layout.dim());
  }
  throw std::logic_error("unreachable");
}

enum class ExperimentKind { Sweep, Scaling, Variance, Nonconvex, SingleRun };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Sweep: return "sweep";
    case ExperimentKind::Scaling: return "scaling";
    case ExperimentKind::Variance: return "variance";
    case ExperimentKind::Nonconvex: return "nonconvex";
    case ExperimentKind::SingleRun: return "run";
  }
  return "?";
}

inline ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (s == "sweep") return ExperimentKind::Sweep;
  if (s == "scaling") return ExperimentKind::Scaling;
  if (s == "variance") return ExperimentKind::Variance;
  if (s == "nonconvex") return ExperimentKind::Nonconvex;
  if (s == "run") return ExperimentKind::SingleRun;
  throw ConfigError("experiment", "unknown experiment kind: " + s);
}

/// Validated harness configuration. File format: one `key = value` per line
/// with dotted keys and `#` comments; CLI flags override file values.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Sweep;
  std::string target_kind = "synthetic";  // synthetic | quadratic
  int dz = 5;
  int dy = 3;
  std::vector<int> n_list = {100, 200, 300};
  std::vector<Family> families = {Family::MeanField, Family::Structured,
                                  Family::FullRank};
  int stepsize_count = 50;
  double stepsize_low = 1e-6;
  double stepsize_high = 1.0;
  double eps = 1.0;
  int m_samples = 8;
  int t_max = 60000;
  int reps = 3;
  std::uint64_t seed = 0;
  std::string out_dir = "results";
  // single-run settings
  OptimMethod run_method = OptimMethod::ProximalSgd;
  double run_stepsize = 1e-2;
  Family run_family = Family::Structured;
  bool run_realistic_init = false;  // N(0, 1e-2 I) instead of the standard Gaussian
  int eval_every = 100;
  int eval_samples = 1024;
  // variance settings
  int variance_lambdas = 10;
  int variance_outer = 2000;
  // nonconvexity grid
  int grid_nx = 20, grid_ny = 20;
  double x_lo = 0.1, x_hi = 2.0, y_lo = 0.05, y_hi = 1.5, probe_z = 0.5;
  // sweep driver knobs
  bool early_stop = true;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const {
    if (dz < 0) throw ConfigError("target.dz", "dz must be >= 0");
    if (dy < 1) throw ConfigError("target.dy", "dy must be >= 1");
    if (n_list.empty()) throw ConfigError("n", "need at least one n");
    for (int n : n_list)
      if (n < 1) throw ConfigError("n", "n entries must be >= 1");
    if (families.empty()) throw ConfigError("family", "need at least one family");
    if (stepsize_count < 1) throw ConfigError("stepsize.count", "count must be >= 1");
    if (!(stepsize_low > 0.0))
      throw ConfigError("stepsize.low", "grid endpoints must be positive");
    if (!(stepsize_low < stepsize_high))
      throw ConfigError("stepsize.low", "grid endpoints must satisfy low < high");
    if (!(eps > 0.0)) throw ConfigError("eps", "eps must be positive");
    if (m_samples < 1) throw ConfigError("m", "m must be >= 1");
    if (t_max < 1) throw ConfigError("tmax", "tmax must be >= 1");
    if (reps < 1) throw ConfigError("reps", "reps must be >= 1");
    if (run_stepsize <= 0.0) throw ConfigError("run.stepsize", "must be positive");
    if (eval_every < 0) throw ConfigError("eval.every", "must be >= 0");
    if (eval_samples < 1) throw ConfigError("eval.samples", "must be >= 1");
    if (variance_lambdas < 1) throw ConfigError("variance.lambdas", "must be >= 1");
    if (variance_outer < 2) throw ConfigError("variance.outer", "must be >= 2");
    if (grid_nx < 1 || grid_ny < 1) throw ConfigError("nonconvex.grid", "must be >= 1");
    if (target_kind != "synthetic" && target_kind != "quadratic")
      throw ConfigError("target.kind", "unknown target kind: " + target_kind);
  }

  std::vector<double> stepsize_grid() const {
    std::vector<double> grid(stepsize_count);
    if (stepsize_count == 1) {
      grid[0] = stepsize_low;
      return grid;
    }
    const double ratio = stepsize_high / stepsize_low;
    for (int i = 0; i < stepsize_count; ++i)
      grid[i] = stepsize_low * std::pow(ratio, double(i) / (stepsize_count - 1));
    return grid;
  }

  void apply(const std::string& key, const std::string& value);
  static ExperimentConfig from_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

template <class F>
void for_each_csv_token(const std::string& v, F&& f) {
  std::istringstream is(v);
  std::string tok;
  while (std::getline(is, tok, ',')) f(trim(tok));
}

inline std::string fmt(double v) {
  char tmp[32];
  auto [end, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
  return std::string(tmp, end - tmp);
}

}  // namespace detail

inline void ExperimentConfig::apply(const std::string& key, const std::string& value) {
  if (key == "experiment") kind = experiment_kind_from_string(value);
  else if (key == "target.kind") target_kind = value;
  else if (key == "target.dz") dz = static_cast<int>(detail::parse_int(key, value));
  else if (key == "target.dy") dy = static_cast<int>(detail::parse_int(key, value));
  else if (key == "n") {
    n_list.clear();
    detail::for_each_csv_token(value, [&](const std::string& t) {
      n_list.push_back(static_cast<int>(detail::parse_int(key, t)));
    });
  } else if (key == "family") {
    families.clear();
    detail::for_each_csv_token(
        value, [&](const std::string& t) { families.push_back(family_from_string(t)); });
  } else if (key == "stepsize.count")
    stepsize_count = static_cast<int>(detail::parse_int(key, value));
  else if (key == "stepsize.low") stepsize_low = detail::parse_double(key, value);
  else if (key == "stepsize.high") stepsize_high = detail::parse_double(key, value);
  else if (key == "eps") eps = detail::parse_double(key, value);
  else if (key == "m") m_samples = static_cast<int>(detail::parse_int(key, value));
  else if (key == "tmax") t_max = static_cast<int>(detail::parse_int(key, value));
  else if (key == "reps") reps = static_cast<int>(detail::parse_int(key, value));
  else if (key == "seed")
    seed = static_cast<std::uint64_t>(detail::parse_int(key, value));
  else if (key == "out") out_dir = value;
  else if (key == "run.method") {
    if (value == "proximal_sgd") run_method = OptimMethod::ProximalSgd;
    else if (value == "sgd") run_method = OptimMethod::Sgd;
    else if (value == "adam") run_method = OptimMethod::Adam;
    else throw ConfigError(key, "unknown method: " + value);
  } else if (key == "run.stepsize") run_stepsize = detail::parse_double(key, value);
  else if (key == "run.family") run_family = family_from_string(value);
  else if (key == "run.init") {
    if (value == "standard") run_realistic_init = false;
    else if (value == "realistic") run_realistic_init = true;
    else throw ConfigError(key, "expected standard or realistic, got " + value);
  }
  else if (key == "eval.every")
    eval_every = static_cast<int>(detail::parse_int(key, value));
  else if (key == "eval.samples")
    eval_samples = static_cast<int>(detail::parse_int(key, value));
  else if (key == "variance.lambdas")
    variance_lambdas = static_cast<int>(detail::parse_int(key, value));
  else if (key == "variance.outer")
    variance_outer = static_cast<int>(detail::parse_int(key, value));
  else if (key == "nonconvex.nx") grid_nx = static_cast<int>(detail::parse_int(key, value));
  else if (key == "nonconvex.ny") grid_ny = static_cast<int>(detail::parse_int(key, value));
  else if (key == "nonconvex.x_lo") x_lo = detail::parse_double(key, value);
  else if (key == "nonconvex.x_hi") x_hi = detail::parse_double(key, value);
  else if (key == "nonconvex.y_lo") y_lo = detail::parse_double(key, value);
  else if (key == "nonconvex.y_hi") y_hi = detail::parse_double(key, value);
  else if (key == "nonconvex.z") probe_z = detail::parse_double(key, value);
  else if (key == "sweep.early_stop")
    early_stop = detail::parse_int(key, value) != 0;
  else if (key == "threads") threads = static_cast<int>(detail::parse_int(key, value));
  else throw ConfigError(key, "unknown configuration key: " + key);
}

inline ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, "expected `key = value`");
    cfg.apply(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return cfg;
}

inline ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

struct SweepRow {
  Family family;
  int n = 0;
  double stepsize = 0.0;
  long t_hit = 0;  // sentinel = t_max when unhit
  bool hit = false;
  bool best = false;
};

struct ScalingRow {
  Family family;
  int n = 0;
  double best_stepsize = 0.0;
  long t_best = 0;
};

struct VarianceRow {
  Family family;
  int n = 0;
  int m_samples = 0;
  int d_star = 0;
  double k_phi = 0.0;
  double empirical = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;
};

struct NonconvexRow {
  double x, y, z, energy, det, min_eig;
};

struct ResultSet {
  ExperimentKind kind = ExperimentKind::Sweep;
  std::vector<SweepRow> sweep;
  std::vector<ScalingRow> scaling;
  std::vector<VarianceRow> variance;
  std::vector<NonconvexRow> nonconvex;
  RunTrace trace;
};

namespace detail {

template <class F>
void parallel_for(int count, int threads, F&& f) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (int w = 0; w < threads; ++w)
    workers.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) f(i);
    });
  for (auto& t : workers) t.join();
}

}  // namespace detail

/// Exact posterior of the isotropic synthetic target expressed in a family's
/// own storage pattern.
inline VariationalParams synthetic_optimum(const IsotropicGaussianHierarchy& target,
                                           Family family) {
  return VariationalParams::diagonal_gaussian(target.posterior_mean(),
                                              target.posterior_scale_diag(),
                                              family_shape(family, target.layout()));
}

struct SweepCellOutcome {
  long t_hit = 0;
  bool hit = false;
};

/// One (family, n, stepsize) cell: R proximal-SGD replications advanced in
/// lockstep, their distances averaged each iteration, and the paper's
/// two-sided threshold applied to the averaged trace.
///
/// When early stopping is enabled, a cell is abandoned as unhit once its
/// averaged distance is both far from eps and provably too slow: block
/// minima over 2000-iteration windows must either stall (flat to within
/// 0.5%) or project, geometrically and with a 3x margin, above eps at t_max.
/// Geometric projection is conservative because the averaged distance of a
/// fixed-stepsize run decays at a non-increasing rate.
inline SweepCellOutcome run_sweep_cell(const ExperimentConfig& cfg,
                                       const IsotropicGaussianHierarchy& target,
                                       Family family, double stepsize,
                                       std::uint64_t cell_index) {
  OptimizerConfig ocfg;
  ocfg.method = OptimMethod::ProximalSgd;
  ocfg.stepsize = stepsize;
  ocfg.samples_per_step = cfg.m_samples;
  ocfg.max_iters = cfg.t_max;

  const VariationalParams lambda0 =
      VariationalParams::standard_init(family_shape(family, target.layout()));
  const VariationalParams optimum = synthetic_optimum(target, family);

  std::vector<OptimRunner> reps;
  reps.reserve(cfg.reps);
  for (int r = 0; r < cfg.reps; ++r)
    reps.emplace_back(target, lambda0, ocfg, &optimum,
                      derive_seed(cfg.seed, cell_index, static_cast<std::uint64_t>(r)));

  const double eps = cfg.eps;
  constexpr int kBlock = 2000;
  constexpr double kFlatRatio = 0.995;
  constexpr double kMargin = 3.0;

  double prev_mean = 0.0;
  for (const auto& r : reps) prev_mean += r.distance();
  prev_mean /= cfg.reps;
  if (prev_mean <= eps) return {0, true};

  double prev_block_min = std::numeric_limits<double>::infinity();
  double block_min = std::numeric_limits<double>::infinity();

  for (int t = 1; t <= cfg.t_max; ++t) {
    double mean = 0.0;
    bool dead = false;
    for (auto& r : reps) {
      if (!r.step()) dead = true;
      mean += r.distance();
    }
    mean /= cfg.reps;
    if (dead || !std::isfinite(mean)) return {cfg.t_max, false};
    if (prev_mean > eps && mean <= eps) return {t, true};
    prev_mean = mean;

    if (cfg.early_stop) {
      block_min = std::min(block_min, mean);
      if (t % kBlock == 0) {
        if (std::isfinite(prev_block_min) && block_min > kMargin * eps) {
          const double ratio = block_min / prev_block_min;
          if (ratio >= kFlatRatio) return {cfg.t_max, false};
          const double blocks_left = double(cfg.t_max - t) / kBlock;
          if (block_min * std::pow(ratio, blocks_left) > kMargin * eps)
            return {cfg.t_max, false};
        }
        prev_block_min = block_min;
        block_min = std::numeric_limits<double>::infinity();
      }
    }
  }
  return {cfg.t_max, false};
}

inline std::vector<SweepRow> execute_sweep(const ExperimentConfig& cfg) {
  const std::vector<double> grid = cfg.stepsize_grid();
  struct Cell {
    Family family;
    int n;
    double gamma;
    std::uint64_t index;
  };
  std::vector<Cell> cells;
  std::uint64_t index = 0;
  for (Family f : cfg.families)
    for (int n : cfg.n_list)
      for (double g : grid) cells.push_back({f, n, g, index++});

  std::vector<SweepRow> rows(cells.size());
  detail::parallel_for(static_cast<int>(cells.size()), cfg.threads, [&](int i) {
    const Cell& c = cells[i];
    SweepRow row;
    row.family = c.family;
    row.n = c.n;
    row.stepsize = c.gamma;
    try {
      const IsotropicGaussianHierarchy target(BlockLayout(cfg.dz, cfg.dy, c.n));
      const SweepCellOutcome out =
          run_sweep_cell(cfg, target, c.family, c.gamma, c.index);
      row.t_hit = out.hit ? out.t_hit : cfg.t_max;
      row.hit = out.hit;
    } catch (const std::exception&) {
      row.t_hit = cfg.t_max;  // recorded as a diverged row, sweep continues
      row.hit = false;
    }
    rows[i] = row;
  });

  // mark the best stepsize per (family, n); ties resolve to the smaller gamma
  for (Family f : cfg.families)
    for (int n : cfg.n_list) {
      SweepRow* best = nullptr;
      for (auto& r : rows)
        if (r.family == f && r.n == n && r.hit)
          if (!best || r.t_hit < best->t_hit) best = &r;
      if (best) best->best = true;
    }

  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    const std::string fa = to_string(a.family), fb = to_string(b.family);
    return std::tie(fa, a.n, a.stepsize) < std::tie(fb, b.n, b.stepsize);
  });
  return rows;
}

inline std::vector<ScalingRow> scaling_from_sweep(const ExperimentConfig& cfg,
                                                  const std::vector<SweepRow>& sweep) {
  std::vector<ScalingRow> rows;
  for (Family f : cfg.families)
    for (int n : cfg.n_list) {
      ScalingRow row{f, n, 0.0, cfg.t_max};
      bool found = false;
      for (const auto& r : sweep) {
        if (r.family != f || r.n != n || !r.hit) continue;
        if (!found || r.t_hit < row.t_best ||
            (r.t_hit == row.t_best && r.stepsize < row.best_stepsize)) {
          row.t_best = r.t_hit;
          row.best_stepsize = r.stepsize;
          found = true;
        }
      }
      rows.push_back(row);
    }
  std::sort(rows.begin(), rows.end(), [](const ScalingRow& a, const ScalingRow& b) {
    const std::string fa = to_string(a.family), fb = to_string(b.family);
    return std::tie(fa, a.n) < std::tie(fb, b.n);
  });
  return rows;
}

/// Random feasible lambda for variance probes: moderate location offsets,
/// diagonal safely inside the domain, small stored off-diagonals.
inline VariationalParams random_feasible_params(ScaleMatrix shape, RngStream& rng) {
  VariationalParams p = VariationalParams::standard_init(std::move(shape));
  for (int i = 0; i < p.m.size(); ++i) p.m[i] = rng.normal();
  auto vals = p.C.values();
  p.C.for_each_entry([&](int i, int j, size_t pos) {
    vals[pos] = (i == j) ? 0.3 + 0.9 * rng.uniform01() : 0.2 * rng.normal();
  });
  return p;
}

inline std::vector<VarianceRow> execute_variance(const ExperimentConfig& cfg) {
  struct Cell {
    Family family;
    int n;
    int draw;
    std::uint64_t index;
  };
  std::vector<Cell> cells;
  std::uint64_t index = 0;
  for (Family f : cfg.families)
    for (int n : cfg.n_list)
      for (int k = 0; k < cfg.variance_lambdas; ++k) cells.push_back({f, n, k, index++});

  std::vector<VarianceRow> rows(cells.size());
  detail::parallel_for(static_cast<int>(cells.size()), cfg.threads, [&](int i) {
    const Cell& c = cells[i];
    const BlockLayout layout(cfg.dz, cfg.dy, c.n);
    std::unique_ptr<Target> target;
    if (cfg.target_kind == "quadratic")
      target = std::make_unique<FiniteSumQuadratic>(FiniteSumQuadratic::random_hierarchical(
          layout, derive_seed(cfg.seed, 0x1c, static_cast<std::uint64_t>(c.n))));
    else
      target = std::make_unique<IsotropicGaussianHierarchy>(layout);
    RngStream rng(derive_seed(cfg.seed, 0x1a, c.index));
    const VariationalParams params =
        random_feasible_params(family_shape(c.family, layout), rng);
    const VarianceReport rep =
        variance_report(params, *target, cfg.m_samples, cfg.variance_outer,
                        derive_seed(cfg.seed, 0x1b, c.index),
                        BaseDistribution::StandardGaussian);
    rows[i] = {c.family,       c.n,
               cfg.m_samples,  rep.d_star,
               rep.k_phi,      rep.empirical.estimate,
               rep.empirical.stderr_jackknife, rep.bound};
  });
  std::sort(rows.begin(), rows.end(), [](const VarianceRow& a, const VarianceRow& b) {
    const std::string fa = to_string(a.family), fb = to_string(b.family);
    return std::tie(fa, a.n, a.empirical) < std::tie(fb, b.n, b.empirical);
  });
  return rows;
}

inline std::vector<NonconvexRow> execute_nonconvex(const ExperimentConfig& cfg) {
  std::vector<NonconvexRow> rows;
  rows.reserve(static_cast<size_t>(cfg.grid_nx) * cfg.grid_ny);
  for (int ix = 0; ix < cfg.grid_nx; ++ix)
    for (int iy = 0; iy < cfg.grid_ny; ++iy) {
      const double x =
          cfg.grid_nx == 1
              ? cfg.x_lo
              : cfg.x_lo + (cfg.x_hi - cfg.x_lo) * ix / double(cfg.grid_nx - 1);
      const double y =
          cfg.grid_ny == 1
              ? cfg.y_lo
              : cfg.y_lo + (cfg.y_hi - cfg.y_lo) * iy / double(cfg.grid_ny - 1);
      const NonconvexityProbe p = nonconvexity_probe(x, y, cfg.probe_z);
      rows.push_back({x, y, cfg.probe_z, p.energy, p.det, p.min_eigenvalue});
    }
  return rows;
}

inline RunTrace execute_single_run(const ExperimentConfig& cfg) {
  const int n = cfg.n_list.front();
  const IsotropicGaussianHierarchy target(BlockLayout(cfg.dz, cfg.dy, n));
  OptimizerConfig ocfg;
  ocfg.method = cfg.run_method;
  ocfg.stepsize = cfg.run_stepsize;
  ocfg.samples_per_step = cfg.m_samples;
  ocfg.max_iters = cfg.t_max;
  ocfg.eval_every = cfg.eval_every;
  ocfg.eval_samples = cfg.eval_samples;
  const ScaleMatrix shape = family_shape(cfg.run_family, target.layout());
  const VariationalParams lambda0 =
      cfg.run_realistic_init ? VariationalParams::scaled_init(shape, 0.1)
                             : VariationalParams::standard_init(shape);
  const VariationalParams optimum = synthetic_optimum(target, cfg.run_family);
  return run(target, lambda0, ocfg, &optimum, derive_seed(cfg.seed, 0x50, 0));
}

inline ResultSet execute_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultSet out;
  out.kind = cfg.kind;
  switch (cfg.kind) {
    case ExperimentKind::Sweep:
      out.sweep = execute_sweep(cfg);
      break;
    case ExperimentKind::Scaling:
      out.sweep = execute_sweep(cfg);
      out.scaling = scaling_from_sweep(cfg, out.sweep);
      break;
    case ExperimentKind::Variance:
      out.variance = execute_variance(cfg);
      break;
    case ExperimentKind::Nonconvex:
      out.nonconvex = execute_nonconvex(cfg);
      break;
    case ExperimentKind::SingleRun:
      out.trace = execute_single_run(cfg);
      break;
  }
  return out;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::trunc);
  if (!os) throw IoError("cannot write output file: " + p.string());
  return os;
}

}  // namespace detail

/// One CSV per experiment kind, schemas fixed, rows already sorted;
/// overwrites are idempotent and re-runs with one seed are byte-identical.
inline void write_results(const ResultSet& results, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  if (results.kind == ExperimentKind::Sweep || results.kind == ExperimentKind::Scaling) {
    auto os = detail::open_out(fs::path(out_dir) / "sweep.csv");
    os << "family,n,stepsize,T_hit,hit\n";
    for (const auto& r : results.sweep)
      os << to_string(r.family) << ',' << r.n << ',' << detail::fmt(r.stepsize) << ','
         << r.t_hit << ',' << (r.hit ? 1 : 0) << '\n';
  }
  if (results.kind == ExperimentKind::Scaling) {
    auto os = detail::open_out(fs::path(out_dir) / "scaling.csv");
    os << "family,n,best_stepsize,T_best\n";
    for (const auto& r : results.scaling)
      os << to_string(r.family) << ',' << r.n << ',' << detail::fmt(r.best_stepsize)
         << ',' << r.t_best << '\n';
  }
  if (results.kind == ExperimentKind::Variance) {
    auto os = detail::open_out(fs::path(out_dir) / "variance.csv");
    os << "family,n,M,d_star,k_phi,empirical,stderr,bound\n";
    for (const auto& r : results.variance)
      os << to_string(r.family) << ',' << r.n << ',' << r.m_samples << ',' << r.d_star
         << ',' << detail::fmt(r.k_phi) << ',' << detail::fmt(r.empirical) << ','
         << detail::fmt(r.stderr_) << ',' << detail::fmt(r.bound) << '\n';
  }
  if (results.kind == ExperimentKind::Nonconvex) {
    auto os = detail::open_out(fs::path(out_dir) / "nonconvex.csv");
    os << "x,y,z,energy,det,min_eig\n";
    for (const auto& r : results.nonconvex)
      os << detail::fmt(r.x) << ',' << detail::fmt(r.y) << ',' << detail::fmt(r.z) << ','
         << detail::fmt(r.energy) << ',' << detail::fmt(r.det) << ','
         << detail::fmt(r.min_eig) << '\n';
  }
  if (results.kind == ExperimentKind::SingleRun) {
    auto os = detail::open_out(fs::path(out_dir) / "trace.csv");
    write_trace_csv(results.trace, os);
  }
}

}  // namespace bbvi
