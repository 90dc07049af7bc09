// Sparse linear-feasibility benchmark: seeded random instances of
// find x with A x = b, ||x||_0 <= r, ||x||_inf <= l, cast as
// min delta_D(x) + (1/2) dist^2(x, C), a solver matrix over them, and
// CSV aggregation of the results.
#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <locale>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "frb/prox.hpp"
#include "frb/solver.hpp"

namespace frb {

/// A terminal objective strictly below this counts as hitting a global
/// minimizer (not just a stationary point) of the feasibility objective.
inline constexpr double kSuccessThreshold = 1e-12;

/// A x = b with A standard Gaussian m x n, b = A * planted for a planted
/// r-sparse solution, r = ceil(m/5), box radius l = 1e6. Regenerable
/// bit-for-bit from (m, n, seed).
struct FeasibilityInstance {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  Eigen::Index r = 0;
  double l = 0.0;
  Eigen::VectorXd planted;
  std::uint64_t seed = 0;
};

namespace detail {

// Uniform in (0, 1]: top 53 bits of the draw, shifted into (0, 1] so the
// Box-Muller log stays finite.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

}  // namespace detail

/// Standard normal deviate by the Box-Muller transform (cosine branch only,
/// two uniform draws per call). Self-contained so the stream is identical
/// across standard libraries, unlike std::normal_distribution.
inline double standard_normal(std::mt19937_64& rng) {
  const double u1 = detail::uniform_unit(rng);
  const double u2 = detail::uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Draw order: A row by row, then the r planted values, then the r support
/// positions by partial Fisher-Yates (64-bit draw modulo the remaining
/// range). Everything comes from the one seeded generator.
inline FeasibilityInstance generate_instance(Eigen::Index m, Eigen::Index n,
                                             std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("generate_instance: m, n must be positive");
  if (m >= n) {
    throw std::invalid_argument("generate_instance: m must be < n, got m=" +
                                std::to_string(m) + ", n=" + std::to_string(n));
  }
  std::mt19937_64 rng(seed);
  FeasibilityInstance inst;
  inst.m = m;
  inst.n = n;
  inst.seed = seed;
  inst.r = (m + 4) / 5;  // ceil(m/5)
  inst.l = 1e6;

  inst.A.resize(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) inst.A(i, j) = standard_normal(rng);
  }

  Eigen::VectorXd values(inst.r);
  for (Eigen::Index i = 0; i < inst.r; ++i) values[i] = standard_normal(rng);
  values = project_box(values, inst.l);  // a no-op for standard normals, kept for fidelity

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  inst.planted = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < inst.r; ++k) {
    const auto span = static_cast<std::uint64_t>(n - k);
    const auto j = k + static_cast<Eigen::Index>(rng() % span);
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(j)]);
    inst.planted[idx[static_cast<std::size_t>(k)]] = values[k];
  }

  inst.b = inst.A * inst.planted;
  return inst;
}

/// f = indicator of D, g = (1/2) dist^2(., C). The A*A^T factorization is
/// shared by value, gradient and smooth-prox oracles.
inline CompositeProblem make_feasibility_problem(const FeasibilityInstance& inst) {
  auto set = std::make_shared<const AffineSet>(inst.A, inst.b);
  CompositeProblem problem;
  problem.dim = inst.n;
  problem.smooth = affine_dist_smooth(std::move(set));
  problem.nonsmooth = sparse_box_indicator({inst.r, inst.l});
  return problem;
}

/// The step sizes of the benchmark protocol: FRB lambda = 0.9999/4,
/// inertial Tseng lambda' = 0.1316 with alpha = 1/8, Douglas-Rachford
/// gamma = 0.22/L. Tracing is off; the benchmark only needs terminal metrics.
inline SolverConfig protocol_config(SolverKind kind) {
  SolverConfig config;
  config.record_trace = false;
  switch (kind) {
    case SolverKind::frb:
      config.lambda = 0.9999 * 0.25;
      break;
    case SolverKind::itseng:
      config.lambda = 0.1316;
      config.inertia_alpha = 0.125;
      break;
    case SolverKind::dr:
      break;  // dr_gamma defaults to 0.22/L
  }
  return config;
}

struct TrialResult {
  SolverKind solver = SolverKind::frb;
  long long iterations = 0;
  double terminal_objective = 0.0;
  bool success = false;  // terminal_objective < kSuccessThreshold
  std::chrono::duration<double> wall_time{0.0};
};

/// Run one solver from the origin on an already-built problem. `seed` is only
/// used to tag propagated errors for reproduction.
inline TrialResult run_trial(const CompositeProblem& problem, std::uint64_t seed,
                             SolverKind kind, const SolverConfig& config) {
  TrialResult result;
  result.solver = kind;
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  try {
    report = run_solver(kind, problem, Eigen::VectorXd::Zero(problem.dim), config);
  } catch (const std::invalid_argument&) {
    throw;  // configuration mistakes are not instance-specific
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(e.what()) + " [instance seed " +
                             std::to_string(seed) + "]");
  }
  result.wall_time = std::chrono::steady_clock::now() - start;
  result.iterations = report.iterations;
  result.terminal_objective = report.terminal_objective;
  result.success = report.terminal_objective < kSuccessThreshold;
  return result;
}

inline TrialResult run_trial(const FeasibilityInstance& inst, SolverKind kind,
                             const SolverConfig& config) {
  return run_trial(make_feasibility_problem(inst), inst.seed, kind, config);
}

struct BenchRow {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  SolverKind solver = SolverKind::frb;
  long long mean_iter_ceiling = 0;
  double fval_min = 0.0;
  int success_count = 0;
  int trials = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

/// The benchmark grid: m in {300, 400, 500} crossed with n in {600..1000}.
inline const std::vector<std::pair<Eigen::Index, Eigen::Index>>& default_bench_sizes() {
  static const std::vector<std::pair<Eigen::Index, Eigen::Index>> sizes = [] {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> s;
    for (Eigen::Index m : {300, 400, 500}) {
      for (Eigen::Index n : {600, 700, 800, 900, 1000}) s.emplace_back(m, n);
    }
    return s;
  }();
  return sizes;
}

/// For each size, trials instances are generated with seeds base_seed + t and
/// every requested solver runs on the same instance from the same origin.
/// Aggregation (sum, min, count) is order-independent.
inline BenchReport run_suite(
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& sizes, int trials,
    const std::vector<SolverKind>& solvers, std::uint64_t base_seed) {
  if (trials < 1) throw std::invalid_argument("run_suite: trials must be >= 1");
  if (solvers.empty()) throw std::invalid_argument("run_suite: no solvers requested");

  BenchReport report;
  for (const auto& [m, n] : sizes) {
    std::vector<long long> iter_sum(solvers.size(), 0);
    std::vector<double> fval_min(solvers.size(), kInfinity);
    std::vector<int> successes(solvers.size(), 0);

    for (int t = 0; t < trials; ++t) {
      const FeasibilityInstance inst =
          generate_instance(m, n, base_seed + static_cast<std::uint64_t>(t));
      const CompositeProblem problem = make_feasibility_problem(inst);
      for (std::size_t s = 0; s < solvers.size(); ++s) {
        const TrialResult r =
            run_trial(problem, inst.seed, solvers[s], protocol_config(solvers[s]));
        iter_sum[s] += r.iterations;
        fval_min[s] = std::min(fval_min[s], r.terminal_objective);
        successes[s] += r.success ? 1 : 0;
      }
    }

    for (std::size_t s = 0; s < solvers.size(); ++s) {
      BenchRow row;
      row.m = m;
      row.n = n;
      row.solver = solvers[s];
      row.mean_iter_ceiling = static_cast<long long>(
          std::ceil(static_cast<double>(iter_sum[s]) / trials));
      row.fval_min = fval_min[s];
      row.success_count = successes[s];
      row.trials = trials;
      report.rows.push_back(row);
    }
  }
  return report;
}

/// CSV: header m,n,solver,iter,fval_min,succ,trials; floats in scientific
/// notation with 7 significant digits.
inline void write_report(const BenchReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report: cannot open " + path);
  out.imbue(std::locale::classic());
  out << "m,n,solver,iter,fval_min,succ,trials\n";
  out.setf(std::ios::scientific);
  out.precision(6);
  for (const BenchRow& row : report.rows) {
    out << row.m << ',' << row.n << ',' << solver_name(row.solver) << ','
        << row.mean_iter_ceiling << ',' << row.fval_min << ',' << row.success_count
        << ',' << row.trials << '\n';
  }
  if (!out) throw std::runtime_error("write_report: write failed for " + path);
}

/// Instances are stored as the triple that regenerates them: "m n seed".
inline void save_instance(const FeasibilityInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_instance: cannot open " + path);
  out << inst.m << ' ' << inst.n << ' ' << inst.seed << '\n';
  if (!out) throw std::runtime_error("save_instance: write failed for " + path);
}

inline FeasibilityInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_instance: cannot open " + path);
  long long m = 0, n = 0;
  std::uint64_t seed = 0;
  if (!(in >> m >> n >> seed)) {
    throw std::runtime_error("load_instance: malformed file " + path +
                             " (expected: m n seed)");
  }
  return generate_instance(m, n, seed);
}

}  // namespace frb
