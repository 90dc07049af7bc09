// Merit function H(x, y) = f(x) + g(x) + ||x - y||^2 / (4 lambda) for the
// forward-reflected-backward iteration, the subgradient residual pair it
// admits at each step, certificate checks over recorded traces, and an
// empirical linear-rate fit.
#pragma once

#include <cmath>
#include <fstream>
#include <locale>
#include <string>
#include <utility>
#include <vector>

#include "frb/problem.hpp"

namespace frb {

/// One per-iteration telemetry record. Pairs z_k = (x_{k+1}, x_k) carry the
/// product norm, so z_gap^2 = ||x_{k+1} - x_k||^2 + ||x_k - x_{k-1}||^2.
/// Traces start with a baseline sample at k = -1 holding H(z_{-1}) so the
/// descent check covers the first iteration. residual_norm is filled by FRB
/// runs only (NaN otherwise).
struct MeritSample {
  long long k = 0;
  double h_value = 0.0;
  double z_gap = 0.0;
  double residual_norm = 0.0;
  double objective = 0.0;
};

struct SolverTrace {
  std::vector<MeritSample> samples;
  /// Iterate snapshots, one per sample; empty unless the run recorded them.
  std::vector<Eigen::VectorXd> iterates;
  double lambda = 0.0;
  double lipschitz_L = 0.0;

  /// Descent modulus 1/(4 lambda) - L.
  double m1() const { return 1.0 / (4.0 * lambda) - lipschitz_L; }
  /// Residual modulus sqrt(2) (L + 2/lambda).
  double m2() const { return std::sqrt(2.0) * (lipschitz_L + 2.0 / lambda); }
};

inline double merit_value(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                          double lambda, const CompositeProblem& problem) {
  if (!(lambda > 0.0)) throw std::invalid_argument("merit_value: lambda must be positive");
  if (y.size() != x.size()) {
    throw std::invalid_argument("merit_value: x has length " + std::to_string(x.size()) +
                                ", y has length " + std::to_string(y.size()));
  }
  const double fg = evaluate_objective(problem, x);
  if (fg == kInfinity) return kInfinity;
  return fg + (x - y).squaredNorm() / (4.0 * lambda);
}

/// Residual pair (A, B) from explicit gradient values; solvers call this with
/// their gradient cache so tracing adds no oracle evaluations.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> frb_residual_from_gradients(
    const Eigen::VectorXd& x_next, const Eigen::VectorXd& x_curr,
    const Eigen::VectorXd& x_prev, const Eigen::VectorXd& grad_next,
    const Eigen::VectorXd& grad_curr, const Eigen::VectorXd& grad_prev,
    double lambda) {
  (void)x_prev;
  Eigen::VectorXd p =
      (x_curr - x_next) / lambda + grad_next - 2.0 * grad_curr + grad_prev;
  Eigen::VectorXd a = p + (x_next - x_curr) / (2.0 * lambda);
  Eigen::VectorXd b = (x_curr - x_next) / (2.0 * lambda);
  return {std::move(a), std::move(b)};
}

/// Subgradient of H at z_k = (x_next, x_curr), valid when x_next was produced
/// by an FRB step of size lambda from (x_curr, x_prev). Evaluates the smooth
/// gradient three times; inside solver loops prefer the cached variant.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> frb_residual(
    const Eigen::VectorXd& x_next, const Eigen::VectorXd& x_curr,
    const Eigen::VectorXd& x_prev, double lambda, const CompositeProblem& problem) {
  if (x_next.size() != problem.dim || x_curr.size() != problem.dim ||
      x_prev.size() != problem.dim) {
    throw std::invalid_argument("frb_residual: vector length does not match problem.dim");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("frb_residual: lambda must be positive");
  return frb_residual_from_gradients(x_next, x_curr, x_prev,
                                     problem.smooth.gradient(x_next),
                                     problem.smooth.gradient(x_curr),
                                     problem.smooth.gradient(x_prev), lambda);
}

/// Iterations k violating M1 ||z_k - z_{k-1}||^2 <= H(z_{k-1}) - H(z_k),
/// with slack 1e-8 (1 + |H(z_{k-1})|) absorbing accumulated rounding.
/// Empty on a step-size-rule-compliant FRB run.
inline std::vector<long long> check_descent(const SolverTrace& trace) {
  std::vector<long long> violations;
  const double m1 = trace.m1();
  for (std::size_t i = 1; i < trace.samples.size(); ++i) {
    const MeritSample& prev = trace.samples[i - 1];
    const MeritSample& cur = trace.samples[i];
    const double slack = 1e-8 * (1.0 + std::abs(prev.h_value));
    if (m1 * cur.z_gap * cur.z_gap > prev.h_value - cur.h_value + slack) {
      violations.push_back(cur.k);
    }
  }
  return violations;
}

/// Iterations k violating ||(A_{k+1}, B_{k+1})|| <= M2 ||z_k - z_{k-1}||,
/// with absolute slack 1e-10. Holds for any positive step size.
inline std::vector<long long> check_residual_bound(const SolverTrace& trace) {
  std::vector<long long> violations;
  const double m2 = trace.m2();
  for (std::size_t i = 1; i < trace.samples.size(); ++i) {
    const MeritSample& cur = trace.samples[i];
    if (cur.residual_norm > m2 * cur.z_gap + 1e-10) violations.push_back(cur.k);
  }
  return violations;
}

struct RateFit {
  double q = 0.0;        // per-iteration contraction factor exp(slope)
  double r_squared = 0.0;
};

/// Least-squares fit of log||x_k - x_star|| against k over the trace tail
/// (last 60% of samples, capped at 500). q < 1 indicates empirical linear
/// convergence. Throws when fewer than 20 tail samples have positive
/// distance to x_star.
inline RateFit estimate_linear_rate(const SolverTrace& trace,
                                    const Eigen::VectorXd& x_star) {
  const std::size_t n = trace.iterates.size();
  if (n == 0) {
    throw std::runtime_error("estimate_linear_rate: insufficient data: "
                             "trace has no recorded iterates");
  }
  if (trace.iterates.front().size() != x_star.size()) {
    throw std::invalid_argument("estimate_linear_rate: x_star length mismatch");
  }
  std::size_t window = std::min<std::size_t>(500, (3 * n + 4) / 5);  // ceil(0.6 n)
  if (window == 0) window = 1;

  std::vector<double> ks, logs;
  for (std::size_t i = n - window; i < n; ++i) {
    const double dist = (trace.iterates[i] - x_star).norm();
    if (dist > 0.0) {
      ks.push_back(static_cast<double>(i < trace.samples.size() ? trace.samples[i].k
                                                                : static_cast<long long>(i)));
      logs.push_back(std::log(dist));
    }
  }
  if (ks.size() < 20) {
    throw std::runtime_error("estimate_linear_rate: insufficient data: need >= 20 tail "
                             "samples with positive distance, have " +
                             std::to_string(ks.size()));
  }

  const double count = static_cast<double>(ks.size());
  double k_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    k_mean += ks[i];
    y_mean += logs[i];
  }
  k_mean /= count;
  y_mean /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double dk = ks[i] - k_mean;
    const double dy = logs[i] - y_mean;
    sxx += dk * dk;
    sxy += dk * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  double r2 = 1.0;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const double resid = logs[i] - y_mean - slope * (ks[i] - k_mean);
      ss_res += resid * resid;
    }
    r2 = 1.0 - ss_res / syy;
  }
  return {std::exp(slope), r2};
}

/// Columns: k,H,z_gap,residual_norm,objective.
inline void write_trace_csv(const SolverTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  out.imbue(std::locale::classic());
  out << "k,H,z_gap,residual_norm,objective\n";
  out.setf(std::ios::scientific);
  out.precision(9);
  for (const MeritSample& s : trace.samples) {
    out << s.k << ',' << s.h_value << ',' << s.z_gap << ',' << s.residual_norm
        << ',' << s.objective << '\n';
  }
  if (!out) throw std::runtime_error("write_trace_csv: write failed for " + path);
}

}  // namespace frb
