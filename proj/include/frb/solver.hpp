// Forward-reflected-backward splitting for composite minimization, plus the
// two fixed-step baselines it is benchmarked against (Douglas-Rachford and
// inertial Tseng). All three share the run loop conventions: relative-gap
// termination, stagnation cutoff, and trace emission.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "frb/merit.hpp"
#include "frb/problem.hpp"

namespace frb {

enum class SolverKind { frb, dr, itseng };

inline const char* solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::frb: return "frb";
    case SolverKind::dr: return "dr";
    case SolverKind::itseng: return "itseng";
  }
  return "?";
}

inline SolverKind parse_solver(std::string_view name) {
  if (name == "frb") return SolverKind::frb;
  if (name == "dr") return SolverKind::dr;
  if (name == "itseng") return SolverKind::itseng;
  throw std::invalid_argument("unknown solver '" + std::string(name) +
                              "' (expected frb, dr, or itseng)");
}

enum class TerminationReason { tolerance_met, max_iter, stagnation };

inline const char* termination_reason_name(TerminationReason r) {
  switch (r) {
    case TerminationReason::tolerance_met: return "tolerance_met";
    case TerminationReason::max_iter: return "max_iter";
    case TerminationReason::stagnation: return "stagnation";
  }
  return "?";
}

struct SolverConfig {
  /// Step size (lambda for FRB, lambda' for inertial Tseng). 0 selects
  /// 0.9999 * min{1/(4L), lambda_f} automatically.
  double lambda = 0.0;
  long long max_iter = 50000;
  double tol = 1e-8;
  double inertia_alpha = 0.125;      // inertial Tseng only
  std::optional<double> dr_gamma;    // Douglas-Rachford only; default 0.22/L
  /// Reject FRB runs whose lambda is not strictly below min{1/(4L), lambda_f}.
  bool enforce_stepsize_rule = true;
  bool record_trace = true;
  bool record_iterates = false;
};

/// Rolling FRB state: the two most recent iterates and their cached
/// gradients, so each step spends exactly one new gradient evaluation.
struct IterateState {
  Eigen::VectorXd x_curr;     // x_k
  Eigen::VectorXd x_prev;     // x_{k-1}
  Eigen::VectorXd grad_curr;  // grad g(x_k)
  Eigen::VectorXd grad_prev;  // grad g(x_{k-1})
  long long k = 0;
};

struct RunReport {
  Eigen::VectorXd final_x;
  long long iterations = 0;
  double terminal_objective = 0.0;
  TerminationReason reason = TerminationReason::max_iter;
  SolverTrace trace;
};

namespace detail {

inline constexpr long long kStagnationWindow = 5000;

inline double termination_ratio(const Eigen::VectorXd& x_next,
                                const Eigen::VectorXd& x_curr,
                                const Eigen::VectorXd& x_prev) {
  const double num = std::max((x_next - x_curr).norm(), (x_curr - x_prev).norm());
  const double den =
      std::max({1.0, x_next.norm(), x_curr.norm(), x_prev.norm()});
  return num / den;
}

inline void validate_problem(const CompositeProblem& problem, const Eigen::VectorXd& x0,
                             const char* who) {
  if (problem.dim <= 0) throw std::invalid_argument(std::string(who) + ": problem.dim must be positive");
  if (x0.size() != problem.dim) {
    throw std::invalid_argument(std::string(who) + ": x0 has length " +
                                std::to_string(x0.size()) + " but problem.dim is " +
                                std::to_string(problem.dim));
  }
  if (!problem.smooth.value || !problem.smooth.gradient || !problem.nonsmooth.value ||
      !problem.nonsmooth.prox) {
    throw std::invalid_argument(std::string(who) + ": problem oracles are incomplete");
  }
  if (!(problem.smooth.lipschitz_L > 0.0)) {
    throw std::invalid_argument(std::string(who) + ": lipschitz_L must be positive");
  }
}

inline double resolve_lambda(const CompositeProblem& problem, const SolverConfig& config,
                             const char* who) {
  double lambda = config.lambda;
  if (lambda == 0.0) {
    lambda = 0.9999 * std::min(1.0 / (4.0 * problem.smooth.lipschitz_L),
                               problem.nonsmooth.prox_threshold);
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument(std::string(who) + ": step size must be positive and finite");
  }
  return lambda;
}

/// Shared bookkeeping for tolerance / stagnation termination.
struct StopTracker {
  double tol;
  double best_ratio = kInfinity;
  long long stall = 0;

  /// Returns the reason to stop, if any, after observing this iteration's ratio.
  std::optional<TerminationReason> observe(double ratio) {
    if (ratio < tol) return TerminationReason::tolerance_met;
    if (ratio < best_ratio) {
      best_ratio = ratio;
      stall = 0;
    } else if (++stall >= kStagnationWindow) {
      return TerminationReason::stagnation;
    }
    return std::nullopt;
  }
};

}  // namespace detail

/// Relative-gap rule: max{||x_{k+1}-x_k||, ||x_k-x_{k-1}||} over
/// max{1, ||x_{k+1}||, ||x_k||, ||x_{k-1}||} strictly below tol.
inline bool stopping_criterion(const Eigen::VectorXd& x_next,
                               const Eigen::VectorXd& x_curr,
                               const Eigen::VectorXd& x_prev, double tol) {
  if (x_next.size() != x_curr.size() || x_curr.size() != x_prev.size()) {
    throw std::invalid_argument("stopping_criterion: vector lengths differ");
  }
  return detail::termination_ratio(x_next, x_curr, x_prev) < tol;
}

/// One FRB step: x_{k+1} = prox_{lambda f}(x_k - lambda (2 grad g(x_k) -
/// grad g(x_{k-1}))), with the gradient cache rolled forward. Exactly one
/// gradient and one prox evaluation.
inline IterateState frb_step(const IterateState& state, const CompositeProblem& problem,
                             double lambda) {
  if (state.x_curr.size() != problem.dim) {
    throw std::invalid_argument("frb_step: state dimension does not match problem");
  }
  IterateState next;
  next.x_curr = problem.nonsmooth.prox(
      state.x_curr - lambda * (2.0 * state.grad_curr - state.grad_prev), lambda);
  next.grad_curr = problem.smooth.gradient(next.x_curr);
  next.x_prev = state.x_curr;
  next.grad_prev = state.grad_curr;
  next.k = state.k + 1;
  return next;
}

/// Run FRB from x0 (with x_{-1} = x0, so the first reflected term vanishes).
inline RunReport frb_solve(const CompositeProblem& problem, const Eigen::VectorXd& x0,
                           const SolverConfig& config) {
  detail::validate_problem(problem, x0, "frb_solve");
  const double lambda = detail::resolve_lambda(problem, config, "frb_solve");
  if (config.enforce_stepsize_rule) {
    const double bound = std::min(1.0 / (4.0 * problem.smooth.lipschitz_L),
                                  problem.nonsmooth.prox_threshold);
    if (!(lambda < bound)) {
      std::ostringstream msg;
      msg << "frb_solve: lambda=" << lambda
          << " violates the step-size rule lambda < min{1/(4L), lambda_f} = " << bound;
      throw std::invalid_argument(msg.str());
    }
  }

  RunReport report;
  report.trace.lambda = lambda;
  report.trace.lipschitz_L = problem.smooth.lipschitz_L;

  IterateState state;
  state.x_curr = x0;
  state.x_prev = x0;
  state.grad_curr = problem.smooth.gradient(x0);
  state.grad_prev = state.grad_curr;

  if (config.record_trace) {
    // Baseline sample: H(z_{-1}) = F(x0) since x_{-1} = x0.
    const double f0 = evaluate_objective(problem, x0);
    report.trace.samples.push_back({-1, f0, 0.0, 0.0, f0});
    if (config.record_iterates) report.trace.iterates.push_back(x0);
  }

  detail::StopTracker stop{config.tol};
  TerminationReason reason = TerminationReason::max_iter;
  long long iterations = 0;

  for (long long k = 0; k < config.max_iter; ++k) {
    IterateState next = frb_step(state, problem, lambda);
    const double ratio =
        detail::termination_ratio(next.x_curr, state.x_curr, state.x_prev);

    if (config.record_trace) {
      const double gap1_sq = (next.x_curr - state.x_curr).squaredNorm();
      const double gap2_sq = (state.x_curr - state.x_prev).squaredNorm();
      const auto [res_a, res_b] = frb_residual_from_gradients(
          next.x_curr, state.x_curr, state.x_prev, next.grad_curr, state.grad_curr,
          state.grad_prev, lambda);
      const double objective = evaluate_objective(problem, next.x_curr);
      const double h =
          objective == kInfinity ? kInfinity : objective + gap1_sq / (4.0 * lambda);
      report.trace.samples.push_back(
          {k, h, std::sqrt(gap1_sq + gap2_sq),
           std::sqrt(res_a.squaredNorm() + res_b.squaredNorm()), objective});
      if (config.record_iterates) report.trace.iterates.push_back(next.x_curr);
    }

    state = std::move(next);
    iterations = k + 1;
    if (auto stop_reason = stop.observe(ratio)) {
      reason = *stop_reason;
      break;
    }
  }

  report.final_x = std::move(state.x_curr);
  report.iterations = iterations;
  report.terminal_objective = evaluate_objective(problem, report.final_x);
  report.reason = reason;
  return report;
}

/// Inertial Tseng (forward-backward-forward with a fixed inertial term):
///   p_{k+1} = prox_{lambda f}(x_k - lambda grad g(x_k) + alpha (x_k - x_{k-1}))
///   x_{k+1} = p_{k+1} + lambda (grad g(x_k) - grad g(p_{k+1}))
/// Two gradient evaluations per iteration. The returned point is the last
/// prox output p (it carries the structure f enforces; the corrected x does
/// not), and trace samples are evaluated there as well.
inline RunReport itseng_solve(const CompositeProblem& problem, const Eigen::VectorXd& x0,
                              const SolverConfig& config) {
  detail::validate_problem(problem, x0, "itseng_solve");
  const double lambda = detail::resolve_lambda(problem, config, "itseng_solve");
  const double alpha = config.inertia_alpha;
  if (alpha < 0.0 || alpha >= 1.0) {
    throw std::invalid_argument("itseng_solve: inertia_alpha must lie in [0, 1)");
  }

  RunReport report;
  report.trace.lambda = lambda;
  report.trace.lipschitz_L = problem.smooth.lipschitz_L;

  Eigen::VectorXd x_curr = x0;
  Eigen::VectorXd x_prev = x0;
  Eigen::VectorXd grad_curr = problem.smooth.gradient(x0);
  Eigen::VectorXd p_last = x0;

  if (config.record_trace) {
    const double f0 = evaluate_objective(problem, x0);
    report.trace.samples.push_back({-1, f0, 0.0, 0.0, f0});
    if (config.record_iterates) report.trace.iterates.push_back(x0);
  }

  detail::StopTracker stop{config.tol};
  TerminationReason reason = TerminationReason::max_iter;
  long long iterations = 0;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (long long k = 0; k < config.max_iter; ++k) {
    Eigen::VectorXd p = problem.nonsmooth.prox(
        x_curr - lambda * grad_curr + alpha * (x_curr - x_prev), lambda);
    Eigen::VectorXd grad_p = problem.smooth.gradient(p);
    Eigen::VectorXd x_next = p + lambda * (grad_curr - grad_p);
    const double ratio = detail::termination_ratio(x_next, x_curr, x_prev);

    if (config.record_trace) {
      const double gap1_sq = (x_next - x_curr).squaredNorm();
      const double gap2_sq = (x_curr - x_prev).squaredNorm();
      const double objective = evaluate_objective(problem, p);
      const double h = objective == kInfinity
                           ? kInfinity
                           : objective + (p - x_curr).squaredNorm() / (4.0 * lambda);
      report.trace.samples.push_back({k, h, std::sqrt(gap1_sq + gap2_sq), nan, objective});
      if (config.record_iterates) report.trace.iterates.push_back(p);
    }

    p_last = std::move(p);
    x_prev = std::move(x_curr);
    x_curr = std::move(x_next);
    iterations = k + 1;
    if (auto stop_reason = stop.observe(ratio)) {
      reason = *stop_reason;
      break;
    }
    grad_curr = problem.smooth.gradient(x_curr);
  }

  report.final_x = std::move(p_last);
  report.iterations = iterations;
  report.terminal_objective = evaluate_objective(problem, report.final_x);
  report.reason = reason;
  return report;
}

/// Fixed-step Douglas-Rachford:
///   y_{t+1} = prox_{gamma g}(z_t)
///   x_{t+1} = prox_{gamma f}(2 y_{t+1} - z_t)
///   z_{t+1} = z_t + x_{t+1} - y_{t+1}
/// Requires a proximal oracle on the smooth part; terminates on the relative
/// gap of successive z iterates.
inline RunReport dr_solve(const CompositeProblem& problem, const Eigen::VectorXd& z0,
                          const SolverConfig& config) {
  detail::validate_problem(problem, z0, "dr_solve");
  if (!problem.smooth.prox) {
    throw std::runtime_error("dr_solve: unsupported problem: the smooth part provides "
                             "no proximal oracle");
  }
  const double gamma =
      config.dr_gamma.value_or(0.22 / problem.smooth.lipschitz_L);
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("dr_solve: dr_gamma must be positive and finite");
  }

  RunReport report;
  report.trace.lambda = gamma;
  report.trace.lipschitz_L = problem.smooth.lipschitz_L;

  Eigen::VectorXd z_curr = z0;
  Eigen::VectorXd z_prev = z0;
  Eigen::VectorXd x_last = z0;
  Eigen::VectorXd x_before = z0;

  if (config.record_trace) {
    const double f0 = evaluate_objective(problem, z0);
    report.trace.samples.push_back({-1, f0, 0.0, 0.0, f0});
    if (config.record_iterates) report.trace.iterates.push_back(z0);
  }

  detail::StopTracker stop{config.tol};
  TerminationReason reason = TerminationReason::max_iter;
  long long iterations = 0;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (long long t = 0; t < config.max_iter; ++t) {
    Eigen::VectorXd y = problem.smooth.prox(z_curr, gamma);
    Eigen::VectorXd x = problem.nonsmooth.prox(2.0 * y - z_curr, gamma);
    Eigen::VectorXd z_next = z_curr + x - y;
    const double ratio = detail::termination_ratio(z_next, z_curr, z_prev);

    if (config.record_trace) {
      const double gap1_sq = (x - x_last).squaredNorm();
      const double gap2_sq = (x_last - x_before).squaredNorm();
      const double objective = evaluate_objective(problem, x);
      const double h = objective == kInfinity
                           ? kInfinity
                           : objective + gap1_sq / (4.0 * gamma);
      report.trace.samples.push_back({t, h, std::sqrt(gap1_sq + gap2_sq), nan, objective});
      if (config.record_iterates) report.trace.iterates.push_back(x);
    }

    x_before = std::move(x_last);
    x_last = std::move(x);
    z_prev = std::move(z_curr);
    z_curr = std::move(z_next);
    iterations = t + 1;
    if (auto stop_reason = stop.observe(ratio)) {
      reason = *stop_reason;
      break;
    }
  }

  report.final_x = std::move(x_last);
  report.iterations = iterations;
  report.terminal_objective = evaluate_objective(problem, report.final_x);
  report.reason = reason;
  return report;
}

inline RunReport run_solver(SolverKind kind, const CompositeProblem& problem,
                            const Eigen::VectorXd& x0, const SolverConfig& config) {
  switch (kind) {
    case SolverKind::frb: return frb_solve(problem, x0, config);
    case SolverKind::dr: return dr_solve(problem, x0, config);
    case SolverKind::itseng: return itseng_solve(problem, x0, config);
  }
  throw std::invalid_argument("run_solver: unknown solver kind");
}

}  // namespace frb
