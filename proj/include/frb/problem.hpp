// Composite objective model: F = f + g with a smooth g (Lipschitz gradient)
// and a proper, lsc, prox-bounded nonsmooth f given through oracles.
#pragma once

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace frb {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Smooth term g. `gradient` must be Lipschitz continuous with constant
/// `lipschitz_L` > 0. Oracles must be pure: problems are immutable after
/// construction and shared across concurrent solver runs.
struct SmoothPart {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  double lipschitz_L = 0.0;
  /// Proximal oracle of g itself. Optional; only solvers that take a backward
  /// step on g (Douglas-Rachford) require it.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> prox;
};

/// Nonsmooth term f. `value` is extended-real valued: +infinity outside
/// dom f, never NaN; +infinity is a distinguished value, not a rounding
/// artifact. `prox(z, lambda)` returns one deterministic element of the
/// possibly set-valued proximal mapping; it is well defined for
/// lambda in (0, prox_threshold).
struct NonsmoothPart {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> prox;
  double prox_threshold = kInfinity;  // lambda_f
};

/// min F(x) = f(x) + g(x) over R^dim.
struct CompositeProblem {
  Eigen::Index dim = 0;
  SmoothPart smooth;        // g
  NonsmoothPart nonsmooth;  // f
};

inline double evaluate_objective(const CompositeProblem& problem,
                                 const Eigen::VectorXd& x) {
  if (x.size() != problem.dim) {
    throw std::invalid_argument(
        "evaluate_objective: x has length " + std::to_string(x.size()) +
        " but problem.dim is " + std::to_string(problem.dim));
  }
  const double fx = problem.nonsmooth.value(x);
  if (fx == kInfinity) return kInfinity;  // finite + inf = inf; g is finite everywhere
  return fx + problem.smooth.value(x);
}

}  // namespace frb
