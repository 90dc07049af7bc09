// Shared problem builders and RNG helpers for the test suites.
#pragma once

#include <Eigen/Dense>

#include <random>

#include "frb/problem.hpp"
#include "frb/prox.hpp"

namespace support {

inline Eigen::VectorXd random_vector(std::mt19937& rng, Eigen::Index n,
                                     double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

inline Eigen::MatrixXd random_matrix(std::mt19937& rng, Eigen::Index rows,
                                     Eigen::Index cols, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

/// g = (1/2)||x||^2 (gradient x, L = 1, prox z/(1+gamma)).
inline frb::SmoothPart quadratic_smooth() {
  frb::SmoothPart g;
  g.lipschitz_L = 1.0;
  g.value = [](const Eigen::VectorXd& x) -> double { return 0.5 * x.squaredNorm(); };
  g.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; };
  g.prox = [](const Eigen::VectorXd& z, double gamma) -> Eigen::VectorXd {
    return z / (1.0 + gamma);
  };
  return g;
}

/// f = indicator of {0}.
inline frb::NonsmoothPart indicator_origin() {
  frb::NonsmoothPart f;
  f.prox_threshold = frb::kInfinity;
  f.value = [](const Eigen::VectorXd& z) -> double {
    return (z.array() == 0.0).all() ? 0.0 : frb::kInfinity;
  };
  f.prox = [](const Eigen::VectorXd& z, double) -> Eigen::VectorXd {
    return Eigen::VectorXd::Zero(z.size());
  };
  return f;
}

inline frb::CompositeProblem quadratic_problem(Eigen::Index dim) {
  frb::CompositeProblem p;
  p.dim = dim;
  p.smooth = quadratic_smooth();
  p.nonsmooth = frb::zero_nonsmooth();
  return p;
}

inline frb::CompositeProblem lasso_problem(const Eigen::MatrixXd& a,
                                           const Eigen::VectorXd& b, double tau) {
  frb::CompositeProblem p;
  p.dim = a.cols();
  p.smooth = frb::least_squares_smooth(a, b);
  p.nonsmooth = frb::l1_norm(tau);
  return p;
}

}  // namespace support
