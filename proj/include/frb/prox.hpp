// Closed-form projections and proximal operators: box, sparse-box (top-r
// selection), affine subspace via a cached Cholesky factor of A*A^T, l1
// soft-thresholding, and builders for the composite parts they induce.
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

#include "frb/problem.hpp"

namespace frb {

/// D = {x : ||x||_0 <= r, ||x||_inf <= l}.
struct SparseBoxSet {
  Eigen::Index r = 1;
  double l = 1.0;
};

inline Eigen::VectorXd project_box(const Eigen::VectorXd& z, double l) {
  if (!(l > 0.0)) throw std::invalid_argument("project_box: l must be positive");
  return z.cwiseMax(-l).cwiseMin(l);
}

/// One element of the (set-valued) projection onto a SparseBoxSet.
/// Coordinate i scores v_i = z_i^2 - (clamp(z_i) - z_i)^2, the squared-distance
/// saving of keeping i; the r highest-scoring coordinates are kept, clamped to
/// the box, the rest zeroed. Ties at the selection boundary keep the lowest
/// indices, so the selected element is deterministic.
inline Eigen::VectorXd project_sparse_box(const Eigen::VectorXd& z,
                                          const SparseBoxSet& set) {
  const Eigen::Index n = z.size();
  if (set.r < 1 || set.r > n) {
    throw std::invalid_argument("project_sparse_box: require 1 <= r <= n, got r=" +
                                std::to_string(set.r) + ", n=" + std::to_string(n));
  }
  const Eigen::VectorXd clamped = project_box(z, set.l);
  const Eigen::VectorXd v =
      (z.array().square() - (clamped - z).array().square()).matrix();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::partial_sort(order.begin(), order.begin() + set.r, order.end(),
                    [&v](Eigen::Index a, Eigen::Index b) {
                      return v[a] > v[b] || (v[a] == v[b] && a < b);
                    });

  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < set.r; ++k) out[order[k]] = clamped[order[k]];
  return out;
}

/// C = {x : A x = b} with A full row rank, m <= n. The SPD factorization of
/// A*A^T is computed once at construction and reused by every projection, so
/// a shared immutable AffineSet amortizes the factorization across all
/// iterations and solvers. Rank deficiency fails construction loudly; there
/// is no regularized fallback.
class AffineSet {
 public:
  AffineSet(Eigen::MatrixXd a, Eigen::VectorXd b)
      : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() > a_.cols()) {
      throw std::invalid_argument("AffineSet: need m <= n, got " +
                                  std::to_string(a_.rows()) + "x" +
                                  std::to_string(a_.cols()));
    }
    if (b_.size() != a_.rows()) {
      throw std::invalid_argument("AffineSet: b has length " +
                                  std::to_string(b_.size()) + ", A has " +
                                  std::to_string(a_.rows()) + " rows");
    }
    gram_llt_.compute(a_ * a_.transpose());
    if (gram_llt_.info() != Eigen::Success) {
      throw std::runtime_error("AffineSet: Cholesky factorization of A*A^T failed; "
                               "A is rank deficient (" + condition_diagnostic() + ")");
    }
    const double rcond = gram_llt_.rcond();
    if (!(rcond > 1e-14)) {
      std::ostringstream msg;
      msg << "AffineSet: A*A^T is numerically singular, rcond estimate " << rcond;
      throw std::runtime_error(msg.str());
    }
  }

  Eigen::Index rows() const { return a_.rows(); }
  Eigen::Index cols() const { return a_.cols(); }
  const Eigen::MatrixXd& matrix() const { return a_; }
  const Eigen::VectorXd& rhs() const { return b_; }

  /// Orthogonal projection z - A^T (A A^T)^{-1} (A z - b).
  Eigen::VectorXd project(const Eigen::VectorXd& z) const {
    if (z.size() != a_.cols()) {
      throw std::invalid_argument("AffineSet::project: z has length " +
                                  std::to_string(z.size()) + ", expected " +
                                  std::to_string(a_.cols()));
    }
    return z - a_.transpose() * gram_llt_.solve(a_ * z - b_);
  }

 private:
  std::string condition_diagnostic() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a_ * a_.transpose(),
                                                      Eigen::EigenvaluesOnly);
    std::ostringstream msg;
    if (es.info() == Eigen::Success) {
      const double lo = es.eigenvalues().minCoeff();
      const double hi = es.eigenvalues().maxCoeff();
      msg << "eigenvalues of A*A^T span [" << lo << ", " << hi << "]";
    } else {
      msg << "condition estimate unavailable";
    }
    return msg.str();
  }

  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  Eigen::LLT<Eigen::MatrixXd> gram_llt_;
};

inline Eigen::VectorXd project_affine(const Eigen::VectorXd& z, const AffineSet& set) {
  return set.project(z);
}

/// g = (1/2) dist^2(., C) for an affine C. Gradient x - Proj_C(x) is
/// 1-Lipschitz; the proximal oracle (z + gamma Proj_C(z)) / (1 + gamma) is
/// exact for any convex C and lets Douglas-Rachford handle this g.
inline SmoothPart affine_dist_smooth(std::shared_ptr<const AffineSet> set) {
  if (!set) throw std::invalid_argument("affine_dist_smooth: null set");
  SmoothPart g;
  g.lipschitz_L = 1.0;
  g.value = [set](const Eigen::VectorXd& x) -> double {
    return 0.5 * (x - set->project(x)).squaredNorm();
  };
  g.gradient = [set](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return x - set->project(x);
  };
  g.prox = [set](const Eigen::VectorXd& z, double gamma) -> Eigen::VectorXd {
    return (z + gamma * set->project(z)) / (1.0 + gamma);
  };
  return g;
}

/// Soft-thresholding: componentwise sign(z_i) * max(|z_i| - tau, 0).
inline Eigen::VectorXd prox_l1(const Eigen::VectorXd& z, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("prox_l1: tau must be positive");
  return (z.array().sign() * (z.array().abs() - tau).max(0.0)).matrix();
}

// --- composite-part builders ---

/// f = indicator of a SparseBoxSet. Membership is exact (no tolerance): the
/// prox outputs land in D exactly, so their value is 0 by construction.
/// Indicators are prox-bounded with threshold +infinity, and their prox is
/// the projection independently of lambda.
inline NonsmoothPart sparse_box_indicator(const SparseBoxSet& set) {
  if (set.r < 1) throw std::invalid_argument("sparse_box_indicator: r must be >= 1");
  if (!(set.l > 0.0)) throw std::invalid_argument("sparse_box_indicator: l must be positive");
  NonsmoothPart f;
  f.prox_threshold = kInfinity;
  f.value = [set](const Eigen::VectorXd& z) -> double {
    const Eigen::Index nnz = (z.array() != 0.0).count();
    if (nnz > set.r) return kInfinity;
    if (z.size() > 0 && z.array().abs().maxCoeff() > set.l) return kInfinity;
    return 0.0;
  };
  f.prox = [set](const Eigen::VectorXd& z, double /*lambda*/) -> Eigen::VectorXd {
    return project_sparse_box(z, set);
  };
  return f;
}

/// f = tau * ||.||_1.
inline NonsmoothPart l1_norm(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("l1_norm: tau must be positive");
  NonsmoothPart f;
  f.prox_threshold = kInfinity;
  f.value = [tau](const Eigen::VectorXd& z) -> double {
    return tau * z.lpNorm<1>();
  };
  f.prox = [tau](const Eigen::VectorXd& z, double lambda) -> Eigen::VectorXd {
    return prox_l1(z, tau * lambda);
  };
  return f;
}

/// f identically zero (prox is the identity).
inline NonsmoothPart zero_nonsmooth() {
  NonsmoothPart f;
  f.prox_threshold = kInfinity;
  f.value = [](const Eigen::VectorXd&) -> double { return 0.0; };
  f.prox = [](const Eigen::VectorXd& z, double) -> Eigen::VectorXd { return z; };
  return f;
}

/// g identically zero. Any positive constant is a valid Lipschitz modulus;
/// we use 1 so the step-size rule stays meaningful.
inline SmoothPart zero_smooth() {
  SmoothPart g;
  g.lipschitz_L = 1.0;
  g.value = [](const Eigen::VectorXd&) -> double { return 0.0; };
  g.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return Eigen::VectorXd::Zero(x.size());
  };
  g.prox = [](const Eigen::VectorXd& z, double) -> Eigen::VectorXd { return z; };
  return g;
}

/// g = (1/2) ||A x - b||^2 with L = lambda_max(A^T A). The proximal oracle
/// solves (I + gamma A^T A) y = z + gamma A^T b.
inline SmoothPart least_squares_smooth(const Eigen::MatrixXd& a,
                                       const Eigen::VectorXd& b) {
  if (b.size() != a.rows()) {
    throw std::invalid_argument("least_squares_smooth: A is " +
                                std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " but b has length " +
                                std::to_string(b.size()));
  }
  struct Data {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    Eigen::MatrixXd ata;
    Eigen::VectorXd atb;
  };
  auto d = std::make_shared<Data>();
  d->a = a;
  d->b = b;
  d->ata = a.transpose() * a;
  d->atb = a.transpose() * b;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d->ata, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmax > 0.0)) {
    throw std::invalid_argument("least_squares_smooth: A must be nonzero");
  }

  SmoothPart g;
  g.lipschitz_L = lmax;
  g.value = [d](const Eigen::VectorXd& x) -> double {
    return 0.5 * (d->a * x - d->b).squaredNorm();
  };
  g.gradient = [d](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return d->ata * x - d->atb;
  };
  g.prox = [d](const Eigen::VectorXd& z, double gamma) -> Eigen::VectorXd {
    Eigen::MatrixXd m = gamma * d->ata;
    m.diagonal().array() += 1.0;
    return m.ldlt().solve(z + gamma * d->atb);
  };
  return g;
}

}  // namespace frb
