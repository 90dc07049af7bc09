// Acceptance checklist for the solver library and benchmark. Each criterion
// prints one PASS/FAIL line; the exit code is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "frb/bench.hpp"
#include "frb/merit.hpp"
#include "frb/prox.hpp"
#include "frb/solver.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace {

struct Harness {
  int failures = 0;

  void report(int index, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", index,
                name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const frb::BenchRow& row_for(const frb::BenchReport& report, frb::SolverKind kind) {
  for (const auto& row : report.rows) {
    if (row.solver == kind) return row;
  }
  throw std::logic_error("row not found");
}

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buffer[512];
  std::vsnprintf(buffer, sizeof buffer, format, args);
  va_end(args);
  return buffer;
}

// ---- criteria ----

void criterion_1(Harness& h) {
  const auto start = std::chrono::steady_clock::now();
  const auto report = frb::run_suite(
      {{300, 600}}, 50,
      {frb::SolverKind::frb, frb::SolverKind::dr, frb::SolverKind::itseng}, 20260810);
  const double elapsed = seconds_since(start);

  const auto& frb_row = row_for(report, frb::SolverKind::frb);
  const auto& dr_row = row_for(report, frb::SolverKind::dr);
  const auto& its_row = row_for(report, frb::SolverKind::itseng);

  const bool ok = frb_row.mean_iter_ceiling >= 300 && frb_row.mean_iter_ceiling <= 550 &&
                  frb_row.success_count >= 42 &&
                  its_row.mean_iter_ceiling >= 700 && its_row.mean_iter_ceiling <= 1200 &&
                  its_row.success_count <= 25 &&
                  dr_row.mean_iter_ceiling >= 350 && dr_row.mean_iter_ceiling <= 650 &&
                  frb_row.mean_iter_ceiling < dr_row.mean_iter_ceiling &&
                  dr_row.mean_iter_ceiling < its_row.mean_iter_ceiling &&
                  elapsed < 180.0;
  h.report(1, "benchmark bands at m=300 n=600, 50 trials", ok,
           fmt("frb iter=%lld succ=%d, dr iter=%lld succ=%d, itseng iter=%lld succ=%d, "
               "%.1fs",
               frb_row.mean_iter_ceiling, frb_row.success_count, dr_row.mean_iter_ceiling,
               dr_row.success_count, its_row.mean_iter_ceiling, its_row.success_count,
               elapsed));
}

void criterion_2(Harness& h) {
  const auto start = std::chrono::steady_clock::now();
  const auto report =
      frb::run_suite({{500, 600}}, 50, {frb::SolverKind::frb}, 5082026);
  const double elapsed = seconds_since(start);
  const auto& row = row_for(report, frb::SolverKind::frb);

  const bool ok = row.success_count >= 48 && row.mean_iter_ceiling >= 120 &&
                  row.mean_iter_ceiling <= 220 && elapsed < 60.0;
  h.report(2, "easy-regime check at m=500 n=600, 50 trials", ok,
           fmt("iter=%lld succ=%d, %.1fs", row.mean_iter_ceiling, row.success_count,
               elapsed));
}

struct CertificateOutcome {
  std::size_t descent_violations = 0;
  std::size_t residual_violations = 0;
  int runs = 0;
};

CertificateOutcome run_certificates() {
  CertificateOutcome outcome;
  const std::vector<std::pair<Eigen::Index, Eigen::Index>> sizes{
      {4, 8}, {20, 40}, {60, 120}, {100, 300}, {300, 600}};
  for (const auto& [m, n] : sizes) {
    for (std::uint64_t offset = 0; offset < 4; ++offset) {
      const auto inst = frb::generate_instance(m, n, 1000 + offset);
      const auto problem = frb::make_feasibility_problem(inst);
      frb::SolverConfig config = frb::protocol_config(frb::SolverKind::frb);
      config.record_trace = true;
      const auto report = frb::frb_solve(problem, Eigen::VectorXd::Zero(n), config);
      outcome.descent_violations += frb::check_descent(report.trace).size();
      outcome.residual_violations += frb::check_residual_bound(report.trace).size();
      ++outcome.runs;
    }
  }
  return outcome;
}

void criterion_3_and_4(Harness& h) {
  const auto outcome = run_certificates();
  h.report(3, "descent certificate on 20 compliant runs",
           outcome.runs == 20 && outcome.descent_violations == 0,
           fmt("%d runs, %zu violations", outcome.runs, outcome.descent_violations));
  h.report(4, "residual certificate on 20 compliant runs",
           outcome.runs == 20 && outcome.residual_violations == 0,
           fmt("%d runs, %zu violations", outcome.runs, outcome.residual_violations));
}

void criterion_5(Harness& h) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937 rng(5151);
  const double boxes[] = {0.5, 1.0, 1e6};
  int checked = 0;
  int mismatches = 0;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(t % 9);  // 2..10
    const Eigen::Index r =
        1 + static_cast<Eigen::Index>(t % std::min<Eigen::Index>(3, n));
    const double l = boxes[t % 3];
    const auto z = support::random_vector(rng, n, 2.0);

    const auto out = frb::project_sparse_box(z, {r, l});
    const bool in_set =
        (out.array() != 0.0).count() <= r && out.lpNorm<Eigen::Infinity>() <= l;
    const double got = (out - z).squaredNorm();
    const double best =
        oracle::sparse_box_distance_sq(z, static_cast<int>(r), l);
    worst = std::max(worst, std::abs(got - best));
    if (!in_set || std::abs(got - best) > 1e-12) ++mismatches;
    ++checked;
  }
  const double elapsed = seconds_since(start);
  h.report(5, "sparse-box projection vs brute-force enumeration",
           checked == 1000 && mismatches == 0 && elapsed < 10.0,
           fmt("%d checks, %d mismatches, worst gap %.2e, %.1fs", checked, mismatches,
               worst, elapsed));
}

void criterion_6(Harness& h) {
  std::mt19937 rng(606060);
  int bad = 0;
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 20);
    const Eigen::Index n = m + static_cast<Eigen::Index>(rng() % (41 - m));
    const auto a = support::random_matrix(rng, m, n);
    const auto b = support::random_vector(rng, m);
    const auto z = support::random_vector(rng, n, 3.0);

    const frb::AffineSet set(a, b);
    const auto p = set.project(z);
    const auto p_kkt = oracle::kkt_affine_projection(a, b, z);
    if ((p - p_kkt).norm() > 1e-8 * (1.0 + p_kkt.norm())) ++bad;
    if ((set.project(p) - p).norm() > 1e-10) ++bad;

    auto shared = std::make_shared<const frb::AffineSet>(a, b);
    const auto g = frb::affine_dist_smooth(shared);
    const auto fd = oracle::central_difference_gradient(g.value, z);
    if ((g.gradient(z) - fd).norm() > 1e-5 * (1.0 + fd.norm())) ++bad;
  }
  h.report(6, "affine projection vs KKT solve, idempotence, gradient check", bad == 0,
           fmt("200 instances, %d failures", bad));
}

void criterion_7(Harness& h) {
  int successes = 0;
  int qualifying = 0;
  double worst_q = 0.0, worst_r2 = 1.0;
  for (std::uint64_t offset = 0; offset < 12; ++offset) {
    const auto inst = frb::generate_instance(500, 600, 777000 + offset);
    const auto problem = frb::make_feasibility_problem(inst);
    frb::SolverConfig config = frb::protocol_config(frb::SolverKind::frb);
    config.record_trace = true;
    config.record_iterates = true;
    const auto report = frb::frb_solve(problem, Eigen::VectorXd::Zero(600), config);
    if (report.terminal_objective >= frb::kSuccessThreshold) continue;
    ++successes;
    const auto fit = frb::estimate_linear_rate(report.trace, report.final_x);
    worst_q = std::max(worst_q, fit.q);
    worst_r2 = std::min(worst_r2, fit.r_squared);
    if (fit.q < 1.0 && fit.r_squared >= 0.9) ++qualifying;
  }
  h.report(7, "empirical linear rate on successful runs",
           successes >= 10 && qualifying == successes,
           fmt("%d successes, %d qualifying, worst Q=%.4f, worst R2=%.4f", successes,
               qualifying, worst_q, worst_r2));
}

void criterion_8(Harness& h) {
  std::mt19937 rng(42042);
  int bad = 0;
  double worst_pair = 0.0, worst_ref = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Eigen::Index n = 20 + static_cast<Eigen::Index>(rng() % 31);  // 20..50
    const Eigen::Index rows = n + 15;
    const auto a = support::random_matrix(rng, rows, n);
    const auto b = support::random_vector(rng, rows);
    const double tau = 0.2 * (a.transpose() * b).lpNorm<Eigen::Infinity>();
    const auto problem = support::lasso_problem(a, b, tau);

    frb::SolverConfig config;
    config.record_trace = false;
    config.max_iter = 200000;
    const auto frb_report = frb::frb_solve(problem, Eigen::VectorXd::Zero(n), config);
    const auto dr_report = frb::dr_solve(problem, Eigen::VectorXd::Zero(n), config);

    const auto reference = oracle::ista_lasso(a, b, tau);
    const double ref_obj = oracle::lasso_objective(a, b, tau, reference);
    const double frb_obj = oracle::lasso_objective(a, b, tau, frb_report.final_x);
    const double dr_obj = oracle::lasso_objective(a, b, tau, dr_report.final_x);

    worst_pair = std::max(worst_pair, std::abs(frb_obj - dr_obj));
    worst_ref = std::max({worst_ref, std::abs(frb_obj - ref_obj),
                          std::abs(dr_obj - ref_obj)});
    if (std::abs(frb_obj - dr_obj) > 1e-6 || std::abs(frb_obj - ref_obj) > 1e-5 ||
        std::abs(dr_obj - ref_obj) > 1e-5) {
      ++bad;
    }
  }
  h.report(8, "convex cross-check against an independent reference", bad == 0,
           fmt("10 instances, %d failures, worst |frb-dr|=%.2e, worst |x-ref|=%.2e", bad,
               worst_pair, worst_ref));
}

void criterion_9(Harness& h) {
  const auto inst = frb::generate_instance(50, 100, 2468);
  auto grad_calls = std::make_shared<long long>(0);
  auto prox_calls = std::make_shared<long long>(0);

  frb::CompositeProblem problem = frb::make_feasibility_problem(inst);
  const auto base_grad = problem.smooth.gradient;
  problem.smooth.gradient = [base_grad, grad_calls](const Eigen::VectorXd& x) {
    ++*grad_calls;
    return base_grad(x);
  };
  const auto base_prox = problem.nonsmooth.prox;
  problem.nonsmooth.prox = [base_prox, prox_calls](const Eigen::VectorXd& z, double lam) {
    ++*prox_calls;
    return base_prox(z, lam);
  };

  frb::SolverConfig config = frb::protocol_config(frb::SolverKind::frb);
  config.record_trace = true;  // tracing must not add oracle traffic
  config.max_iter = 300;
  config.tol = 1e-14;
  const auto report = frb::frb_solve(problem, Eigen::VectorXd::Zero(100), config);
  const long long k = report.iterations;

  const bool ok = *grad_calls == k + 1 && *prox_calls == k;
  h.report(9, "one gradient and one prox per FRB iteration", ok,
           fmt("K=%lld, gradients=%lld (one initializes the cache), prox=%lld", k,
               *grad_calls, *prox_calls));
}

}  // namespace

int main() {
  Harness h;
  criterion_1(h);
  criterion_2(h);
  criterion_3_and_4(h);
  criterion_5(h);
  criterion_6(h);
  criterion_7(h);
  criterion_8(h);
  criterion_9(h);
  if (h.failures == 0) {
    std::printf("all acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria FAILED\n", h.failures);
  }
  return h.failures;
}
