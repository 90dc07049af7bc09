// Command-line front door: `solve` runs one solver on one generated
// instance, `bench` runs the solver matrix over a size grid and writes the
// CSV report, `verify` runs FRB with full tracing and checks the descent and
// residual certificates. Exit codes: 0 success, 1 usage/configuration error,
// 2 numerical or certificate failure.
#pragma once

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

#include "frb/bench.hpp"
#include "frb/merit.hpp"
#include "frb/solver.hpp"

namespace frb::cli {

namespace detail {

inline std::pair<Eigen::Index, Eigen::Index> parse_size(const std::string& token) {
  const auto pos = token.find('x');
  std::size_t m_end = 0, n_end = 0;
  long long m = 0, n = 0;
  try {
    m = std::stoll(token.substr(0, pos), &m_end);
    n = std::stoll(token.substr(pos + 1), &n_end);
  } catch (const std::exception&) {
    m_end = 0;
  }
  if (pos == std::string::npos || m_end != pos || n_end != token.size() - pos - 1 ||
      m < 1 || n < 1) {
    throw std::invalid_argument("--sizes: expected MxN (e.g. 300x600), got '" + token + "'");
  }
  return {m, n};
}

inline std::string format_sci(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.setf(std::ios::scientific);
  os.precision(6);
  os << v;
  return os.str();
}

inline std::string format_fixed(double v, int precision) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << v;
  return os.str();
}

/// Default output files land under FRB_OUT_DIR when that variable is set.
inline std::string resolve_default_out(const std::string& filename) {
  if (const char* dir = std::getenv("FRB_OUT_DIR")) {
    std::string d(dir);
    if (!d.empty()) return d + "/" + filename;
  }
  return filename;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"forward-reflected-backward splitting: solvers, certificates and "
               "sparse-feasibility benchmark"};
  app.require_subcommand(1);

  // solve
  long long solve_m = 300, solve_n = 600, solve_max_iter = 50000;
  std::uint64_t solve_seed = 0;
  std::string solve_solver = "frb";
  double solve_lambda = 0.0, solve_tol = 1e-8;
  bool solve_no_enforce = false;
  std::string solve_trace_out;
  CLI::App* solve = app.add_subcommand("solve", "generate one instance and run one solver");
  solve->add_option("--m", solve_m, "instance rows m")->capture_default_str();
  solve->add_option("--n", solve_n, "instance columns n (must exceed m)")->capture_default_str();
  solve->add_option("--solver", solve_solver, "frb | dr | itseng")->capture_default_str();
  solve->add_option("--seed", solve_seed, "instance seed")->capture_default_str();
  solve->add_option("--lambda", solve_lambda,
                    "step-size override (dr: prox step gamma); default: protocol value");
  solve->add_option("--tol", solve_tol, "termination tolerance")->capture_default_str();
  solve->add_option("--max-iter", solve_max_iter, "iteration cap")->capture_default_str();
  solve->add_flag("--no-enforce", solve_no_enforce, "skip the FRB step-size rule check");
  solve->add_option("--trace-out", solve_trace_out, "write the per-iteration trace CSV here");

  // bench
  std::vector<std::string> bench_sizes;
  std::vector<std::string> bench_solvers{"frb", "dr", "itseng"};
  int bench_trials = 50;
  std::uint64_t bench_seed = 0;
  std::string bench_out = "bench.csv";
  CLI::App* bench = app.add_subcommand("bench", "run the benchmark suite and write a CSV report");
  bench->add_option("--sizes", bench_sizes,
                    "comma-separated MxN list; default: the full 15-size grid")
      ->delimiter(',');
  bench->add_option("--trials", bench_trials, "instances per size")->capture_default_str();
  bench->add_option("--solvers", bench_solvers, "subset of frb,dr,itseng")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--seed", bench_seed, "base seed; trial t uses seed+t")->capture_default_str();
  CLI::Option* bench_out_opt =
      bench->add_option("--out", bench_out, "report path (default bench.csv, under FRB_OUT_DIR if set)");

  // verify
  long long verify_m = 300, verify_n = 600, verify_max_iter = 50000;
  std::uint64_t verify_seed = 0;
  double verify_lambda = 0.0, verify_tol = 1e-8;
  bool verify_no_enforce = false;
  std::string verify_out;
  CLI::App* verify = app.add_subcommand(
      "verify", "run FRB with tracing and check the descent/residual certificates");
  verify->add_option("--m", verify_m, "instance rows m")->capture_default_str();
  verify->add_option("--n", verify_n, "instance columns n")->capture_default_str();
  verify->add_option("--seed", verify_seed, "instance seed")->capture_default_str();
  verify->add_option("--lambda", verify_lambda, "step-size override");
  verify->add_option("--tol", verify_tol, "termination tolerance")->capture_default_str();
  verify->add_option("--max-iter", verify_max_iter, "iteration cap")->capture_default_str();
  verify->add_flag("--no-enforce", verify_no_enforce, "skip the FRB step-size rule check");
  verify->add_option("--out", verify_out, "write the trace CSV here");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("frbsolve");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(argv_storage.size());
  for (const std::string& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(solve)) {
      const SolverKind kind = parse_solver(solve_solver);
      const FeasibilityInstance inst = generate_instance(solve_m, solve_n, solve_seed);
      const CompositeProblem problem = make_feasibility_problem(inst);

      SolverConfig config = protocol_config(kind);
      if (solve_lambda != 0.0) {
        if (kind == SolverKind::dr) {
          config.dr_gamma = solve_lambda;
        } else {
          config.lambda = solve_lambda;
        }
      }
      config.tol = solve_tol;
      config.max_iter = solve_max_iter;
      config.enforce_stepsize_rule = !solve_no_enforce;
      config.record_trace = !solve_trace_out.empty();

      const RunReport report =
          run_solver(kind, problem, Eigen::VectorXd::Zero(problem.dim), config);
      if (!solve_trace_out.empty()) write_trace_csv(report.trace, solve_trace_out);

      out << "solver=" << solver_name(kind) << " m=" << solve_m << " n=" << solve_n
          << " seed=" << solve_seed << " iterations=" << report.iterations
          << " objective=" << detail::format_sci(report.terminal_objective)
          << " success=" << (report.terminal_objective < kSuccessThreshold ? 1 : 0)
          << " reason=" << termination_reason_name(report.reason) << "\n";
      return 0;
    }

    if (app.got_subcommand(bench)) {
      std::vector<std::pair<Eigen::Index, Eigen::Index>> sizes;
      if (bench_sizes.empty()) {
        sizes = default_bench_sizes();
      } else {
        for (const std::string& token : bench_sizes) sizes.push_back(detail::parse_size(token));
      }
      std::vector<SolverKind> kinds;
      for (const std::string& name : bench_solvers) kinds.push_back(parse_solver(name));

      const BenchReport report = run_suite(sizes, bench_trials, kinds, bench_seed);
      const std::string path = bench_out_opt->count() > 0
                                   ? bench_out
                                   : detail::resolve_default_out(bench_out);
      write_report(report, path);

      out << "m,n,solver,iter,fval_min,succ,trials\n";
      for (const BenchRow& row : report.rows) {
        out << row.m << ',' << row.n << ',' << solver_name(row.solver) << ','
            << row.mean_iter_ceiling << ',' << detail::format_sci(row.fval_min) << ','
            << row.success_count << ',' << row.trials << '\n';
      }
      out << "report written to " << path << "\n";
      return 0;
    }

    // verify
    const FeasibilityInstance inst = generate_instance(verify_m, verify_n, verify_seed);
    const CompositeProblem problem = make_feasibility_problem(inst);

    SolverConfig config = protocol_config(SolverKind::frb);
    if (verify_lambda != 0.0) config.lambda = verify_lambda;
    config.tol = verify_tol;
    config.max_iter = verify_max_iter;
    config.enforce_stepsize_rule = !verify_no_enforce;
    config.record_trace = true;
    config.record_iterates = true;

    const RunReport report =
        frb_solve(problem, Eigen::VectorXd::Zero(problem.dim), config);
    if (!verify_out.empty()) write_trace_csv(report.trace, verify_out);

    const std::vector<long long> descent = check_descent(report.trace);
    const std::vector<long long> residual = check_residual_bound(report.trace);

    out << "run: iterations=" << report.iterations
        << " objective=" << detail::format_sci(report.terminal_objective)
        << " reason=" << termination_reason_name(report.reason) << "\n";
    out << "descent violations: " << descent.size();
    if (!descent.empty()) out << " (first at k=" << descent.front() << ")";
    out << "\n";
    out << "residual violations: " << residual.size();
    if (!residual.empty()) out << " (first at k=" << residual.front() << ")";
    out << "\n";
    try {
      const RateFit fit = estimate_linear_rate(report.trace, report.final_x);
      out << "rate Q=" << detail::format_fixed(fit.q, 4)
          << " R2=" << detail::format_fixed(fit.r_squared, 4) << "\n";
    } catch (const std::runtime_error& e) {
      out << "rate: unavailable (" << e.what() << ")\n";
    }
    return descent.empty() && residual.empty() ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace frb::cli
