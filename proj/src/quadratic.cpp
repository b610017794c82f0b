#include "blocknys/quadratic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include <json.hpp>

#include "blocknys/dense_oracle.hpp"
#include "blocknys/errors.hpp"
#include "blocknys/flat_tail.hpp"
#include "blocknys/recursive_solve.hpp"
#include "blocknys/schedule.hpp"

namespace blocknys {

std::string quadratic_report_to_json(const QuadraticReport& report) {
  nlohmann::ordered_json j =
      nlohmann::ordered_json::parse(solve_report_to_json(report.solve));
  j["outer_iters"] = report.outer_iterations;
  j["cond_measured"] = report.cond_measured;
  j["alpha"] = report.alpha;
  j["k"] = report.head_size;
  j["lambda_bar"] = report.lambda_bar;
  j["lambda"] = report.lambda;
  j["energy_ratio"] = report.achieved_energy_ratio;
  return j.dump();
}

double measured_condition(const PsdOperator& a, const BlockNystromOperator& b,
                          Eigen::Index cap) {
  const Eigen::MatrixXd dense = a.materialize(cap);
  Eigen::MatrixXd ref = b.materialize_approx(cap);
  ref.diagonal().array() += b.lambda();
  const LoewnerGap gap = loewner_gap(dense, ref, cap);
  return gap.gmax / gap.gmin;
}

std::pair<Eigen::VectorXd, QuadraticReport> solve_quadratic(
    const QuadraticProblem& problem, double eps, std::uint64_t seed,
    const QuadraticConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (problem.a == nullptr)
    throw InvalidSpecError("quadratic: problem carries no operator");
  const PsdOperator& a = *problem.a;
  const Eigen::Index n = a.n();
  if (problem.rhs.size() != n)
    throw DimensionMismatchError(
        "quadratic: right-hand side length " +
        std::to_string(problem.rhs.size()) + " does not match n = " +
        std::to_string(n));
  if (problem.head_size < 1 || problem.head_size >= n)
    throw InvalidSpecError("quadratic: head size must satisfy 1 <= k < n");
  if (!(eps > 0.0 && eps < 1.0))
    throw InvalidSpecError("quadratic: eps must lie in (0, 1)");

  if (n <= cfg.cap) {
    const SymEig eig = sym_eig(a.materialize(cfg.cap));
    if (!(eig.values(0) > 0.0))
      throw NotStronglyConvexError(
          "quadratic: smallest eigenvalue is " +
          std::to_string(eig.values(0)) + "; the objective has no unique "
          "minimizer");
  }

  FlatTailConfig flat_cfg;
  flat_cfg.cap = cfg.cap;
  const FlatTailResult flat =
      fast_rls_flat_tail(a, problem.head_size, flat_cfg, seed);
  if (!(flat.lambda_bar > 0.0))
    throw NotStronglyConvexError(
        "quadratic: the spectral tail past the head vanishes");

  const double alpha = std::max(
      1.0, std::sqrt(static_cast<double>(n) /
                     static_cast<double>(problem.head_size)));
  const double lambda = flat.lambda_bar / (alpha * alpha);

  BlockNystromConfig bcfg;
  bcfg.leverage = LeverageMethod::kPrecomputed;
  bcfg.scores = flat.scores.scores;
  bcfg.b_override = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::ceil(cfg.c_b * flat.scores.sum())));
  bcfg.cap = cfg.cap;
  const BlockNystromOperator bn =
      build_block_nystrom(a, lambda, alpha, bcfg, seed + 1000);

  ScheduleConfig scfg;
  scfg.q0 = bn.q();
  const RecursiveSolver solver(
      bn, build_schedule(alpha, lambda, bn.lambda_prime(), scfg));
  const auto t_prep = std::chrono::steady_clock::now();

  QuadraticReport report;
  report.alpha = alpha;
  report.head_size = problem.head_size;
  report.lambda_bar = flat.lambda_bar;
  report.lambda = lambda;
  report.solve.levels.assign(solver.schedule().levels.size() + 1,
                             LevelStat{});
  long precond_applies = 0;

  auto apply_a = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return a.matvec(x);
  };
  auto precond = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
    SolveReport inner;
    Eigen::VectorXd u = solver.solve(r, cfg.precond_accuracy, &inner);
    for (std::size_t j = 0; j < inner.levels.size(); ++j) {
      report.solve.levels[j].q = inner.levels[j].q;
      report.solve.levels[j].reg = inner.levels[j].reg;
      report.solve.levels[j].iters =
          std::max(report.solve.levels[j].iters, inner.levels[j].iters);
    }
    precond_applies += inner.block_applies;
    return u;
  };

  PcgOptions opt;
  opt.epsilon = std::sqrt(eps);
  opt.kappa_bound = std::max(1.0, cfg.outer_kappa_per_alpha * alpha);
  const PcgOutcome out = pcg_run(apply_a, precond, problem.rhs, opt);
  if (!out.converged)
    throw ConvergenceError(
        "quadratic: outer loop did not converge within " +
        std::to_string(out.iterations) + " iterations");

  report.outer_iterations = out.iterations;
  report.solve.converged = true;
  report.solve.block_applies = precond_applies;
  const double norm_rhs = problem.rhs.norm();
  report.solve.residual =
      norm_rhs > 0.0 ? (problem.rhs - a.matvec(out.x)).norm() / norm_rhs
                     : 0.0;
  if (cfg.measure_condition && n <= cfg.cap)
    report.cond_measured = measured_condition(a, bn, cfg.cap);
  if (problem.true_min.has_value()) {
    const double g_hat =
        0.5 * out.x.dot(a.matvec(out.x)) - out.x.dot(problem.rhs);
    const double denom = -problem.true_min.value();  // g(0) = 0
    report.achieved_energy_ratio =
        denom > 0.0 ? (g_hat - problem.true_min.value()) / denom : 0.0;
  }
  report.solve.prep_ms =
      std::chrono::duration<double, std::milli>(t_prep - t0).count();
  report.solve.wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
  return {out.x, report};
}

}  // namespace blocknys
