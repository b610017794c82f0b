#include "blocknys/recursive_solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "blocknys/dense_oracle.hpp"
#include "blocknys/errors.hpp"

namespace blocknys {

namespace {

double relative_gap(double x, double y) {
  const double scale = std::max(std::abs(x), std::abs(y));
  return scale > 0.0 ? std::abs(x - y) / scale : 0.0;
}

}  // namespace

RecursiveSolver::RecursiveSolver(const BlockNystromOperator& b,
                                 SolverSchedule schedule)
    : b_(&b), schedule_(std::move(schedule)) {
  const auto t0 = std::chrono::steady_clock::now();
  if (schedule_.levels.empty())
    throw InvalidSpecError("recursive solver: schedule has no levels");
  if (schedule_.levels.front().q != b.q())
    throw InvalidSpecError(
        "recursive solver: schedule starts at " +
        std::to_string(schedule_.levels.front().q) +
        " blocks but the operator averages " + std::to_string(b.q()));
  if (relative_gap(schedule_.lambda_tilde, b.lambda()) > 1e-9)
    throw InvalidSpecError(
        "recursive solver: schedule regularizer does not match the operator");
  if (relative_gap(schedule_.lambda_prime, b.lambda_prime()) > 1e-9)
    throw InvalidSpecError(
        "recursive solver: schedule sampling regularizer does not match the "
        "operator");

  base_ = WoodburySolver(b.factors().front(), schedule_.base_psi);
  const double one_theta = 1.0 + schedule_.theta;
  kappa_level_ =
      schedule_.c * schedule_.c * one_theta * one_theta * one_theta * one_theta;
  top_lambda_max_ = estimate_lambda_max(
                        [this](const Eigen::VectorXd& x) {
                          return Eigen::VectorXd(b_->apply(x));
                        },
                        b.n(), b.seed() + 271) +
                    schedule_.lambda_tilde;
  prep_ms_ = std::chrono::duration<double, std::milli>(
                 std::chrono::steady_clock::now() - t0)
                 .count();
}

Eigen::VectorXd RecursiveSolver::solve_level(std::size_t j,
                                             const Eigen::VectorXd& rhs,
                                             double inner_eps,
                                             LocalStats& stats) const {
  if (j >= schedule_.levels.size()) {
    stats.block_applies += 1;
    return base_.solve(rhs);
  }
  const ScheduleLevel& level = schedule_.levels[j];
  auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    stats.block_applies += level.q;
    return b_->apply_prefix(x, level.q) + level.reg * x;
  };
  auto prec = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
    return solve_level(j + 1, r, inner_eps, stats);
  };
  PcgOptions opt;
  opt.epsilon = inner_eps;
  opt.kappa_bound = kappa_level_;
  const PcgOutcome out = pcg_run(apply, prec, rhs, opt);
  stats.iters[j] = std::max(stats.iters[j], out.iterations);
  if (!out.converged) throw LevelFailure{j, out.iterations};
  return out.x;
}

Eigen::VectorXd RecursiveSolver::solve(const Eigen::VectorXd& v, double eps,
                                       SolveReport* report) const {
  if (!(eps > 0.0))
    throw InvalidSpecError("recursive solver: eps must be > 0");
  const auto t0 = std::chrono::steady_clock::now();
  const double norm_v = v.norm();
  const double lam = schedule_.lambda_tilde;
  const ScheduleLevel& top = schedule_.levels.front();

  // Exit residual that certifies the Euclidean contract:
  // ||u - M0^{-1} v|| <= ||r|| / lambda_min(M0) <= ||r|| / lambda.
  const double tol = eps * lam * norm_v;
  const double kappa_top = std::max(top_lambda_max_ / lam, 1.0);

  LocalStats stats;
  stats.iters.assign(schedule_.levels.size(), 0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(v.size());
  bool converged = norm_v == 0.0;
  long top_iters = 0;

  double inner_eps = 1.0 / std::sqrt(10.0 * kappa_level_);
  std::size_t failed_level = 0;
  for (int attempt = 0; !converged && attempt < 4; ++attempt) {
    try {
      auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        stats.block_applies += top.q;
        return b_->apply_prefix(x, top.q) + top.reg * x;
      };
      auto prec = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
        return solve_level(1, r, inner_eps, stats);
      };
      PcgOptions opt;
      opt.stop = PcgStop::kResidualAbsolute;
      opt.residual_tol = tol;
      opt.epsilon = eps;
      opt.kappa_bound = kappa_level_;
      opt.max_iterations = pcg_iteration_cap(
          kappa_level_, std::min(0.5, eps * lam / std::sqrt(kappa_top)));
      const PcgOutcome out = pcg_run(apply, prec, v, opt);
      stats.iters[0] = std::max(stats.iters[0], out.iterations);
      top_iters = out.iterations;
      if (out.converged) {
        u = out.x;
        converged = true;
        break;
      }
      u = out.x;
      failed_level = 0;
    } catch (const LevelFailure& f) {
      failed_level = f.level;
    }
    inner_eps *= 0.5;  // tighten the ladder and retry
  }
  if (!converged)
    throw ConvergenceError(
        "recursive solve: level " + std::to_string(failed_level) +
        " failed to reach its tolerance after retries (top iterations " +
        std::to_string(top_iters) + ")");

  if (report) {
    report->levels.clear();
    for (std::size_t j = 0; j < schedule_.levels.size(); ++j)
      report->levels.push_back(LevelStat{schedule_.levels[j].q,
                                         schedule_.levels[j].reg,
                                         stats.iters[j]});
    report->levels.push_back(LevelStat{1, schedule_.base_psi, 0});
    report->residual =
        norm_v > 0.0
            ? (v - b_->apply(u) - lam * u).norm() / norm_v
            : 0.0;
    report->converged = true;
    report->block_applies = stats.block_applies + (norm_v > 0.0 ? b_->q() : 0);
    report->prep_ms = prep_ms_;
    report->wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  }
  return u;
}

std::pair<Eigen::VectorXd, SolveReport> recursive_solve(
    const BlockNystromOperator& b, const Eigen::VectorXd& v, double eps,
    const SolverSchedule& schedule) {
  RecursiveSolver solver(b, schedule);
  SolveReport report;
  Eigen::VectorXd u = solver.solve(v, eps, &report);
  return {std::move(u), std::move(report)};
}

std::pair<Eigen::VectorXd, SolveReport> recursive_solve(
    const BlockNystromOperator& b, const Eigen::VectorXd& v, double eps) {
  ScheduleConfig cfg;
  cfg.q0 = b.q();
  return recursive_solve(
      b, v, eps, build_schedule(b.alpha(), b.lambda(), b.lambda_prime(), cfg));
}

}  // namespace blocknys
