#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "blocknys/block_nystrom.hpp"
#include "blocknys/pcg.hpp"
#include "blocknys/schedule.hpp"
#include "blocknys/woodbury.hpp"

namespace blocknys {

// Solver for (A_hat_[q] + lambda I) u = v through the geometric ladder: each
// level M_j = A_hat_[q_j] + reg_j I runs conjugate gradients preconditioned
// by the level below, and the coarsest level is a direct single-block
// Woodbury solve. Construction does all preprocessing (base factorization,
// top-level norm estimate); solve() is const and safe to call concurrently.
// The block operator must outlive the solver.
class RecursiveSolver {
 public:
  RecursiveSolver(const BlockNystromOperator& b, SolverSchedule schedule);

  // Euclidean contract ||u - (A_hat_[q] + lambda I)^{-1} v|| <= eps ||v||,
  // certified through the exit residual against the smallest possible
  // eigenvalue of the top system. Interior accuracy tightens automatically
  // (up to three halvings) before a stalled level raises ConvergenceError.
  Eigen::VectorXd solve(const Eigen::VectorXd& v, double eps,
                        SolveReport* report = nullptr) const;

  const SolverSchedule& schedule() const { return schedule_; }

  // Power-iteration upper estimate of the largest eigenvalue of the top
  // system, used to budget the top-level iteration cap.
  double top_lambda_max() const { return top_lambda_max_; }

 private:
  struct LevelFailure {
    std::size_t level;
    long iterations;
  };
  struct LocalStats {
    std::vector<long> iters;
    long block_applies = 0;
  };

  Eigen::VectorXd solve_level(std::size_t j, const Eigen::VectorXd& rhs,
                              double inner_eps, LocalStats& stats) const;

  const BlockNystromOperator* b_;
  SolverSchedule schedule_;
  WoodburySolver base_;
  double top_lambda_max_ = 1.0;
  double kappa_level_ = 1.0;  // c^2 (1+theta)^4, the per-level pcg bound
  double prep_ms_ = 0.0;
};

// One-shot wrapper around RecursiveSolver.
std::pair<Eigen::VectorXd, SolveReport> recursive_solve(
    const BlockNystromOperator& b, const Eigen::VectorXd& v, double eps,
    const SolverSchedule& schedule);

// Builds the default schedule for b's (lambda, alpha, q) first.
std::pair<Eigen::VectorXd, SolveReport> recursive_solve(
    const BlockNystromOperator& b, const Eigen::VectorXd& v, double eps);

}  // namespace blocknys
