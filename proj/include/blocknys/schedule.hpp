#pragma once

#include <vector>

#include <Eigen/Core>

namespace blocknys {

struct ScheduleConfig {
  double c = 4.0;      // regularizer ratio between adjacent levels
  double theta = 0.5;  // per-level block-concentration slack
  double phi = 0.5;    // cost-scaling exponent target (reporting only)
  Eigen::Index q0 = 1;  // block count at the finest level
};

struct ScheduleLevel {
  Eigen::Index q = 1;  // blocks averaged at this level
  double reg = 0.0;    // diagonal shift of the level's system
};

// Geometric ladder of regularized systems M_j = A_hat_[q_j] + reg_j I with
// reg_0 = lambda_tilde, reg_{j+1} = c^2 reg_j and q_{j+1} = max(1,
// ceil(q_j / c)). Each level is solved by conjugate gradients preconditioned
// with the next-coarser level; under the shifted ladder a single direct
// solve (base_psi) closes the recursion.
struct SolverSchedule {
  double c = 4.0;
  double theta = 0.5;
  double phi = 0.5;
  double lambda_tilde = 0.0;  // finest (target) regularizer
  double lambda_prime = 0.0;  // sampling regularizer the blocks were built at
  Eigen::Index depth = 1;     // ladder depth k from the r_k recursion
  std::vector<ScheduleLevel> levels;  // finest first
  double base_psi = 0.0;  // shift of the direct single-block solve
};

// Builds the ladder for a block approximation targeting regularizer lambda
// with sampling regularizer lambda_prime = alpha^2 lambda. The finest
// regularizer lambda_tilde equals lambda. When lambda_prime == lambda the
// ladder collapses to one level sitting directly on the base solve.
SolverSchedule build_schedule(double alpha, double lambda,
                              double lambda_prime,
                              const ScheduleConfig& cfg = ScheduleConfig{});

}  // namespace blocknys
