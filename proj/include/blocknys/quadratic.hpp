#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "blocknys/block_nystrom.hpp"
#include "blocknys/pcg.hpp"
#include "blocknys/psd_operator.hpp"

namespace blocknys {

// Minimize g(x) = x' A x / 2 - x' rhs for a positive definite A whose
// spectrum has at most `head_size` eigenvalues well above a flat tail. The
// problem keeps a non-owning view of A; the operator must outlive it.
struct QuadraticProblem {
  const PsdOperator* a = nullptr;
  Eigen::VectorXd rhs;
  Eigen::Index head_size = 1;
  std::optional<double> true_min;  // oracle value of g at the minimizer
};

struct QuadraticConfig {
  double c_b = 2.0;  // landmark budget: ceil(c_b * sum of sampling scores)
  double outer_kappa_per_alpha = 64.0;  // iteration-budget condition model
  double precond_accuracy = 5e-4;  // Euclidean accuracy of each ladder call
  bool measure_condition = true;   // dense certificate below the cap
  Eigen::Index cap = kDeskCap;
};

struct QuadraticReport {
  SolveReport solve;          // outer loop: residual, wall, block applies
  long outer_iterations = 0;
  double cond_measured = 0.0;  // 0 when not measured
  double alpha = 1.0;
  Eigen::Index head_size = 0;
  double lambda_bar = 0.0;   // flat-tail mean used as sampling regularizer
  double lambda = 0.0;       // preconditioner shift lambda_bar / alpha^2
  double achieved_energy_ratio = 0.0;  // (g(x)-g*)/(g(0)-g*) when oracle known
};

std::string quadratic_report_to_json(const QuadraticReport& report);

// Flat-tail scores at lambda_bar -> alpha = sqrt(n/k) -> block approximation
// at lambda = lambda_bar / alpha^2 -> conjugate gradients on A preconditioned
// by the recursive ladder. Guarantees g(x) - g* <= eps * (g(0) - g*).
std::pair<Eigen::VectorXd, QuadraticReport> solve_quadratic(
    const QuadraticProblem& problem, double eps, std::uint64_t seed,
    const QuadraticConfig& cfg = QuadraticConfig{});

// gmax/gmin of the dense Loewner bracket of A against A_hat + lambda I: the
// measured condition number of the preconditioned system.
double measured_condition(const PsdOperator& a, const BlockNystromOperator& b,
                          Eigen::Index cap = kDeskCap);

}  // namespace blocknys
