#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace blocknys {

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LevelStat {
  Eigen::Index q = 0;   // blocks averaged at this level (0: not block-based)
  double reg = 0.0;     // diagonal shift of the level's system
  long iters = 0;       // largest iteration count a single solve used here
};

struct SolveReport {
  std::vector<LevelStat> levels;
  double residual = 0.0;  // ||A u - v|| / ||v|| at exit
  double wall_ms = 0.0;
  double prep_ms = 0.0;
  bool converged = true;
  long block_applies = 0;  // single-factor applications consumed
};

// {"levels": [{"q", "reg", "iters"}...], "residual", "wall_ms", "prep_ms"}.
std::string solve_report_to_json(const SolveReport& report);

enum class PcgStop {
  kEnergyRelative,     // ||u - x*||_A <= epsilon ||x*||_A via the delayed
                       // quadrature estimate sum alpha_j r_j^T z_j
  kResidualAbsolute,   // ||v - A u|| <= residual_tol, verified on the true
                       // residual before declaring success
};

struct PcgOptions {
  double epsilon = 1e-8;
  double kappa_bound = 1.0;
  PcgStop stop = PcgStop::kEnergyRelative;
  double residual_tol = 0.0;
  Eigen::Index max_iterations = 0;  // 0: ceil(4 sqrt(kappa) log(2/epsilon))
  int delay_window = 4;
};

struct PcgOutcome {
  Eigen::VectorXd x;
  long iterations = 0;
  bool converged = false;
  double residual_rel = 0.0;
  double energy_total = 0.0;  // accumulated ||x||_A^2 (x0 = 0)
};

Eigen::Index pcg_iteration_cap(double kappa_bound, double epsilon);

// Preconditioned conjugate gradient from x0 = 0 with a flexible
// (Polak-Ribiere) direction update, so inexact preconditioners stay stable,
// and a full restart after five consecutive residual increases.
PcgOutcome pcg_run(const LinearMap& apply_a, const LinearMap& apply_prec,
                   const Eigen::VectorXd& v, const PcgOptions& opt);

// Energy-norm contract ||u - A^{-1}v||_A <= epsilon ||A^{-1}v||_A within
// ceil(4 sqrt(kappa_bound) log(2/epsilon)) iterations. On cap exhaustion the
// best iterate is returned with converged = false.
std::pair<Eigen::VectorXd, SolveReport> pcg(const LinearMap& apply_a,
                                            const LinearMap& apply_prec,
                                            const Eigen::VectorXd& v,
                                            double epsilon,
                                            double kappa_bound);

}  // namespace blocknys
