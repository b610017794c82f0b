#include "blocknys/pcg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

#include <json.hpp>

#include "blocknys/errors.hpp"

namespace blocknys {

std::string solve_report_to_json(const SolveReport& report) {
  nlohmann::ordered_json j;
  j["levels"] = nlohmann::ordered_json::array();
  for (const auto& level : report.levels) {
    nlohmann::ordered_json l;
    l["q"] = level.q;
    l["reg"] = level.reg;
    l["iters"] = level.iters;
    j["levels"].push_back(l);
  }
  j["residual"] = report.residual;
  j["converged"] = report.converged;
  j["block_applies"] = report.block_applies;
  j["wall_ms"] = report.wall_ms;
  j["prep_ms"] = report.prep_ms;
  return j.dump();
}

Eigen::Index pcg_iteration_cap(double kappa_bound, double epsilon) {
  const double kappa = std::max(kappa_bound, 1.0);
  const double eps = std::min(std::max(epsilon, 1e-300), 0.5);
  return static_cast<Eigen::Index>(
      std::ceil(4.0 * std::sqrt(kappa) * std::log(2.0 / eps)));
}

PcgOutcome pcg_run(const LinearMap& apply_a, const LinearMap& apply_prec,
                   const Eigen::VectorXd& v, const PcgOptions& opt) {
  if (!(opt.epsilon > 0.0)) throw InvalidSpecError("pcg: epsilon must be > 0");
  if (!(opt.kappa_bound >= 1.0))
    throw InvalidSpecError("pcg: kappa bound must be >= 1");
  if (opt.stop == PcgStop::kResidualAbsolute && !(opt.residual_tol > 0.0))
    throw InvalidSpecError("pcg: residual tolerance must be > 0");

  PcgOutcome out;
  const Eigen::Index n = v.size();
  out.x = Eigen::VectorXd::Zero(n);
  const double norm_v = v.norm();
  if (norm_v == 0.0) {
    out.converged = true;
    return out;
  }

  const Eigen::Index cap = opt.max_iterations > 0
                               ? opt.max_iterations
                               : pcg_iteration_cap(opt.kappa_bound, opt.epsilon);
  const double eps_sq = opt.epsilon * opt.epsilon;
  const int window = std::max(opt.delay_window, 1);

  Eigen::VectorXd r = v;
  Eigen::VectorXd z = apply_prec(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  std::deque<double> recent;
  double prev_rnorm = norm_v;
  int growth = 0;
  int residual_recomputes = 0;

  for (Eigen::Index k = 1; k <= cap; ++k) {
    const Eigen::VectorXd ap = apply_a(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) {  // degenerate direction: either we are at the
                         // numerical floor already, or conjugacy broke down
      out.iterations = k - 1;
      out.converged = r.norm() <= 1e-12 * norm_v;
      break;
    }
    const double alpha = rz / pap;
    out.x += alpha * p;
    const Eigen::VectorXd r_old = r;
    r -= alpha * ap;
    const double gamma = alpha * rz;
    out.energy_total += std::max(gamma, 0.0);
    out.iterations = k;

    const double rnorm = r.norm();
    if (rnorm <= 1e-14 * norm_v) {  // hit the floating-point floor
      out.converged = true;
      break;
    }
    if (opt.stop == PcgStop::kResidualAbsolute && rnorm <= opt.residual_tol) {
      const Eigen::VectorXd true_r = v - apply_a(out.x);
      if (true_r.norm() <= opt.residual_tol) {
        r = true_r;
        out.converged = true;
        break;
      }
      if (++residual_recomputes <= 3) r = true_r;  // resync and keep going
    }
    if (opt.stop == PcgStop::kEnergyRelative) {
      recent.push_back(std::max(gamma, 0.0));
      if (static_cast<int>(recent.size()) > window) recent.pop_front();
      if (k >= window && out.energy_total > 0.0) {
        double tail = 0.0;
        for (double g : recent) tail += g;
        if (tail <= eps_sq * out.energy_total) {
          out.converged = true;
          break;
        }
      }
    }

    growth = rnorm > prev_rnorm ? growth + 1 : 0;
    prev_rnorm = rnorm;
    if (growth >= 5) {  // conjugacy lost: rebuild from the true residual
      r = v - apply_a(out.x);
      z = apply_prec(r);
      p = z;
      rz = r.dot(z);
      prev_rnorm = r.norm();
      growth = 0;
      recent.clear();
      continue;
    }

    z = apply_prec(r);
    const double beta =
        rz > 0.0 ? std::max(0.0, z.dot(r - r_old) / rz) : 0.0;
    rz = r.dot(z);
    p = z + beta * p;
  }

  out.residual_rel = r.norm() / norm_v;
  return out;
}

std::pair<Eigen::VectorXd, SolveReport> pcg(const LinearMap& apply_a,
                                            const LinearMap& apply_prec,
                                            const Eigen::VectorXd& v,
                                            double epsilon,
                                            double kappa_bound) {
  const auto t0 = std::chrono::steady_clock::now();
  PcgOptions opt;
  opt.epsilon = epsilon;
  opt.kappa_bound = kappa_bound;
  PcgOutcome run = pcg_run(apply_a, apply_prec, v, opt);

  SolveReport report;
  report.levels.push_back(LevelStat{0, 0.0, run.iterations});
  const double norm_v = v.norm();
  report.residual =
      norm_v > 0.0 ? (v - apply_a(run.x)).norm() / norm_v : 0.0;
  report.converged = run.converged;
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return {std::move(run.x), std::move(report)};
}

}  // namespace blocknys
