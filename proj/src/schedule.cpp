#include "blocknys/schedule.hpp"

#include <cmath>
#include <string>

#include "blocknys/errors.hpp"

namespace blocknys {

SolverSchedule build_schedule(double alpha, double lambda,
                              double lambda_prime,
                              const ScheduleConfig& cfg) {
  if (!(cfg.c > 1.0))
    throw InvalidSpecError("schedule: level ratio c must be > 1, got " +
                           std::to_string(cfg.c));
  if (!(cfg.theta > 0.0 && cfg.theta < 1.0))
    throw InvalidSpecError("schedule: theta must lie in (0, 1)");
  if (!(cfg.phi > 0.0 && cfg.phi < 1.0))
    throw InvalidSpecError("schedule: phi must lie in (0, 1)");
  if (!(lambda > 0.0))
    throw InvalidSpecError("schedule: lambda must be > 0");
  if (!(lambda_prime >= lambda))
    throw InvalidSpecError("schedule: lambda_prime must be >= lambda");
  if (!(alpha >= 1.0))
    throw InvalidSpecError("schedule: alpha must be >= 1");
  if (cfg.q0 < 1)
    throw InvalidSpecError("schedule: block count must be >= 1");

  SolverSchedule s;
  s.c = cfg.c;
  s.theta = cfg.theta;
  s.phi = cfg.phi;
  s.lambda_tilde = lambda;
  s.lambda_prime = lambda_prime;

  const double ratio = lambda_prime / lambda;
  s.depth = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(
             std::ceil(std::log(std::sqrt(ratio)) / std::log(cfg.c))));

  const double c2 = cfg.c * cfg.c;
  // Degenerate ladder: the sampling and target regularizers coincide, so one
  // conjugate-gradient level sits directly on the base solve.
  const Eigen::Index last = ratio <= 1.0 + 1e-12 ? 0 : s.depth;
  Eigen::Index q = cfg.q0;
  double reg = lambda;
  for (Eigen::Index j = 0; j <= last; ++j) {
    s.levels.push_back(ScheduleLevel{q, reg});
    q = std::max<Eigen::Index>(
        1, static_cast<Eigen::Index>(
               std::ceil(static_cast<double>(q) / cfg.c)));
    reg *= c2;
  }
  s.base_psi = reg;
  return s;
}

}  // namespace blocknys
