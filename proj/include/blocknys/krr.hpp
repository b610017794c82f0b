#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "blocknys/kernels.hpp"
#include "blocknys/pcg.hpp"
#include "blocknys/psd_operator.hpp"

namespace blocknys {

struct KrrConfig {
  double c_b = 2.0;  // per-block landmark budget multiplier
  double c_q = 1.0;  // block-count multiplier
  Eigen::Index b_override = 0;  // > 0 fixes the draws per block
  Eigen::Index q_override = 0;  // > 0 fixes the block count
  // Reduced averaging: sample at the milder inflation beta * alpha * n *
  // lambda using ~beta blocks instead of ~alpha, trading approximation slack
  // against sampling cost. Must satisfy 1 <= beta <= alpha.
  std::optional<double> beta;
  // Overrides the internal leverage computation; with a fixed seed this pins
  // the landmark draws, e.g. to compare regularizers on one approximation.
  std::optional<Eigen::VectorXd> scores;
  double fit_accuracy = 1e-9;  // Euclidean dual accuracy relative to ||y||
  Eigen::Index cap = kDeskCap;
};

// f(x) = (1/q) sum_i <u_i, k(L_i, x)> over q lists of b landmark points with
// precomputed coefficient vectors. Duplicates from the with-replacement draw
// are kept, so prediction costs exactly q*b kernel evaluations.
class KrrModel {
 public:
  Eigen::Index q() const {
    return static_cast<Eigen::Index>(landmarks_.size());
  }
  Eigen::Index b() const { return b_; }
  Eigen::Index dim() const { return dim_; }
  double lambda() const { return lambda_; }  // statistical scale; the matrix
                                             // shift is n * lambda
  double alpha() const { return alpha_; }
  const KernelSpec& kernel() const { return spec_; }
  const std::vector<Eigen::MatrixXd>& landmark_points() const {
    return landmarks_;  // q matrices of size b x dim
  }
  const std::vector<Eigen::VectorXd>& coefficients() const {
    return coeffs_;  // q vectors of length b
  }
  // Training-set index of every draw; rows align with landmark_points.
  const std::vector<std::vector<Eigen::Index>>& draws() const {
    return draws_;
  }
  // Dual vector z = (K_hat + n lambda I)^{-1} y. Empty on loaded models.
  const Eigen::VectorXd& dual() const { return dual_; }
  const SolveReport& fit_report() const { return fit_report_; }
  long long kernel_evals() const { return evals_->load(); }

  double predict(const Eigen::VectorXd& x) const;
  Eigen::VectorXd predict_batch(const Eigen::MatrixXd& points) const;

 private:
  friend KrrModel fit_block_krr(const Dataset& data, const KernelSpec& spec,
                                double lambda, double alpha,
                                const KrrConfig& cfg, std::uint64_t seed);
  friend KrrModel load_krr_model(const std::string& path);
  KrrModel() = default;

  KernelSpec spec_;
  double lambda_ = 0.0;
  double alpha_ = 1.0;
  Eigen::Index b_ = 0;
  Eigen::Index dim_ = 0;
  std::vector<Eigen::MatrixXd> landmarks_;
  std::vector<Eigen::VectorXd> coeffs_;
  std::vector<std::vector<Eigen::Index>> draws_;
  Eigen::VectorXd dual_;
  SolveReport fit_report_;
  std::shared_ptr<std::atomic<long long>> evals_;
};

// Samples q ~ alpha log n blocks of b landmarks from the ridge leverage
// scores of the kernel at n * alpha^2 * lambda, solves the regularized
// approximate system for the dual vector through the recursive ladder, and
// precomputes one coefficient vector per block.
KrrModel fit_block_krr(const Dataset& data, const KernelSpec& spec,
                       double lambda, double alpha, const KrrConfig& cfg,
                       std::uint64_t seed);

// Mean squared prediction error over the set.
double empirical_risk(const KrrModel& model, const Dataset& eval_data);

struct RegularizerSchedule {
  double zeta = 0.0;   // source smoothness in (0, 1)
  double gamma = 0.0;  // capacity exponent in (0, 1]
  Eigen::Index n = 0;
  double lambda_star = 0.0;
  bool in_regime = true;  // false when zeta >= 0.5; the value is still valid
};

// lambda* = constant * n^{-1/(2 zeta + gamma)} when 2 zeta + gamma > 1,
// else constant / n.
RegularizerSchedule schedule_lambda(double zeta, double gamma, Eigen::Index n,
                                    double constant = 1.0);

// Binary container: a JSON header with the kernel and shape metadata, then
// per block the draw indices, landmark features, and coefficients. Loaded
// models predict identically; the fit-time dual and report are not stored.
void save_krr_model(const std::string& path, const KrrModel& model);
KrrModel load_krr_model(const std::string& path);

}  // namespace blocknys
