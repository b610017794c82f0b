#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "blocknys/nystrom.hpp"

namespace blocknys {

// Direct solver for (A_hat + psi I) x = v where A_hat = Z Z^T is one Nystrom
// factor in reduced-root form:
//   (Z Z^T + psi I)^{-1} v = (v - Z (psi I + Z^T Z)^{-1} Z^T v) / psi.
// The rank x rank inner factorization is computed once at construction, so
// each solve costs two thin products.
class WoodburySolver {
 public:
  WoodburySolver() = default;
  WoodburySolver(const NystromFactor& f, double psi);

  Eigen::VectorXd solve(const Eigen::VectorXd& v) const;

  Eigen::Index n() const { return n_; }
  Eigen::Index rank() const { return root_.cols(); }
  double psi() const { return psi_; }

 private:
  Eigen::Index n_ = 0;
  double psi_ = 1.0;
  Eigen::MatrixXd root_;  // n x rank
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

// One-shot convenience wrapper. The direct factorization meets any epsilon
// down to the floating-point floor; epsilon only participates in validation.
Eigen::VectorXd woodbury_solve(const NystromFactor& f, double psi,
                               const Eigen::VectorXd& v, double epsilon = 0.0);

}  // namespace blocknys
