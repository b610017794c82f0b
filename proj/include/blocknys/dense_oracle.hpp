#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "blocknys/psd_operator.hpp"

// Dense reference computations used to certify the randomized paths at desk
// scale. Everything here is cubic-cost and guarded by the size cap.

namespace blocknys {

struct SymEig {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns match values
};

// Symmetric eigendecomposition (divide and conquer when LAPACK is usable).
SymEig sym_eig(const Eigen::MatrixXd& a);

// Eigenvalue range of Yref^{-1/2} X Yref^{-1/2}. gmin/gmax bracket the
// Loewner order: gmin >= t certifies X >= t*Yref, gmax <= t certifies
// X <= t*Yref.
struct LoewnerGap {
  double gmin = 0.0;
  double gmax = 0.0;
};

LoewnerGap loewner_gap(const Eigen::MatrixXd& x, const Eigen::MatrixXd& yref,
                       Eigen::Index cap = kDeskCap);

// (A + lambda I)^{-1} v by dense Cholesky.
Eigen::VectorXd dense_reg_solve(const Eigen::MatrixXd& a, double lambda,
                                const Eigen::VectorXd& v,
                                Eigen::Index cap = kDeskCap);

// Largest absolute eigenvalue of a symmetric matrix.
double spectral_norm_sym(const Eigen::MatrixXd& s, Eigen::Index cap = kDeskCap);

// Ridge leverage scores diag(A (A + lambda I)^{-1}) by eigendecomposition.
Eigen::VectorXd dense_rls(const Eigen::MatrixXd& a, double lambda,
                          Eigen::Index cap = kDeskCap);

// Power-iteration upper estimate of the largest eigenvalue of a PSD operator
// apply; cheap and safe-side (scaled up by a small margin).
double estimate_lambda_max(const std::function<Eigen::VectorXd(
                               const Eigen::VectorXd&)>& apply,
                           Eigen::Index n, std::uint64_t seed,
                           int steps = 20);

}  // namespace blocknys
