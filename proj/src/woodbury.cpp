#include "blocknys/woodbury.hpp"

#include <string>

#include "blocknys/errors.hpp"

namespace blocknys {

WoodburySolver::WoodburySolver(const NystromFactor& f, double psi)
    : n_(f.n()), psi_(psi) {
  if (!(psi > 0.0))
    throw InvalidSpecError("woodbury: shift psi must be > 0, got " +
                           std::to_string(psi));
  root_ = f.reduced_root();
  if (root_.cols() == 0) return;  // zero factor: solve is v / psi
  Eigen::MatrixXd inner = root_.transpose() * root_;
  inner.diagonal().array() += psi_;
  llt_.compute(inner);
  if (llt_.info() != Eigen::Success)
    throw InnerSingularityError(
        "woodbury: inner system is numerically singular at psi = " +
        std::to_string(psi));
}

Eigen::VectorXd WoodburySolver::solve(const Eigen::VectorXd& v) const {
  if (v.size() != n_)
    throw DimensionMismatchError("woodbury: vector length " +
                                 std::to_string(v.size()) +
                                 " does not match operator size " +
                                 std::to_string(n_));
  if (root_.cols() == 0) return v / psi_;
  const Eigen::VectorXd t = llt_.solve(root_.transpose() * v);
  return (v - root_ * t) / psi_;
}

Eigen::VectorXd woodbury_solve(const NystromFactor& f, double psi,
                               const Eigen::VectorXd& v, double epsilon) {
  if (epsilon < 0.0)
    throw InvalidSpecError("woodbury: epsilon must be >= 0");
  return WoodburySolver(f, psi).solve(v);
}

}  // namespace blocknys
