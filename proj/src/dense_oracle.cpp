#include "blocknys/dense_oracle.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <lapacke.h>

#include "blocknys/errors.hpp"
#include "blocknys/rng.hpp"

namespace blocknys {

namespace {

void check_square(const Eigen::MatrixXd& a, Eigen::Index cap,
                  const char* what) {
  if (a.rows() != a.cols())
    throw DimensionMismatchError(std::string(what) + ": matrix is not square");
  if (a.rows() > cap)
    throw TooLargeError(std::string(what) + ": size " +
                        std::to_string(a.rows()) + " exceeds cap " +
                        std::to_string(cap));
}

}  // namespace

SymEig sym_eig(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw DimensionMismatchError("sym_eig: matrix is not square");
  SymEig out;
  out.vectors = ((a + a.transpose()) * 0.5).eval();
  out.values.resize(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.rows());
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n,
                     out.values.data());
  if (info != 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success)
      throw Error("sym_eig: eigendecomposition failed");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  }
  return out;
}

LoewnerGap loewner_gap(const Eigen::MatrixXd& x, const Eigen::MatrixXd& yref,
                       Eigen::Index cap) {
  check_square(x, cap, "loewner_gap");
  check_square(yref, cap, "loewner_gap");
  if (x.rows() != yref.rows())
    throw DimensionMismatchError("loewner_gap: operand sizes differ");

  const SymEig ey = sym_eig(yref);
  const double ymax = ey.values.cwiseAbs().maxCoeff();
  const double ymin = ey.values.minCoeff();
  if (!(ymin > 1e-12 * ymax))
    throw SingularReferenceError(
        "loewner_gap: reference matrix is numerically singular");

  // T = Yref^{-1/2} X Yref^{-1/2} shares its eigenvalue range with the
  // generalized problem X v = g Yref v.
  const Eigen::VectorXd inv_sqrt = ey.values.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd half =
      ey.vectors * inv_sqrt.asDiagonal() * ey.vectors.transpose();
  const Eigen::MatrixXd t = half * x * half;
  const SymEig et = sym_eig(t);
  return LoewnerGap{et.values.minCoeff(), et.values.maxCoeff()};
}

Eigen::VectorXd dense_reg_solve(const Eigen::MatrixXd& a, double lambda,
                                const Eigen::VectorXd& v, Eigen::Index cap) {
  check_square(a, cap, "dense_reg_solve");
  if (v.size() != a.rows())
    throw DimensionMismatchError("dense_reg_solve: vector length mismatch");
  if (!(lambda >= 0.0))
    throw InvalidSpecError("dense_reg_solve: lambda must be nonnegative");
  Eigen::MatrixXd m = a;
  m.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw SingularReferenceError(
        "dense_reg_solve: A + lambda I is not positive definite");
  return llt.solve(v);
}

double spectral_norm_sym(const Eigen::MatrixXd& s, Eigen::Index cap) {
  check_square(s, cap, "spectral_norm_sym");
  const SymEig es = sym_eig(s);
  return es.values.cwiseAbs().maxCoeff();
}

Eigen::VectorXd dense_rls(const Eigen::MatrixXd& a, double lambda,
                          Eigen::Index cap) {
  check_square(a, cap, "dense_rls");
  if (!(lambda > 0.0))
    throw InvalidSpecError("dense_rls: lambda must be positive");
  const SymEig ea = sym_eig(a);
  // score_i = sum_j Q_ij^2 * mu_j / (mu_j + lambda); clamp tiny negative
  // eigenvalues of numerically PSD inputs to zero.
  Eigen::VectorXd weight(ea.values.size());
  for (Eigen::Index j = 0; j < ea.values.size(); ++j) {
    const double mu = std::max(ea.values(j), 0.0);
    weight(j) = mu / (mu + lambda);
  }
  return (ea.vectors.array().square().matrix() * weight).cwiseMax(0.0);
}

double estimate_lambda_max(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
    Eigen::Index n, std::uint64_t seed, int steps) {
  Rng rng = make_rng(seed);
  Eigen::VectorXd v = gaussian_vector(rng, n);
  v.normalize();
  double est = 0.0;
  for (int s = 0; s < steps; ++s) {
    Eigen::VectorXd w = apply(v);
    est = w.norm();
    if (!(est > 0.0)) return 0.0;
    v = w / est;
  }
  // Power iteration converges from below; pad toward the safe side.
  return 1.1 * est;
}

}  // namespace blocknys
