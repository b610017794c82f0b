#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "blocknys/psd_operator.hpp"

namespace blocknys {

// Result of i.i.d. with-replacement landmark sampling; duplicates are kept
// so the draw is exactly reproducible from (scores, b, seed).
struct LandmarkSet {
  std::vector<Eigen::Index> indices;
  std::uint64_t seed = 0;
};

// Draws b indices with probability proportional to the scores.
LandmarkSet sample_landmarks(const Eigen::VectorXd& scores, Eigen::Index b,
                             std::uint64_t seed);

// One Nystrom factor A[:,S] (A[S,S])^+ A[S,:]. Repeated draws are collapsed
// to their unique support before factorization: the approximation depends
// only on the span of the selected columns, so this changes nothing while
// keeping the inner system small. Genuine rank deficiency of A[S,S] is still
// handled by an eigenvalue-thresholded pseudo-inverse.
class NystromFactor {
 public:
  NystromFactor() = default;

  Eigen::Index n() const { return c_.rows(); }
  Eigen::Index width() const { return c_.cols(); }  // unique landmark count
  Eigen::Index rank() const { return rank_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Eigen::Index>& landmarks() const { return landmarks_; }
  const Eigen::MatrixXd& c() const { return c_; }
  const Eigen::MatrixXd& w() const { return w_; }

  // Pseudo-inverse of the landmark Gram block, materialized on demand.
  const Eigen::MatrixXd& wdag() const;

  // A_hat v = C (W^+ (C^T v)); O(n * width) plus the inner solve.
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

  // W^+ x without materializing the pseudo-inverse.
  Eigen::VectorXd w_pinv_apply(const Eigen::VectorXd& x) const;

  // Reduced factor Z = C U_r diag(sigma_r)^{-1/2}, so A_hat = Z Z^T. Used to
  // materialize sums of factors with symmetric rank updates.
  Eigen::MatrixXd reduced_root() const;

  Eigen::MatrixXd materialize_approx(Eigen::Index cap = kDeskCap) const;

  friend NystromFactor build_factor(const PsdOperator& a,
                                    const LandmarkSet& landmarks);
  friend NystromFactor load_factor_stream(std::istream& in,
                                          const std::string& what);

 private:
  void finalize_from_w();

  std::vector<Eigen::Index> landmarks_;  // unique, ascending
  std::uint64_t seed_ = 0;
  Eigen::MatrixXd c_;  // n x width
  Eigen::MatrixXd w_;  // width x width
  Eigen::Index rank_ = 0;

  // Full-rank blocks solve through Cholesky; rank-deficient ones through the
  // thresholded eigendecomposition (basis columns scaled by 1/sigma).
  bool use_llt_ = false;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd eig_basis_;    // width x rank
  Eigen::VectorXd eig_sigma_;    // rank, descending
  mutable Eigen::MatrixXd wdag_cache_;
  mutable bool wdag_ready_ = false;
};

NystromFactor build_factor(const PsdOperator& a, const LandmarkSet& landmarks);

// Spectral norm of A - A_hat via the dense oracle.
double check_operator_error(const PsdOperator& a, const NystromFactor& f,
                            Eigen::Index cap = kDeskCap);

// Binary container: four little-endian u64 (n, width, rank, seed) followed by
// C and Wdag row-major as little-endian doubles. Landmark indices are not
// part of the container; a loaded factor supports apply and solves but keeps
// an empty landmark list.
void save_factor(const std::string& path, const NystromFactor& f);
NystromFactor load_factor(const std::string& path);

// Stream variants used by composite containers.
void save_factor_stream(std::ostream& out, const NystromFactor& f);
NystromFactor load_factor_stream(std::istream& in, const std::string& what);

}  // namespace blocknys
