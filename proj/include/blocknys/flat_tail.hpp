#pragma once

#include <cstdint>
#include <utility>

#include <Eigen/Core>

#include "blocknys/leverage.hpp"
#include "blocknys/psd_operator.hpp"

namespace blocknys {

struct FlatTailConfig {
  double sparse_rows_per_k = 8.0;     // count-sketch rows = ceil(this * k)
  double jl_rows_per_log = 4.0;       // JL rows = ceil(this * ceil(log2 n))
  double precond_cols_per_row = 2.0;  // preconditioner sketch width factor
  double approx_factor = 16.0;        // declared T for the returned scores
  int max_retries = 3;          // fresh-seed retries on embedding failure
  int trace_probes = 64;        // Hutchinson probes above the desk cap
  Eigen::Index head_iters = 30;  // subspace iterations for the top-k estimate
  bool force_estimated_regularizers = false;  // exercise the above-cap path
  bool force_matrix_free = false;  // exercise the matvec-only path
  Eigen::Index cap = kDeskCap;
};

// Tail means lambda_bar = (1/k) sum_{i>k} eig_i(A) and lambda_tilde =
// (1/k) sum_{i>k} eig_i(A)^2. Oracle eigenvalues below the cap; trace probes
// plus subspace iteration for the head above it.
std::pair<double, double> flat_tail_regularizers(const PsdOperator& a,
                                                 Eigen::Index k,
                                                 const FlatTailConfig& cfg,
                                                 std::uint64_t seed);

struct FlatTailResult {
  RidgeScores scores;  // lambda = lambda_bar, method = kFlatTail
  double lambda_bar = 0.0;
  double lambda_tilde = 0.0;
  int retries_used = 0;
};

// Overestimates the lambda_bar-ridge scores of A through the squared system
// A^2 + lambda_tilde I, which has the same O(k) effective dimension when the
// tail past the k-th eigenvalue is flat: sketch M = Pi A, reduce with a JL
// embedding of [M; sqrt(lambda_tilde) I], apply (M^T M + lambda_tilde I)^{-1}
// by Woodbury with the inner Gram system solved by conjugate gradients under
// a sketched-Gram preconditioner, and read scores off compressed column
// norms. A numerically singular preconditioner or a stalled inner solve
// triggers a fresh-seed retry.
FlatTailResult fast_rls_flat_tail(const PsdOperator& a, Eigen::Index k,
                                  const FlatTailConfig& cfg,
                                  std::uint64_t seed);

}  // namespace blocknys
