#include "blocknys/flat_tail.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include <Eigen/Dense>

#include "blocknys/dense_oracle.hpp"
#include "blocknys/errors.hpp"
#include "blocknys/pcg.hpp"
#include "blocknys/rng.hpp"
#include "blocknys/sketch.hpp"

namespace blocknys {

namespace {

void check_tail_index(Eigen::Index n, Eigen::Index k) {
  if (k < 1 || k >= n)
    throw InvalidSpecError(
        "flat tail: head size k must satisfy 1 <= k < n, got k=" +
        std::to_string(k) + " with n=" + std::to_string(n));
}

Eigen::Index log2_ceil(Eigen::Index n) {
  Eigen::Index bits = 0;
  while ((Eigen::Index{1} << bits) < n) ++bits;
  return std::max<Eigen::Index>(bits, 1);
}

// Block subspace iteration on the squared operator with Rayleigh-Ritz
// extraction. values(i) estimates the i-th largest eigenvalue of A^2 from
// below (so derived tail means stay on the safe, over-regularized side);
// vectors holds the matching Ritz directions, used to deflate the head out
// of the trace probes.
struct HeadEstimate {
  Eigen::VectorXd values;   // descending, length k, estimates of eig_i(A)^2
  Eigen::MatrixXd vectors;  // n x k
};

HeadEstimate head_square_estimates(const PsdOperator& a, Eigen::Index k,
                                   Eigen::Index iters, std::uint64_t seed) {
  const Eigen::Index n = a.n();
  const Eigen::Index cols = std::min(n, k + 10);
  Rng rng = make_rng(seed);
  Eigen::MatrixXd q = gaussian_matrix(rng, n, cols);
  auto apply_squared = [&](const Eigen::MatrixXd& block) {
    Eigen::MatrixXd out(n, block.cols());
    for (Eigen::Index j = 0; j < block.cols(); ++j)
      out.col(j) = a.matvec(a.matvec(block.col(j)));
    return out;
  };
  for (Eigen::Index it = 0; it < std::max<Eigen::Index>(iters, 1); ++it) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
    q = qr.householderQ() * Eigen::MatrixXd::Identity(n, cols);
    q = apply_squared(q);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
  q = qr.householderQ() * Eigen::MatrixXd::Identity(n, cols);
  const Eigen::MatrixXd t = q.transpose() * apply_squared(q);
  const SymEig eig = sym_eig(0.5 * (t + t.transpose()));
  HeadEstimate head;
  head.values.resize(k);
  head.vectors.resize(n, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    head.values(i) = std::max(eig.values(cols - 1 - i), 0.0);
    head.vectors.col(i) = q * eig.vectors.col(cols - 1 - i);
  }
  return head;
}

// M = Pi A as an r x n dense block, using column access below the cap and a
// signed-indicator matvec per sketch row above it (A is symmetric, so
// row i of M equals A applied to the i-th signed bucket indicator).
Eigen::MatrixXd sketch_rows_times_a(const PsdOperator& a, const CountSketch& pi,
                                    bool matrix_free, Eigen::Index cap) {
  const Eigen::Index n = a.n();
  if (!matrix_free && n <= cap) {
    const Eigen::MatrixXd dense = a.materialize(cap);
    return count_sketch_right_t(pi, dense).transpose();
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(pi.rows, n);
  std::vector<std::vector<Eigen::Index>> members(
      static_cast<std::size_t>(pi.rows));
  for (Eigen::Index j = 0; j < n; ++j)
    members[static_cast<std::size_t>(pi.bucket[static_cast<std::size_t>(j)])]
        .push_back(j);
  Eigen::VectorXd indicator = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < pi.rows; ++i) {
    const auto& bucket = members[static_cast<std::size_t>(i)];
    if (bucket.empty()) continue;
    indicator.setZero();
    for (Eigen::Index j : bucket)
      indicator(j) = pi.sign[static_cast<std::size_t>(j)];
    m.row(i) = a.matvec(indicator).transpose();
  }
  return m;
}

// R * A for a thin R (rows x n): dense product below the cap, one matvec per
// row of R above it.
Eigen::MatrixXd thin_times_a(const PsdOperator& a, const Eigen::MatrixXd& r,
                             bool matrix_free, Eigen::Index cap) {
  const Eigen::Index n = a.n();
  if (!matrix_free && n <= cap) return r * a.materialize(cap);
  Eigen::MatrixXd out(r.rows(), n);
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    out.row(i) = a.matvec(r.row(i).transpose()).transpose();
  return out;
}

struct AttemptFailure {};

Eigen::MatrixXd solve_squared_system(const Eigen::MatrixXd& m,
                                     double lambda_tilde,
                                     const Eigen::MatrixXd& rhs_rows,
                                     double precond_cols_per_row,
                                     std::uint64_t seed) {
  const Eigen::Index r = m.rows();
  const Eigen::Index n = m.cols();
  // Sketched Gram preconditioner for M M^T + lambda_tilde I.
  const Eigen::Index r2 = std::min(
      n, static_cast<Eigen::Index>(std::ceil(
             precond_cols_per_row * static_cast<double>(r) *
             static_cast<double>(log2_ceil(n)))));
  const CountSketch s2 = make_count_sketch(r2, n, seed);
  const Eigen::MatrixXd m2 = count_sketch_right_t(s2, m);
  Eigen::MatrixXd gram = m2 * m2.transpose();
  gram.diagonal().array() += lambda_tilde;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw AttemptFailure{};

  auto apply_inner = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return m * (m.transpose() * v) + lambda_tilde * v;
  };
  auto apply_prec = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return llt.solve(v);
  };

  // (M^T M + lambda_tilde I)^{-1} g = (g - M^T y) / lambda_tilde with
  // y = (M M^T + lambda_tilde I)^{-1} M g.
  Eigen::MatrixXd out(rhs_rows.rows(), n);
  for (Eigen::Index row = 0; row < rhs_rows.rows(); ++row) {
    const Eigen::VectorXd g = rhs_rows.row(row).transpose();
    const Eigen::VectorXd mg = m * g;
    if (mg.norm() == 0.0) {
      out.row(row) = g.transpose() / lambda_tilde;
      continue;
    }
    PcgOptions opt;
    opt.stop = PcgStop::kResidualAbsolute;
    opt.residual_tol = 1e-11 * mg.norm();
    opt.epsilon = 1e-12;
    opt.max_iterations = 400;
    const PcgOutcome y = pcg_run(apply_inner, apply_prec, mg, opt);
    if (!y.converged) throw AttemptFailure{};
    out.row(row) = (g - m.transpose() * y.x).transpose() / lambda_tilde;
  }
  return out;
}

}  // namespace

std::pair<double, double> flat_tail_regularizers(const PsdOperator& a,
                                                 Eigen::Index k,
                                                 const FlatTailConfig& cfg,
                                                 std::uint64_t seed) {
  const Eigen::Index n = a.n();
  check_tail_index(n, k);
  const double denom = static_cast<double>(k);
  if (!cfg.force_estimated_regularizers && n <= cfg.cap) {
    const SymEig eig = sym_eig(a.materialize(cfg.cap));
    double sum1 = 0.0;
    double sum2 = 0.0;
    for (Eigen::Index i = 0; i < n - k; ++i) {  // ascending: tail comes first
      const double v = std::max(eig.values(i), 0.0);
      sum1 += v;
      sum2 += v * v;
    }
    return {sum1 / denom, sum2 / denom};
  }

  // Above the cap: exact trace from the diagonal minus Ritz estimates of the
  // head gives the plain tail mean, and head-deflated trace probes estimate
  // the squared tail mean directly. Deflation keeps the probe variance on
  // the scale of the tail instead of the full squared trace, which the head
  // can dominate by orders of magnitude.
  const HeadEstimate head =
      head_square_estimates(a, k, cfg.head_iters, seed + 11);
  double trace = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) trace += a.entry(i, i);
  double tail_sq = 0.0;
  const int probes = std::max(cfg.trace_probes, 1);
  for (int p = 0; p < probes; ++p) {
    Rng rng = make_rng(seed + 7000 + static_cast<std::uint64_t>(p));
    Eigen::VectorXd z = rademacher_vector(rng, n);
    z -= head.vectors * (head.vectors.transpose() * z);
    tail_sq += a.matvec(z).squaredNorm();
  }
  tail_sq /= static_cast<double>(probes);
  const double lambda_bar =
      std::max(0.0, (trace - head.values.array().sqrt().sum()) / denom);
  const double lambda_tilde = std::max(0.0, tail_sq / denom);
  return {lambda_bar, lambda_tilde};
}

FlatTailResult fast_rls_flat_tail(const PsdOperator& a, Eigen::Index k,
                                  const FlatTailConfig& cfg,
                                  std::uint64_t seed) {
  const Eigen::Index n = a.n();
  check_tail_index(n, k);
  const auto [lambda_bar, lambda_tilde] =
      flat_tail_regularizers(a, k, cfg, seed);
  if (!(lambda_tilde > 0.0))
    throw InvalidSpecError(
        "flat tail: the tail past the head is numerically zero, so the "
        "ridge target is not defined; shrink k below the rank");

  const Eigen::Index sketch_rows = static_cast<Eigen::Index>(
      std::ceil(cfg.sparse_rows_per_k * static_cast<double>(k)));
  const Eigen::Index jl_rows = static_cast<Eigen::Index>(std::ceil(
      cfg.jl_rows_per_log * static_cast<double>(log2_ceil(n))));
  const double root_tilde = std::sqrt(lambda_tilde);

  for (int attempt = 0; attempt <= std::max(cfg.max_retries, 0); ++attempt) {
    const std::uint64_t sub =
        seed + 1000003ull * static_cast<std::uint64_t>(attempt);
    try {
      const CountSketch pi = make_count_sketch(sketch_rows, n, sub + 1);
      const Eigen::MatrixXd m =
          sketch_rows_times_a(a, pi, cfg.force_matrix_free, cfg.cap);

      // S [M; sqrt(lambda_tilde) I] without forming the stacked matrix.
      const Eigen::MatrixXd s_jl =
          gaussian_embedding(jl_rows, sketch_rows + n, sub + 2);
      Eigen::MatrixXd sb = s_jl.leftCols(sketch_rows) * m;
      sb.noalias() += root_tilde * s_jl.rightCols(n);

      const Eigen::MatrixXd r = solve_squared_system(
          m, lambda_tilde, sb, cfg.precond_cols_per_row, sub + 3);
      const Eigen::MatrixXd ra =
          thin_times_a(a, r, cfg.force_matrix_free, cfg.cap);

      FlatTailResult result;
      result.lambda_bar = lambda_bar;
      result.lambda_tilde = lambda_tilde;
      result.retries_used = attempt;
      result.scores.lambda = lambda_bar;
      result.scores.method = ScoreMethod::kFlatTail;
      result.scores.approx_factor = cfg.approx_factor;
      result.scores.scores.resize(n);
      for (Eigen::Index i = 0; i < n; ++i)
        result.scores.scores(i) =
            std::clamp(ra.col(i).squaredNorm(), 0.0, 1.0);
      return result;
    } catch (const AttemptFailure&) {
      continue;
    }
  }
  throw EmbeddingFailureError(
      "flat tail: sketched solver failed to converge after " +
      std::to_string(cfg.max_retries + 1) + " seeded attempts");
}

}  // namespace blocknys
