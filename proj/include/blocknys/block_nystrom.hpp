#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "blocknys/dense_oracle.hpp"
#include "blocknys/nystrom.hpp"
#include "blocknys/psd_operator.hpp"

namespace blocknys {

enum class LeverageMethod {
  kAuto,       // exact below the desk cap, recursive above it
  kExact,
  kRecursive,
  kPrecomputed,  // cfg.scores supplies the sampling weights
};

struct BlockNystromConfig {
  LeverageMethod leverage = LeverageMethod::kAuto;
  double c_b = 2.0;   // landmarks per block: ceil(c_b * d_est * log n)
  double c_q = 1.0;   // blocks: ceil(c_q * alpha * log n)
  Eigen::Index b_override = 0;  // > 0 fixes the per-block draw count
  Eigen::Index q_override = 0;  // > 0 fixes the block count
  Eigen::Index max_landmarks = 0;  // > 0 caps the per-block draw count
  std::optional<Eigen::VectorXd> scores;  // used with kPrecomputed
  Eigen::Index cap = kDeskCap;
};

// Average of q independent Nystrom approximations, all sampled from the
// ridge leverage scores at the inflated regularizer lambda' = alpha^2 lambda.
class BlockNystromOperator {
 public:
  Eigen::Index n() const { return n_; }
  Eigen::Index q() const { return static_cast<Eigen::Index>(factors_.size()); }
  Eigen::Index b() const { return b_; }  // requested draws per block
  double lambda() const { return lambda_; }
  double alpha() const { return alpha_; }
  double lambda_prime() const { return lambda_prime_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<NystromFactor>& factors() const { return factors_; }

  // (1/q) sum_i A_hat_i v.
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

  // Average of the first `blocks` factors only; the recursive solver works on
  // these prefixes so coarse levels reuse the already-built blocks.
  Eigen::VectorXd apply_prefix(const Eigen::VectorXd& v,
                               Eigen::Index blocks) const;

  Eigen::MatrixXd materialize_approx(Eigen::Index cap = kDeskCap) const;

  friend BlockNystromOperator build_block_nystrom(const PsdOperator& a,
                                                  double lambda, double alpha,
                                                  const BlockNystromConfig& cfg,
                                                  std::uint64_t seed);
  friend BlockNystromOperator load_block_nystrom(const std::string& path);

 private:
  Eigen::Index n_ = 0;
  Eigen::Index b_ = 0;
  double lambda_ = 0.0;
  double alpha_ = 1.0;
  double lambda_prime_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<NystromFactor> factors_;
};

// Samples q landmark sets from the lambda'-RLS weights with per-block seeds
// seed+1 ... seed+q and assembles the factor average.
BlockNystromOperator build_block_nystrom(const PsdOperator& a, double lambda,
                                         double alpha,
                                         const BlockNystromConfig& cfg,
                                         std::uint64_t seed);

struct ApproximationCheck {
  double gmin = 0.0;
  double gmax = 0.0;
  double alpha_measured = 0.0;  // 1 / gmin
  bool upper_ok = false;        // gmax <= 1 + 1e-7
};

// Dense certificate of the regularized sandwich
// alpha_measured^{-1} (A + lambda I) <= A_hat + lambda I <= A + lambda I.
ApproximationCheck verify_approximation(const PsdOperator& a,
                                        const BlockNystromOperator& bn,
                                        Eigen::Index cap = kDeskCap);

// Monte Carlo estimate of the expected ridge projection: draws `trials`
// landmark sets of size b from the lambda'-RLS weights, averages
// A^{1/2} S^T (S A S^T)^+ S A^{1/2}, and compares against A (A + lambda' I)^{-1}.
LoewnerGap estimate_expected_projection(const PsdOperator& a,
                                        double lambda_prime, Eigen::Index b,
                                        int trials, std::uint64_t seed,
                                        Eigen::Index cap = kDeskCap);

// Container: little-endian u64 header length, JSON header
// {n, q, b, lambda, alpha, lambda_prime, seed}, then q factor blobs.
void save_block_nystrom(const std::string& path,
                        const BlockNystromOperator& bn);
BlockNystromOperator load_block_nystrom(const std::string& path);

}  // namespace blocknys
