#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "blocknys/psd_operator.hpp"

namespace blocknys {

enum class ScoreMethod { kExact, kRecursive, kFlatTail };

const char* score_method_name(ScoreMethod method);

// Ridge leverage scores diag(A (A + lambda I)^{-1}) together with the
// regularizer they were computed at and the declared overestimation bound:
// every score is guaranteed >= exact / approx_factor.
struct RidgeScores {
  double lambda = 0.0;
  Eigen::VectorXd scores;
  double approx_factor = 1.0;
  ScoreMethod method = ScoreMethod::kExact;

  double sum() const { return scores.sum(); }
};

// Exact scores via the dense oracle; desk scale only. approx_factor = 1.
RidgeScores exact_rls(const PsdOperator& a, double lambda,
                      Eigen::Index cap = kDeskCap);

// Effective dimension tr(A (A + lambda I)^{-1}).
double effective_dim(const PsdOperator& a, double lambda,
                     Eigen::Index cap = kDeskCap);

struct ApproxRlsConfig {
  double oversample = 2.0;      // sketch rank multiplier on the estimated
                                // effective dimension
  Eigen::Index base_size = 64;  // recursion bottoms out in the exact oracle
  double approx_factor = 3.0;   // declared T: scores >= exact / T
};

// Overestimating leverage score approximation by recursive uniform halving:
// scores on a random half calibrate a weighted landmark sketch, which then
// scores every row. Output is clipped to [0, 1].
RidgeScores approx_rls_recursive(const PsdOperator& a, double lambda,
                                 const ApproxRlsConfig& cfg,
                                 std::uint64_t seed);

// (index, score) rows, full precision.
std::string scores_to_csv(const RidgeScores& scores);
void write_scores_csv(const std::string& path, const RidgeScores& scores);

// JSON body {"lambda", "method", "approx_factor", "scores", "effective_dim"}.
std::string scores_to_json(const RidgeScores& scores);
void write_scores_json(const std::string& path, const RidgeScores& scores);

}  // namespace blocknys
