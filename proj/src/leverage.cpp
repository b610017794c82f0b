#include "blocknys/leverage.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "blocknys/dense_oracle.hpp"
#include "blocknys/errors.hpp"
#include "blocknys/rng.hpp"

namespace blocknys {

const char* score_method_name(ScoreMethod method) {
  switch (method) {
    case ScoreMethod::kExact:
      return "exact";
    case ScoreMethod::kRecursive:
      return "recursive";
    case ScoreMethod::kFlatTail:
      return "flat-tail";
  }
  return "unknown";
}

RidgeScores exact_rls(const PsdOperator& a, double lambda, Eigen::Index cap) {
  RidgeScores out;
  out.lambda = lambda;
  out.scores = dense_rls(a.materialize(cap), lambda, cap);
  out.approx_factor = 1.0;
  out.method = ScoreMethod::kExact;
  return out;
}

double effective_dim(const PsdOperator& a, double lambda, Eigen::Index cap) {
  return exact_rls(a, lambda, cap).sum();
}

namespace {

// Overestimate of the scores of A restricted to rows `rows`, computed against
// a weighted landmark sample: l_i = (A_ii - k_i^T (W_s + lambda I)^{-1} k_i)
// / lambda. With a perfect sample this collapses to the exact scores.
Eigen::VectorXd scores_against_sample(const PsdOperator& a,
                                      const std::vector<Eigen::Index>& rows,
                                      const std::vector<Eigen::Index>& sample,
                                      const Eigen::VectorXd& col_scale,
                                      double lambda) {
  const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index s = static_cast<Eigen::Index>(sample.size());
  Eigen::MatrixXd k(nr, s);
  for (Eigen::Index j = 0; j < s; ++j) {
    const Eigen::VectorXd col = a.column(sample[j]);
    for (Eigen::Index i = 0; i < nr; ++i) k(i, j) = col(rows[i]) * col_scale(j);
  }
  Eigen::MatrixXd mid(s, s);
  for (Eigen::Index j = 0; j < s; ++j)
    for (Eigen::Index l = 0; l < s; ++l)
      mid(j, l) = a.entry(sample[j], sample[l]) * col_scale(j) * col_scale(l);
  mid.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(mid);
  if (llt.info() != Eigen::Success)
    throw InnerSingularityError(
        "approx_rls_recursive: weighted landmark system is singular");
  const Eigen::MatrixXd sol = llt.solve(k.transpose());  // s x nr
  Eigen::VectorXd out(nr);
  for (Eigen::Index i = 0; i < nr; ++i) {
    const double quad = k.row(i).dot(sol.col(i));
    const double raw = (a.entry(rows[i], rows[i]) - quad) / lambda;
    out(i) = std::min(1.0, std::max(0.0, raw));
  }
  return out;
}

Eigen::VectorXd recurse(const PsdOperator& a,
                        const std::vector<Eigen::Index>& rows, double lambda,
                        const ApproxRlsConfig& cfg, Rng& rng) {
  const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  if (nr <= cfg.base_size) {
    Eigen::MatrixXd sub(nr, nr);
    for (Eigen::Index j = 0; j < nr; ++j) {
      const Eigen::VectorXd col = a.column(rows[j]);
      for (Eigen::Index i = 0; i < nr; ++i) sub(i, j) = col(rows[i]);
    }
    return dense_rls(((sub + sub.transpose()) * 0.5).eval(), lambda, nr);
  }

  std::vector<Eigen::Index> half;
  half.reserve(rows.size() / 2 + 8);
  for (Eigen::Index i : rows)
    if (rng() & 1u) half.push_back(i);
  if (static_cast<Eigen::Index>(half.size()) < 2)
    half.assign(rows.begin(), rows.begin() + std::min<Eigen::Index>(nr, 2));

  const Eigen::VectorXd half_scores = recurse(a, half, lambda, cfg, rng);
  const double dim_est = std::max(half_scores.sum(), 1.0);
  const Eigen::Index want = static_cast<Eigen::Index>(
      std::ceil(cfg.oversample * dim_est * std::log(double(a.n()))));
  const Eigen::Index s =
      std::min<Eigen::Index>(static_cast<Eigen::Index>(half.size()),
                             std::max<Eigen::Index>(want, 1));

  std::vector<double> weights(half.size());
  for (std::size_t j = 0; j < half.size(); ++j)
    weights[j] = std::max(half_scores(static_cast<Eigen::Index>(j)), 1e-300);
  DiscreteSampler sampler(weights);
  const double total = sampler.total();

  std::vector<Eigen::Index> sample(s);
  Eigen::VectorXd col_scale(s);
  for (Eigen::Index j = 0; j < s; ++j) {
    const std::size_t pick = sampler.draw(rng);
    sample[j] = half[pick];
    const double p = weights[pick] / total;
    col_scale(j) = 1.0 / std::sqrt(double(s) * p);
  }
  return scores_against_sample(a, rows, sample, col_scale, lambda);
}

}  // namespace

RidgeScores approx_rls_recursive(const PsdOperator& a, double lambda,
                                 const ApproxRlsConfig& cfg,
                                 std::uint64_t seed) {
  if (!(lambda > 0.0))
    throw InvalidSpecError("approx_rls_recursive: lambda must be positive");
  if (cfg.base_size < 2)
    throw InvalidSpecError("approx_rls_recursive: base size must be >= 2");
  if (!(cfg.oversample > 0.0))
    throw InvalidSpecError("approx_rls_recursive: oversample must be positive");
  std::vector<Eigen::Index> rows(a.n());
  for (Eigen::Index i = 0; i < a.n(); ++i) rows[static_cast<std::size_t>(i)] = i;
  Rng rng = make_rng(seed);
  RidgeScores out;
  out.lambda = lambda;
  out.scores = recurse(a, rows, lambda, cfg, rng);
  out.approx_factor = cfg.approx_factor;
  out.method = ScoreMethod::kRecursive;
  return out;
}

std::string scores_to_csv(const RidgeScores& scores) {
  std::string out = "index,score\n";
  char buf[64];
  for (Eigen::Index i = 0; i < scores.scores.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g\n", static_cast<long long>(i),
                  scores.scores(i));
    out += buf;
  }
  return out;
}

void write_scores_csv(const std::string& path, const RidgeScores& scores) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write scores csv: " + path);
  f << scores_to_csv(scores);
  if (!f) throw IoError("write failed for scores csv: " + path);
}

std::string scores_to_json(const RidgeScores& scores) {
  nlohmann::ordered_json j;
  j["lambda"] = scores.lambda;
  j["method"] = score_method_name(scores.method);
  j["approx_factor"] = scores.approx_factor;
  j["scores"] = std::vector<double>(
      scores.scores.data(), scores.scores.data() + scores.scores.size());
  j["effective_dim"] = scores.sum();
  return j.dump();
}

void write_scores_json(const std::string& path, const RidgeScores& scores) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write scores json: " + path);
  f << scores_to_json(scores) << "\n";
  if (!f) throw IoError("write failed for scores json: " + path);
}

}  // namespace blocknys
