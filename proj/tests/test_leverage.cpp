#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "blocknys/dense_oracle.hpp"
#include "blocknys/errors.hpp"
#include "blocknys/leverage.hpp"
#include "blocknys/rng.hpp"
#include "blocknys/spectrum.hpp"

using namespace blocknys;

TEST_CASE("identity scores are 1/2 at lambda 1 and sum to n/2") {
  DenseOperator op(Eigen::MatrixXd::Identity(10, 10));
  const Eigen::VectorXd scores = exact_rls(op, 1.0).scores;
  for (Eigen::Index i = 0; i < 10; ++i)
    CHECK(scores(i) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(effective_dim(op, 1.0) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("rank-one matrix has closed-form scores") {
  Rng rng = make_rng(5);
  const Eigen::VectorXd v = gaussian_vector(rng, 12);
  DenseOperator op(Eigen::MatrixXd(v * v.transpose()));
  const double lambda = 0.7;
  const Eigen::VectorXd scores = exact_rls(op, lambda).scores;
  const double denom = v.squaredNorm() + lambda;
  for (Eigen::Index i = 0; i < 12; ++i)
    CHECK(scores(i) == doctest::Approx(v(i) * v(i) / denom).epsilon(1e-10));
}

TEST_CASE("effective dimension matches direct summation on poly decay") {
  const Eigen::Index n = 1000;
  DenseOperator op(gen_psd(n, PolyDecaySpectrum{1.0}, 19));
  const double lambda = 0.01;
  double direct = 0.0;
  for (Eigen::Index i = 1; i <= n; ++i)
    direct += 1.0 / (1.0 + lambda * static_cast<double>(i));
  CHECK(std::abs(effective_dim(op, lambda) - direct) < 1e-8);
}

TEST_CASE("exact scores live in (0,1], sum to d_lambda, shrink with lambda") {
  DenseOperator op(gen_psd(80, PolyDecaySpectrum{0.7}, 23));
  const Eigen::VectorXd lo = exact_rls(op, 0.01).scores;
  const Eigen::VectorXd hi = exact_rls(op, 0.3).scores;
  for (Eigen::Index i = 0; i < 80; ++i) {
    CHECK(lo(i) > 0.0);
    CHECK(lo(i) <= 1.0 + 1e-12);
    CHECK(hi(i) <= lo(i) + 1e-12);  // scores are monotone decreasing in lambda
  }
  CHECK(lo.sum() == doctest::Approx(effective_dim(op, 0.01)).epsilon(1e-12));
}

TEST_CASE("recursive approximation bottoms out in the exact oracle") {
  DenseOperator op(gen_psd(48, PolyDecaySpectrum{1.0}, 31));
  const Eigen::VectorXd approx =
      approx_rls_recursive(op, 0.05, ApproxRlsConfig{}, 77).scores;
  const Eigen::VectorXd exact = exact_rls(op, 0.05).scores;
  CHECK((approx - exact).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("recursive approximation brackets exact scores across seeds") {
  const Eigen::Index n = 512;
  DenseOperator op(gen_psd(n, PolyDecaySpectrum{0.5}, 2024));
  const double lambda = 1e-4;  // the 100th eigenvalue of i^{-2}
  const Eigen::VectorXd exact = exact_rls(op, lambda).scores;
  const double d_lambda = exact.sum();
  const ApproxRlsConfig cfg;
  int good = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::VectorXd approx =
        approx_rls_recursive(op, lambda, cfg, seed).scores;
    bool ok = approx.sum() <= cfg.approx_factor * d_lambda;
    for (Eigen::Index i = 0; i < n && ok; ++i)
      ok = approx(i) >= exact(i) / cfg.approx_factor - 1e-12;
    if (ok) ++good;
  }
  CHECK(good >= 9);
}

TEST_CASE("recursive approximation validates its configuration") {
  DenseOperator op(Eigen::MatrixXd::Identity(8, 8));
  CHECK_THROWS_AS(approx_rls_recursive(op, 0.0, ApproxRlsConfig{}, 1),
                  InvalidSpecError);
  ApproxRlsConfig bad;
  bad.base_size = 1;
  CHECK_THROWS_AS(approx_rls_recursive(op, 1.0, bad, 1), InvalidSpecError);
}

TEST_CASE("score export carries method and effective dimension") {
  RidgeScores rs;
  rs.lambda = 0.125;
  rs.scores = Eigen::VectorXd(3);
  rs.scores << 0.25, 0.5, 1.0;
  rs.approx_factor = 3.0;
  rs.method = ScoreMethod::kRecursive;
  const std::string csv = scores_to_csv(rs);
  CHECK(csv.find("index,score") == 0);
  CHECK(csv.find("1,0.5") != std::string::npos);
  const std::string json = scores_to_json(rs);
  CHECK(json.find("\"lambda\":0.125") != std::string::npos);
  CHECK(json.find("\"method\":\"recursive\"") != std::string::npos);
  CHECK(json.find("\"approx_factor\":3.0") != std::string::npos);
  CHECK(json.find("\"effective_dim\":1.75") != std::string::npos);
  CHECK(json.find("0.25,0.5,1.0") != std::string::npos);
}
