#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <Eigen/Dense>

#include "blocknys/dense_oracle.hpp"
#include "blocknys/errors.hpp"
#include "blocknys/leverage.hpp"
#include "blocknys/nystrom.hpp"
#include "blocknys/rng.hpp"
#include "blocknys/spectrum.hpp"

using namespace blocknys;

namespace {

LandmarkSet make_set(std::vector<Eigen::Index> idx, std::uint64_t seed = 0) {
  LandmarkSet s;
  s.indices = std::move(idx);
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("landmark sampling is deterministic and respects the weights") {
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(8);
  scores(3) = 0.9;
  const LandmarkSet s = sample_landmarks(scores, 5, 7);
  CHECK(s.indices == std::vector<Eigen::Index>{3, 3, 3, 3, 3});
  CHECK(s.seed == 7);

  Eigen::VectorXd uniform = Eigen::VectorXd::Ones(64);
  const LandmarkSet a = sample_landmarks(uniform, 32, 11);
  const LandmarkSet b = sample_landmarks(uniform, 32, 11);
  const LandmarkSet c = sample_landmarks(uniform, 32, 12);
  CHECK(a.indices == b.indices);
  CHECK(a.indices != c.indices);

  CHECK_THROWS_AS(sample_landmarks(Eigen::VectorXd::Zero(4), 2, 1),
                  InvalidSpecError);
  CHECK_THROWS_AS(sample_landmarks(uniform, 0, 1), InvalidSpecError);
}

TEST_CASE("rank-one matrix is reproduced from any single useful landmark") {
  Rng rng = make_rng(3);
  Eigen::VectorXd v = gaussian_vector(rng, 16);
  DenseOperator op(Eigen::MatrixXd(v * v.transpose()));
  const NystromFactor f = build_factor(op, make_set({4}));
  CHECK(f.rank() == 1);
  const Eigen::MatrixXd err = f.materialize_approx() - op.dense();
  CHECK(err.cwiseAbs().maxCoeff() < 1e-12 * v.squaredNorm());
}

TEST_CASE("full landmark set reproduces the matrix") {
  const Eigen::MatrixXd a = gen_psd(32, PolyDecaySpectrum{1.0}, 13);
  DenseOperator op(a);
  std::vector<Eigen::Index> all(32);
  for (Eigen::Index i = 0; i < 32; ++i) all[static_cast<std::size_t>(i)] = i;
  const NystromFactor f = build_factor(op, make_set(all));
  CHECK((f.materialize_approx() - a).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(check_operator_error(op, f) < 1e-10);
}

TEST_CASE("partial factor is PSD, dominated by A, and interpolates on S") {
  const Eigen::MatrixXd a = gen_psd(64, PolyDecaySpectrum{1.0}, 29);
  DenseOperator op(a);
  const LandmarkSet s = sample_landmarks(exact_rls(op, 0.05).scores, 10, 21);
  const NystromFactor f = build_factor(op, s);
  const Eigen::MatrixXd ahat = f.materialize_approx();

  const SymEig e = sym_eig(ahat);
  CHECK(e.values.minCoeff() > -1e-12);

  const LoewnerGap gap = loewner_gap(ahat, a);
  CHECK(gap.gmax <= 1.0 + 1e-10);

  for (Eigen::Index i : f.landmarks())
    for (Eigen::Index j : f.landmarks())
      CHECK(std::abs(ahat(i, j) - a(i, j)) < 1e-10);
}

TEST_CASE("duplicate draws build the same factor as their unique support") {
  const Eigen::MatrixXd a = gen_psd(24, PolyDecaySpectrum{0.7}, 5);
  DenseOperator op(a);
  const NystromFactor dup =
      build_factor(op, make_set({2, 9, 2, 17, 9, 9, 17, 2}));
  const NystromFactor uni = build_factor(op, make_set({2, 9, 17}));
  CHECK(dup.width() == 3);
  CHECK((dup.materialize_approx() - uni.materialize_approx())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("rank-deficient landmark blocks route through the pseudo-inverse") {
  Rng rng = make_rng(10);
  const Eigen::MatrixXd g = gaussian_matrix(rng, 20, 3);
  DenseOperator op(Eigen::MatrixXd(g * g.transpose()));  // rank 3
  const LandmarkSet s = make_set({0, 1, 2, 3, 4, 5, 6, 7});
  const NystromFactor f = build_factor(op, s);
  CHECK(f.rank() == 3);
  // A has rank 3, so eight landmarks reproduce it exactly.
  CHECK(check_operator_error(op, f) < 1e-10);
  // wdag agrees with the implicit solve path
  Eigen::VectorXd x = gaussian_vector(rng, f.width());
  CHECK((f.wdag() * x - f.w_pinv_apply(x)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("apply matches the materialized factor") {
  const Eigen::MatrixXd a = gen_psd(48, PolyDecaySpectrum{1.0}, 41);
  DenseOperator op(a);
  const LandmarkSet s = sample_landmarks(exact_rls(op, 0.1).scores, 12, 2);
  const NystromFactor f = build_factor(op, s);
  const Eigen::MatrixXd ahat = f.materialize_approx();
  Rng rng = make_rng(6);
  for (int t = 0; t < 5; ++t) {
    const Eigen::VectorXd v = gaussian_vector(rng, 48);
    CHECK((f.apply(v) - ahat * v).cwiseAbs().maxCoeff() <
          1e-11 * v.cwiseAbs().maxCoeff());
  }
  const Eigen::MatrixXd root = f.reduced_root();
  CHECK((root * root.transpose() - ahat).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("spectral error bound at the sampling regularizer") {
  // Small version of the operator-norm guarantee: enough exact-RLS landmarks
  // at lambda keep ||A - A_hat|| below lambda.
  const Eigen::Index n = 256;
  const Eigen::MatrixXd a = gen_psd(n, PolyDecaySpectrum{1.0}, 77);
  DenseOperator op(a);
  const double lambda = 1.0 / 25.0;
  const Eigen::VectorXd scores = exact_rls(op, lambda).scores;
  const Eigen::Index b = static_cast<Eigen::Index>(
      std::ceil(2.0 * scores.sum() * std::log(double(n))));
  const NystromFactor f = build_factor(op, sample_landmarks(scores, b, 123));
  CHECK(check_operator_error(op, f) <= lambda);
}

TEST_CASE("factor container round trips") {
  const Eigen::MatrixXd a = gen_psd(20, PolyDecaySpectrum{1.0}, 15);
  DenseOperator op(a);
  const LandmarkSet s = sample_landmarks(exact_rls(op, 0.2).scores, 6, 99);
  const NystromFactor f = build_factor(op, s);

  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "blocknys_factor_test.bin").string();
  save_factor(path, f);
  const NystromFactor g = load_factor(path);

  CHECK(g.n() == f.n());
  CHECK(g.width() == f.width());
  CHECK(g.rank() == f.rank());
  CHECK(g.seed() == f.seed());
  CHECK((g.c() - f.c()).cwiseAbs().maxCoeff() == 0.0);
  Rng rng = make_rng(1);
  const Eigen::VectorXd v = gaussian_vector(rng, 20);
  CHECK((g.apply(v) - f.apply(v)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((g.materialize_approx() - f.materialize_approx())
            .cwiseAbs()
            .maxCoeff() < 1e-11);

  // corrupt container: truncate the payload
  {
    std::ofstream trunc(path, std::ios::binary | std::ios::trunc);
    trunc.write("\x01\x02\x03", 3);
  }
  CHECK_THROWS_AS(load_factor(path), IoError);
  std::filesystem::remove(path);
}
