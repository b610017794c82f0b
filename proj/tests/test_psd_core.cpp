#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include <Eigen/Dense>

#include "blocknys/dense_oracle.hpp"
#include "blocknys/errors.hpp"
#include "blocknys/matrix_market.hpp"
#include "blocknys/psd_operator.hpp"
#include "blocknys/rng.hpp"
#include "blocknys/spectrum.hpp"

using namespace blocknys;

TEST_CASE("explicit unit spectrum gives the identity for any rotation") {
  const Eigen::MatrixXd a =
      gen_psd(3, ExplicitSpectrum{{1.0, 1.0, 1.0}}, 7);
  CHECK((a - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("generated matrix reproduces the requested spectrum") {
  const Eigen::Index n = 100;
  const Eigen::MatrixXd a = gen_psd(n, PolyDecaySpectrum{1.0}, 42);
  const SymEig ea = sym_eig(a);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double expected = 1.0 / static_cast<double>(n - i);  // ascending
    CHECK(std::abs(ea.values(i) - expected) < 1e-10);
  }
}

TEST_CASE("poly-decay spectrum honors gamma") {
  const Eigen::VectorXd v = spectrum_values(PolyDecaySpectrum{0.5}, 10);
  for (Eigen::Index i = 0; i < 10; ++i)
    CHECK(v(i) == doctest::Approx(std::pow(i + 1.0, -2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(spectrum_values(PolyDecaySpectrum{0.0}, 4), InvalidSpecError);
}

TEST_CASE("spiked spectrum has exactly k head eigenvalues above 2*min") {
  const Eigen::Index n = 100, k = 10;
  const Eigen::MatrixXd a = gen_psd(n, SpikedSpectrum{k, 100.0}, 3);
  const SymEig ea = sym_eig(a);
  const double lmin = ea.values.minCoeff();
  Eigen::Index head = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (ea.values(i) > 2.0 * lmin) ++head;
  CHECK(head == k);
  // tail spread stays within its declared bound
  CHECK(ea.values(n - k - 1) / lmin <= 2.0);
  CHECK_THROWS_AS(spectrum_values(SpikedSpectrum{0, 10.0}, 4), InvalidSpecError);
  CHECK_THROWS_AS(spectrum_values(SpikedSpectrum{4, 10.0}, 4), InvalidSpecError);
}

TEST_CASE("explicit spectrum validation") {
  CHECK_THROWS_AS(spectrum_values(ExplicitSpectrum{{1.0, -0.5}}, 2),
                  InvalidSpecError);
  CHECK_THROWS_AS(spectrum_values(ExplicitSpectrum{{0.5, 1.0}}, 2),
                  InvalidSpecError);
  CHECK_THROWS_AS(spectrum_values(ExplicitSpectrum{{1.0}}, 2),
                  InvalidSpecError);
}

TEST_CASE("generation is deterministic per seed and varies across seeds") {
  const Eigen::MatrixXd a1 = gen_psd(32, PolyDecaySpectrum{1.0}, 11);
  const Eigen::MatrixXd a2 = gen_psd(32, PolyDecaySpectrum{1.0}, 11);
  const Eigen::MatrixXd a3 = gen_psd(32, PolyDecaySpectrum{1.0}, 12);
  CHECK((a1 - a2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a1 - a3).cwiseAbs().maxCoeff() > 1e-6);
  CHECK((a1 - a1.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dense operator accessors agree and matvec is linear") {
  const Eigen::MatrixXd a = gen_psd(24, PolyDecaySpectrum{0.8}, 5);
  DenseOperator op(a);
  CHECK(op.n() == 24);
  for (Eigen::Index j : {0L, 7L, 23L}) {
    const Eigen::VectorXd c = op.column(j);
    for (Eigen::Index i = 0; i < op.n(); ++i) {
      CHECK(c(i) == a(i, j));
      CHECK(op.entry(i, j) == op.entry(j, i));
    }
  }
  Rng rng = make_rng(99);
  const Eigen::VectorXd v = gaussian_vector(rng, 24);
  const Eigen::VectorXd w = gaussian_vector(rng, 24);
  const Eigen::VectorXd lhs = op.matvec(2.0 * v - 3.0 * w);
  const Eigen::VectorXd rhs = 2.0 * op.matvec(v) - 3.0 * op.matvec(w);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * rhs.cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(op.entry(24, 0), DimensionMismatchError);
  CHECK_THROWS_AS(op.matvec(Eigen::VectorXd::Zero(23)), DimensionMismatchError);
}

TEST_CASE("implicit operator matches its dense counterpart") {
  const Eigen::MatrixXd a = gen_psd(16, PolyDecaySpectrum{1.0}, 21);
  ImplicitOperator op(
      16, [&a](Eigen::Index i, Eigen::Index j) { return a(i, j); }, 4);
  DenseOperator ref(a);
  Rng rng = make_rng(1);
  const Eigen::VectorXd v = gaussian_vector(rng, 16);
  CHECK((op.matvec(v) - ref.matvec(v)).cwiseAbs().maxCoeff() < 1e-13);
  for (Eigen::Index j = 0; j < 16; ++j)
    CHECK((op.column(j) - a.col(j)).cwiseAbs().maxCoeff() == 0.0);
  // repeated access exercises the bounded cache
  for (int rep = 0; rep < 3; ++rep)
    for (Eigen::Index j = 0; j < 16; ++j)
      CHECK((op.column(j) - a.col(j)).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd m = op.materialize();
  CHECK((m - a).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("materialization respects the desk cap") {
  const Eigen::MatrixXd a = gen_psd(8, PolyDecaySpectrum{1.0}, 2);
  DenseOperator op(a);
  CHECK_THROWS_AS(op.materialize(4), TooLargeError);
}

TEST_CASE("asymmetric input is rejected") {
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 3);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(DenseOperator{bad}, InvalidSpecError);
}

TEST_CASE("loewner gap identities") {
  const Eigen::MatrixXd a = gen_psd(20, PolyDecaySpectrum{1.0}, 17);
  const LoewnerGap self = loewner_gap(a, a);
  CHECK(self.gmin == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(self.gmax == doctest::Approx(1.0).epsilon(1e-12));

  const LoewnerGap twice = loewner_gap(Eigen::MatrixXd(2.0 * a), a);
  CHECK(twice.gmin == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(twice.gmax == doctest::Approx(2.0).epsilon(1e-12));

  Eigen::VectorXd d(4);
  d << 1, 2, 3, 4;
  const LoewnerGap diag = loewner_gap(Eigen::MatrixXd::Identity(4, 4),
                                      Eigen::MatrixXd(d.asDiagonal()));
  CHECK(diag.gmin == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(diag.gmax == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("loewner gap rejects a singular reference") {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(3, 3);
  y(0, 0) = 1.0;
  y(1, 1) = 1.0;
  CHECK_THROWS_AS(loewner_gap(Eigen::MatrixXd::Identity(3, 3), y),
                  SingularReferenceError);
}

TEST_CASE("dense regularized solve matches the eigen oracle") {
  const Eigen::MatrixXd a = gen_psd(30, PolyDecaySpectrum{1.0}, 8);
  Rng rng = make_rng(4);
  const Eigen::VectorXd v = gaussian_vector(rng, 30);
  const double lambda = 0.05;
  const Eigen::VectorXd x = dense_reg_solve(a, lambda, v);
  const Eigen::VectorXd residual =
      a * x + lambda * x - v;
  CHECK(residual.norm() < 1e-12 * v.norm());
}

TEST_CASE("dense ridge leverage scores against the closed form") {
  // For A = Q diag(mu) Q^T the scores in the rotated basis are known.
  Eigen::VectorXd mu(4);
  mu << 4, 2, 1, 0.5;
  const Eigen::MatrixXd a = Eigen::MatrixXd(mu.asDiagonal());
  const Eigen::VectorXd scores = dense_rls(a, 1.0);
  for (Eigen::Index i = 0; i < 4; ++i)
    CHECK(scores(i) == doctest::Approx(mu(i) / (mu(i) + 1.0)).epsilon(1e-12));
}

TEST_CASE("matrix market round trip and format variants") {
  const Eigen::MatrixXd a = gen_psd(12, PolyDecaySpectrum{1.0}, 33);
  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "blocknys_mm_test.mtx").string();
  write_matrix_market(path, a);
  const Eigen::MatrixXd b = read_matrix_market(path);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-15 * a.cwiseAbs().maxCoeff());
  std::filesystem::remove(path);

  const std::string coord = (dir / "blocknys_mm_coord.mtx").string();
  {
    std::FILE* f = std::fopen(coord.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs("%%MatrixMarket matrix coordinate real symmetric\n", f);
    std::fputs("% comment line\n", f);
    std::fputs("3 3 4\n1 1 2.0\n2 2 3.0\n3 3 4.0\n3 1 0.5\n", f);
    std::fclose(f);
  }
  const Eigen::MatrixXd c = read_matrix_market(coord);
  CHECK(c(0, 0) == 2.0);
  CHECK(c(2, 0) == 0.5);
  CHECK(c(0, 2) == 0.5);
  CHECK(c(1, 2) == 0.0);
  std::filesystem::remove(coord);

  CHECK_THROWS_AS(read_matrix_market("/nonexistent/blocknys.mtx"), IoError);
}

TEST_CASE("power iteration estimate brackets the top eigenvalue") {
  const Eigen::MatrixXd a = gen_psd(64, PolyDecaySpectrum{1.0}, 9);
  DenseOperator op(a);
  const double est = estimate_lambda_max(
      [&op](const Eigen::VectorXd& v) { return op.matvec(v); }, 64, 123);
  CHECK(est >= 1.0);        // true top eigenvalue is 1
  CHECK(est <= 1.1 * 1.01);  // padded estimate stays close
}
