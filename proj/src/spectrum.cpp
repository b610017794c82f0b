#include "blocknys/spectrum.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "blocknys/errors.hpp"
#include "blocknys/rng.hpp"

namespace blocknys {

namespace {

Eigen::VectorXd poly_values(const PolyDecaySpectrum& s, Eigen::Index n) {
  if (!(s.gamma > 0.0))
    throw InvalidSpecError("poly-decay spectrum requires gamma > 0");
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = std::pow(static_cast<double>(i + 1), -1.0 / s.gamma);
  return v;
}

// Head: k values geometric in [4, 4*head_condition], all above 2*lambda_min.
// Tail: n-k values geometric in [1, tail_spread].
Eigen::VectorXd spiked_values(const SpikedSpectrum& s, Eigen::Index n) {
  if (s.k < 1 || s.k >= n)
    throw InvalidSpecError("spiked spectrum requires 1 <= k < n");
  if (!(s.head_condition >= 1.0))
    throw InvalidSpecError("spiked spectrum requires head_condition >= 1");
  if (!(s.tail_spread >= 1.0) || s.tail_spread >= 2.0)
    throw InvalidSpecError("spiked spectrum requires tail_spread in [1, 2)");
  Eigen::VectorXd v(n);
  const Eigen::Index k = s.k;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double t = (k == 1) ? 1.0 : static_cast<double>(k - 1 - i) /
                                          static_cast<double>(k - 1);
    v(i) = 4.0 * std::pow(s.head_condition, t);
  }
  const Eigen::Index m = n - k;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double t = (m == 1) ? 0.0 : static_cast<double>(m - 1 - i) /
                                          static_cast<double>(m - 1);
    v(k + i) = std::pow(s.tail_spread, t);
  }
  return v;
}

Eigen::VectorXd explicit_values(const ExplicitSpectrum& s, Eigen::Index n) {
  if (static_cast<Eigen::Index>(s.values.size()) != n)
    throw InvalidSpecError("explicit spectrum has " +
                           std::to_string(s.values.size()) +
                           " values but n = " + std::to_string(n));
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(s.values[i] > 0.0))
      throw InvalidSpecError("explicit spectrum values must be positive");
    if (i > 0 && s.values[i] > s.values[i - 1])
      throw InvalidSpecError("explicit spectrum values must be nonincreasing");
    v(i) = s.values[i];
  }
  return v;
}

}  // namespace

Eigen::VectorXd spectrum_values(const SpectrumSpec& spec, Eigen::Index n) {
  if (n <= 0) throw InvalidSpecError("spectrum size must be positive");
  return std::visit(
      [n](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PolyDecaySpectrum>)
          return poly_values(s, n);
        else if constexpr (std::is_same_v<T, SpikedSpectrum>)
          return spiked_values(s, n);
        else
          return explicit_values(s, n);
      },
      spec);
}

Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  Eigen::MatrixXd g = gaussian_matrix(rng, n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd rdiag = qr.matrixQR().diagonal();
  for (Eigen::Index j = 0; j < n; ++j)
    if (rdiag(j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Eigen::MatrixXd gen_psd(Eigen::Index n, const SpectrumSpec& spec,
                        std::uint64_t seed) {
  const Eigen::VectorXd lambda = spectrum_values(spec, n);
  const Eigen::MatrixXd q = random_orthogonal(n, seed);
  Eigen::MatrixXd a = q * lambda.asDiagonal() * q.transpose();
  a = ((a + a.transpose()) * 0.5).eval();
  return a;
}

}  // namespace blocknys
