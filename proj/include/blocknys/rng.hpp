#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "blocknys/errors.hpp"

// Deterministic sampling helpers. mt19937_64 is fully specified by the
// standard, but the standard distributions are not, so every transformation
// from raw 64-bit draws to doubles lives here to keep seeded runs
// reproducible across toolchains.

namespace blocknys {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller; consumes exactly two uniforms.
inline double gaussian(Rng& rng) {
  const double u1 = 1.0 - uniform_unit(rng);  // (0, 1], keeps log finite
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline Eigen::VectorXd gaussian_vector(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = gaussian(rng);
  return v;
}

inline Eigen::MatrixXd gaussian_matrix(Rng& rng, Eigen::Index rows,
                                       Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = gaussian(rng);
  return m;
}

// Rademacher +-1 entries.
inline Eigen::VectorXd rademacher_vector(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = (rng() & 1u) ? 1.0 : -1.0;
  return v;
}

// Precomputed inverse-CDF table for i.i.d. draws from a fixed weight vector.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<double>& weights) {
    cumulative_.resize(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (!(weights[i] >= 0.0))
        throw InvalidSpecError("discrete sampler: negative weight");
      acc += weights[i];
      cumulative_[i] = acc;
    }
    if (!(acc > 0.0))
      throw InvalidSpecError("discrete sampler: all weights are zero");
    total_ = acc;
  }

  std::size_t draw(Rng& rng) const {
    const double u = uniform_unit(rng) * total_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) return cumulative_.size() - 1;
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

  double total() const { return total_; }

 private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

}  // namespace blocknys
