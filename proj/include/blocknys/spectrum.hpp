#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace blocknys {

// lambda_i = i^(-1/gamma); slower decay for larger gamma.
struct PolyDecaySpectrum {
  double gamma = 1.0;
};

// Exactly k head eigenvalues above twice the smallest eigenvalue, tail with
// max/min bounded by tail_spread (kept strictly below 2 so the head count is
// unambiguous under rotation round-off).
struct SpikedSpectrum {
  Eigen::Index k = 1;
  double head_condition = 100.0;
  double tail_spread = 1.9;
};

struct ExplicitSpectrum {
  std::vector<double> values;  // strictly positive, nonincreasing
};

using SpectrumSpec =
    std::variant<PolyDecaySpectrum, SpikedSpectrum, ExplicitSpectrum>;

// Validates the spec and returns the n eigenvalues in nonincreasing order.
Eigen::VectorXd spectrum_values(const SpectrumSpec& spec, Eigen::Index n);

// Haar-distributed orthogonal matrix from a seeded Gaussian QR with the
// R-diagonal sign fix; byte-identical across runs for a fixed seed.
Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::uint64_t seed);

// A = Q diag(spectrum) Q^T, exactly symmetric.
Eigen::MatrixXd gen_psd(Eigen::Index n, const SpectrumSpec& spec,
                        std::uint64_t seed);

}  // namespace blocknys
