#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>

#include <Eigen/Core>

#include "blocknys/psd_operator.hpp"

namespace blocknys {

// Labeled point set, one sample per row.
struct Dataset {
  Eigen::MatrixXd points;  // n x dim
  Eigen::VectorXd labels;  // length n

  Eigen::Index n() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
};

// One sample per line, features first, label in the last column. A first
// line that does not parse as numbers is treated as a header and skipped.
Dataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const std::string& path, const Dataset& data);

// "index,value" rows, full precision.
void write_predictions_csv(const std::string& path,
                           const Eigen::VectorXd& predictions);

enum class KernelKind { kRbf, kPolynomial, kLinear };

const char* kernel_kind_name(KernelKind kind);

struct KernelSpec {
  KernelKind kind = KernelKind::kRbf;
  double bandwidth = 1.0;  // rbf: exp(-||x - y||^2 / (2 bandwidth^2))
  int degree = 2;          // polynomial: (x . y + offset)^degree
  double offset = 1.0;
  double bound = 1.0;  // declared G, with k(x, x) <= G^2 over the data
};

// Single evaluation; parameter validation happens in build_kernel.
double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

// Kernel matrix of a dataset as an implicit PSD operator. Entries are
// computed on demand and every evaluation routes through a shared counter so
// cost contracts can be audited.
class KernelOperator final : public PsdOperator {
 public:
  Eigen::Index n() const override { return points_.rows(); }
  double entry(Eigen::Index i, Eigen::Index j) const override;
  Eigen::VectorXd column(Eigen::Index j) const override;
  Eigen::VectorXd matvec(const Eigen::VectorXd& v) const override;

  const KernelSpec& spec() const { return spec_; }
  const Eigen::MatrixXd& points() const { return points_; }
  long long evals() const { return evals_->load(); }

 private:
  friend KernelOperator build_kernel(const Dataset& data,
                                     const KernelSpec& spec);
  KernelOperator() = default;

  Eigen::MatrixXd points_;
  KernelSpec spec_;
  std::shared_ptr<std::atomic<long long>> evals_;
};

// Validates the spec and the data, then wraps them into an operator. The
// declared bound is certified on the diagonal; for a PSD kernel the
// Cauchy-Schwarz inequality extends that certificate to every pair.
KernelOperator build_kernel(const Dataset& data, const KernelSpec& spec);

struct SyntheticRegression {
  Dataset data;
  Eigen::VectorXd clean;  // noiseless targets
};

// Gaussian points in `dim` dimensions with targets built in the eigenbasis
// of the empirical kernel matrix: coefficients decay like the zeta-th power
// of the eigenvalues, the clean signal is normalized to unit per-sample
// power, and Gaussian noise of the given standard deviation is added.
SyntheticRegression make_synthetic_regression(const KernelSpec& spec,
                                              Eigen::Index n, Eigen::Index dim,
                                              double zeta, double noise_sd,
                                              std::uint64_t seed);

}  // namespace blocknys
