#include "blocknys/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blocknys/dense_oracle.hpp"
#include "blocknys/errors.hpp"
#include "blocknys/rng.hpp"

namespace blocknys {

namespace {

void check_dataset(const Dataset& data) {
  if (data.n() < 1)
    throw InvalidSpecError("dataset: needs at least one sample");
  if (data.dim() < 1)
    throw InvalidSpecError("dataset: needs at least one feature");
  if (data.labels.size() != data.n())
    throw DimensionMismatchError(
        "dataset: " + std::to_string(data.labels.size()) + " labels for " +
        std::to_string(data.n()) + " samples");
  if (!data.points.allFinite() || !data.labels.allFinite())
    throw InvalidSpecError("dataset: entries must be finite");
}

void check_spec(const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelKind::kRbf:
      if (!(spec.bandwidth > 0.0))
        throw InvalidSpecError("kernel: rbf bandwidth must be positive");
      if (spec.bound != 1.0)
        throw InvalidSpecError(
            "kernel: the rbf kernel has k(x, x) = 1, declare bound 1");
      break;
    case KernelKind::kPolynomial:
      if (spec.degree < 1)
        throw InvalidSpecError("kernel: polynomial degree must be >= 1");
      if (!(spec.offset >= 0.0))
        throw InvalidSpecError(
            "kernel: polynomial offset must be nonnegative to stay PSD");
      break;
    case KernelKind::kLinear:
      break;
  }
  if (!(spec.bound > 0.0))
    throw InvalidSpecError("kernel: declared bound must be positive");
}

}  // namespace

const char* kernel_kind_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::kRbf: return "rbf";
    case KernelKind::kPolynomial: return "polynomial";
    case KernelKind::kLinear: return "linear";
  }
  return "unknown";
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
  switch (spec.kind) {
    case KernelKind::kRbf:
      return std::exp(-(x - y).squaredNorm() /
                      (2.0 * spec.bandwidth * spec.bandwidth));
    case KernelKind::kPolynomial:
      return std::pow(x.dot(y) + spec.offset, spec.degree);
    case KernelKind::kLinear:
      return x.dot(y);
  }
  return 0.0;
}

double KernelOperator::entry(Eigen::Index i, Eigen::Index j) const {
  check_index(i);
  check_index(j);
  evals_->fetch_add(1, std::memory_order_relaxed);
  return kernel_eval(spec_, points_.row(i).transpose(),
                     points_.row(j).transpose());
}

Eigen::VectorXd KernelOperator::column(Eigen::Index j) const {
  check_index(j);
  const Eigen::Index rows = n();
  Eigen::VectorXd out(rows);
  const Eigen::VectorXd xj = points_.row(j).transpose();
  for (Eigen::Index i = 0; i < rows; ++i)
    out(i) = kernel_eval(spec_, points_.row(i).transpose(), xj);
  evals_->fetch_add(rows, std::memory_order_relaxed);
  return out;
}

Eigen::VectorXd KernelOperator::matvec(const Eigen::VectorXd& v) const {
  check_vector(v);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n());
  for (Eigen::Index j = 0; j < n(); ++j)
    if (v(j) != 0.0) out += column(j) * v(j);
  return out;
}

KernelOperator build_kernel(const Dataset& data, const KernelSpec& spec) {
  check_dataset(data);
  check_spec(spec);
  KernelOperator op;
  op.points_ = data.points;
  op.spec_ = spec;
  op.evals_ = std::make_shared<std::atomic<long long>>(0);
  const double limit = spec.bound * spec.bound * (1.0 + 1e-10);
  for (Eigen::Index i = 0; i < op.n(); ++i) {
    const Eigen::VectorXd xi = op.points_.row(i).transpose();
    const double kii = kernel_eval(spec, xi, xi);
    if (!(kii <= limit))
      throw KernelBoundError(
          "kernel: k(x, x) = " + std::to_string(kii) + " at sample " +
          std::to_string(i) + " exceeds the declared bound squared " +
          std::to_string(spec.bound * spec.bound));
  }
  return op;
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset csv: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool parse_failed = false;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double value = std::stod(cell, &used);
        while (used < cell.size() &&
               (cell[used] == ' ' || cell[used] == '\r' || cell[used] == '\t'))
          ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.push_back(value);
      } catch (const std::exception&) {
        parse_failed = true;
        break;
      }
    }
    if (parse_failed) {
      if (first) {  // header line
        first = false;
        continue;
      }
      throw IoError("dataset csv: unparseable line \"" + line + "\" in " +
                    path);
    }
    first = false;
    if (row.size() < 2)
      throw IoError("dataset csv: need at least one feature and a label in " +
                    path);
    if (!rows.empty() && rows.front().size() != row.size())
      throw IoError("dataset csv: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("dataset csv: no samples in " + path);

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index dim = static_cast<Eigen::Index>(rows.front().size()) - 1;
  Dataset data;
  data.points.resize(n, dim);
  data.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j)
      data.points(i, j) = rows[static_cast<std::size_t>(i)]
                              [static_cast<std::size_t>(j)];
    data.labels(i) = rows[static_cast<std::size_t>(i)]
                         [static_cast<std::size_t>(dim)];
  }
  check_dataset(data);
  return data;
}

void save_dataset_csv(const std::string& path, const Dataset& data) {
  check_dataset(data);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset csv: " + path);
  char buf[64];
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    std::string line;
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,", data.points(i, j));
      line += buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g\n", data.labels(i));
    line += buf;
    out << line;
  }
  if (!out) throw IoError("write failed for dataset csv: " + path);
}

void write_predictions_csv(const std::string& path,
                           const Eigen::VectorXd& predictions) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write predictions csv: " + path);
  out << "index,value\n";
  char buf[64];
  for (Eigen::Index i = 0; i < predictions.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g\n", static_cast<long long>(i),
                  predictions(i));
    out << buf;
  }
  if (!out) throw IoError("write failed for predictions csv: " + path);
}

SyntheticRegression make_synthetic_regression(const KernelSpec& spec,
                                              Eigen::Index n, Eigen::Index dim,
                                              double zeta, double noise_sd,
                                              std::uint64_t seed) {
  if (n < 1) throw InvalidSpecError("synthetic: n must be >= 1");
  if (dim < 1) throw InvalidSpecError("synthetic: dim must be >= 1");
  if (!(zeta > 0.0)) throw InvalidSpecError("synthetic: zeta must be > 0");
  if (!(noise_sd >= 0.0))
    throw InvalidSpecError("synthetic: noise must be >= 0");
  check_spec(spec);

  Rng rng = make_rng(seed);
  SyntheticRegression out;
  out.data.points = gaussian_matrix(rng, n, dim);

  // Target with kernel-eigenbasis coefficients damped by the zeta-th power
  // of the eigenvalue: smooth for large zeta, rough near zero.
  Dataset probe = out.data;
  probe.labels = Eigen::VectorXd::Zero(n);
  const Eigen::MatrixXd k = build_kernel(probe, spec).materialize(n);
  const SymEig eig = sym_eig(k);
  Eigen::VectorXd damp(n);
  for (Eigen::Index i = 0; i < n; ++i)
    damp(i) = std::pow(std::max(eig.values(i), 0.0), zeta);
  const Eigen::VectorXd g = gaussian_vector(rng, n);
  Eigen::VectorXd clean =
      eig.vectors * damp.asDiagonal() * (eig.vectors.transpose() * g);
  const double norm = clean.norm();
  if (norm > 0.0) clean *= std::sqrt(static_cast<double>(n)) / norm;
  out.clean = clean;
  out.data.labels = clean + noise_sd * gaussian_vector(rng, n);
  return out;
}

}  // namespace blocknys
