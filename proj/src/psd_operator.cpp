#include "blocknys/psd_operator.hpp"

#include <string>
#include <vector>

namespace blocknys {

void PsdOperator::check_index(Eigen::Index i) const {
  if (i < 0 || i >= n())
    throw DimensionMismatchError("index " + std::to_string(i) +
                                 " out of range for operator of size " +
                                 std::to_string(n()));
}

void PsdOperator::check_vector(const Eigen::VectorXd& v) const {
  if (v.size() != n())
    throw DimensionMismatchError("vector length " + std::to_string(v.size()) +
                                 " does not match operator size " +
                                 std::to_string(n()));
}

Eigen::MatrixXd PsdOperator::columns(
    const std::vector<Eigen::Index>& idx) const {
  Eigen::MatrixXd c(n(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    check_index(idx[j]);
    c.col(static_cast<Eigen::Index>(j)) = column(idx[j]);
  }
  return c;
}

Eigen::MatrixXd PsdOperator::materialize(Eigen::Index cap) const {
  if (n() > cap)
    throw TooLargeError("dense materialization of size " +
                        std::to_string(n()) + " exceeds cap " +
                        std::to_string(cap));
  Eigen::MatrixXd a(n(), n());
  for (Eigen::Index j = 0; j < n(); ++j) a.col(j) = column(j);
  // Columns of a symmetric operator already agree across the diagonal; the
  // explicit symmetrization only scrubs generator round-off.
  a = ((a + a.transpose()) * 0.5).eval();
  return a;
}

DenseOperator::DenseOperator(Eigen::MatrixXd a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols())
    throw DimensionMismatchError("dense operator requires a square matrix");
  const double scale = a_.cwiseAbs().maxCoeff();
  const double asym = (a_ - a_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1.0))
    throw InvalidSpecError("dense operator input is not symmetric");
  a_ = ((a_ + a_.transpose()) * 0.5).eval();
}

double DenseOperator::entry(Eigen::Index i, Eigen::Index j) const {
  check_index(i);
  check_index(j);
  return a_(i, j);
}

Eigen::VectorXd DenseOperator::column(Eigen::Index j) const {
  check_index(j);
  return a_.col(j);
}

Eigen::VectorXd DenseOperator::matvec(const Eigen::VectorXd& v) const {
  check_vector(v);
  return a_.selfadjointView<Eigen::Lower>() * v;
}

ImplicitOperator::ImplicitOperator(Eigen::Index n, EntryFn entry_fn,
                                   std::size_t column_cache_budget)
    : n_(n), entry_fn_(std::move(entry_fn)), cache_budget_(column_cache_budget) {
  if (n_ <= 0) throw InvalidSpecError("implicit operator size must be positive");
  if (!entry_fn_) throw InvalidSpecError("implicit operator needs an entry generator");
}

double ImplicitOperator::entry(Eigen::Index i, Eigen::Index j) const {
  check_index(i);
  check_index(j);
  return entry_fn_(i, j);
}

Eigen::VectorXd ImplicitOperator::column(Eigen::Index j) const {
  check_index(j);
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(j);
    if (it != cache_.end()) return it->second;
  }
  Eigen::VectorXd c(n_);
  for (Eigen::Index i = 0; i < n_; ++i) c(i) = entry_fn_(i, j);
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (cache_.size() >= cache_budget_ && cache_budget_ > 0)
      cache_.erase(cache_.begin());
    if (cache_budget_ > 0) cache_.emplace(j, c);
  }
  return c;
}

Eigen::VectorXd ImplicitOperator::matvec(const Eigen::VectorXd& v) const {
  check_vector(v);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
  // Row-wise accumulation touches each entry once and needs no cache.
  for (Eigen::Index i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n_; ++j) acc += entry_fn_(i, j) * v(j);
    out(i) = acc;
  }
  return out;
}

}  // namespace blocknys
