#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <unordered_map>

#include <Eigen/Core>

#include "blocknys/errors.hpp"

namespace blocknys {

// Dense materializations and dense oracles refuse to run above this size
// unless the caller raises the cap explicitly.
inline constexpr Eigen::Index kDeskCap = 4096;

// Read-only view of a symmetric positive semidefinite matrix. Implementations
// must be immutable after construction and safe for concurrent reads.
class PsdOperator {
 public:
  virtual ~PsdOperator() = default;

  virtual Eigen::Index n() const = 0;
  virtual double entry(Eigen::Index i, Eigen::Index j) const = 0;
  virtual Eigen::VectorXd column(Eigen::Index j) const = 0;
  virtual Eigen::VectorXd matvec(const Eigen::VectorXd& v) const = 0;

  // Gathers A[:, idx] for a list of (possibly repeated) column indices.
  Eigen::MatrixXd columns(const std::vector<Eigen::Index>& idx) const;

  // Dense copy; throws TooLargeError when n() exceeds the cap.
  Eigen::MatrixXd materialize(Eigen::Index cap = kDeskCap) const;

 protected:
  void check_index(Eigen::Index i) const;
  void check_vector(const Eigen::VectorXd& v) const;
};

// PSD operator backed by an explicit dense matrix.
class DenseOperator final : public PsdOperator {
 public:
  // Symmetrizes the input exactly; rejects matrices whose asymmetry exceeds
  // 1e-12 times the largest entry magnitude.
  explicit DenseOperator(Eigen::MatrixXd a);

  Eigen::Index n() const override { return a_.rows(); }
  double entry(Eigen::Index i, Eigen::Index j) const override;
  Eigen::VectorXd column(Eigen::Index j) const override;
  Eigen::VectorXd matvec(const Eigen::VectorXd& v) const override;

  const Eigen::MatrixXd& dense() const { return a_; }

 private:
  Eigen::MatrixXd a_;
};

// PSD operator defined by an entry generator, for matrices that are never
// stored. Columns are assembled on demand and kept in a bounded cache so that
// repeated landmark access stays cheap.
class ImplicitOperator final : public PsdOperator {
 public:
  using EntryFn = std::function<double(Eigen::Index, Eigen::Index)>;

  ImplicitOperator(Eigen::Index n, EntryFn entry_fn,
                   std::size_t column_cache_budget = 256);

  Eigen::Index n() const override { return n_; }
  double entry(Eigen::Index i, Eigen::Index j) const override;
  Eigen::VectorXd column(Eigen::Index j) const override;
  Eigen::VectorXd matvec(const Eigen::VectorXd& v) const override;

 private:
  Eigen::Index n_;
  EntryFn entry_fn_;
  std::size_t cache_budget_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<Eigen::Index, Eigen::VectorXd> cache_;
};

}  // namespace blocknys
