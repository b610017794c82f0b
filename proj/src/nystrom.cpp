#include "blocknys/nystrom.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>

#include <Eigen/Dense>

#include "blocknys/dense_oracle.hpp"
#include "blocknys/errors.hpp"
#include "blocknys/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "factor containers assume a little-endian host");

namespace blocknys {

LandmarkSet sample_landmarks(const Eigen::VectorXd& scores, Eigen::Index b,
                             std::uint64_t seed) {
  if (b <= 0) throw InvalidSpecError("sample_landmarks: b must be positive");
  std::vector<double> weights(scores.data(), scores.data() + scores.size());
  DiscreteSampler sampler(weights);  // rejects negative or all-zero scores
  Rng rng = make_rng(seed);
  LandmarkSet out;
  out.seed = seed;
  out.indices.resize(static_cast<std::size_t>(b));
  for (Eigen::Index i = 0; i < b; ++i)
    out.indices[static_cast<std::size_t>(i)] =
        static_cast<Eigen::Index>(sampler.draw(rng));
  return out;
}

void NystromFactor::finalize_from_w() {
  const Eigen::Index m = w_.rows();
  if (m == 0) {
    rank_ = 0;
    use_llt_ = false;
    return;
  }
  // Cholesky first: the landmark Gram block of a positive definite matrix is
  // positive definite, and the pivot gate below routes anything marginal to
  // the thresholded pseudo-inverse.
  const double wmax_diag = w_.diagonal().maxCoeff();
  Eigen::LLT<Eigen::MatrixXd> llt(w_);
  if (llt.info() == Eigen::Success && wmax_diag > 0.0) {
    const double min_pivot = llt.matrixLLT().diagonal().minCoeff();
    const double gate = std::sqrt(static_cast<double>(m) *
                                  std::numeric_limits<double>::epsilon() *
                                  wmax_diag);
    if (min_pivot > gate) {
      use_llt_ = true;
      llt_ = std::move(llt);
      rank_ = m;
      return;
    }
  }
  const SymEig ew = sym_eig(w_);
  const double lmax = std::max(ew.values.maxCoeff(), 0.0);
  const double tau = static_cast<double>(m) *
                     std::numeric_limits<double>::epsilon() * lmax;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m; ++i)
    if (ew.values(i) > tau) keep.push_back(i);
  rank_ = static_cast<Eigen::Index>(keep.size());
  eig_basis_.resize(m, rank_);
  eig_sigma_.resize(rank_);
  for (Eigen::Index r = 0; r < rank_; ++r) {
    eig_basis_.col(r) = ew.vectors.col(keep[static_cast<std::size_t>(r)]);
    eig_sigma_(r) = ew.values(keep[static_cast<std::size_t>(r)]);
  }
  use_llt_ = false;
}

NystromFactor build_factor(const PsdOperator& a, const LandmarkSet& landmarks) {
  if (landmarks.indices.empty())
    throw InvalidSpecError("build_factor: empty landmark set");
  NystromFactor f;
  f.seed_ = landmarks.seed;
  std::set<Eigen::Index> unique(landmarks.indices.begin(),
                                landmarks.indices.end());
  f.landmarks_.assign(unique.begin(), unique.end());
  if (f.landmarks_.front() < 0 || f.landmarks_.back() >= a.n())
    throw DimensionMismatchError("build_factor: landmark index out of range");
  const Eigen::Index m = static_cast<Eigen::Index>(f.landmarks_.size());
  f.c_ = a.columns(f.landmarks_);
  f.w_.resize(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      f.w_(i, j) = f.c_(f.landmarks_[static_cast<std::size_t>(i)], j);
  f.w_ = ((f.w_ + f.w_.transpose()) * 0.5).eval();
  f.finalize_from_w();
  return f;
}

Eigen::VectorXd NystromFactor::w_pinv_apply(const Eigen::VectorXd& x) const {
  if (x.size() != width())
    throw DimensionMismatchError("w_pinv_apply: vector length mismatch");
  if (use_llt_) return llt_.solve(x);
  if (rank_ == 0) return Eigen::VectorXd::Zero(width());
  return eig_basis_ *
         (eig_sigma_.cwiseInverse().asDiagonal() * (eig_basis_.transpose() * x));
}

Eigen::VectorXd NystromFactor::apply(const Eigen::VectorXd& v) const {
  if (v.size() != n())
    throw DimensionMismatchError("factor apply: vector length mismatch");
  return c_ * w_pinv_apply(c_.transpose() * v);
}

const Eigen::MatrixXd& NystromFactor::wdag() const {
  if (!wdag_ready_) {
    if (use_llt_) {
      wdag_cache_ =
          llt_.solve(Eigen::MatrixXd::Identity(width(), width()));
    } else if (rank_ == 0) {
      wdag_cache_ = Eigen::MatrixXd::Zero(width(), width());
    } else {
      wdag_cache_ = eig_basis_ * eig_sigma_.cwiseInverse().asDiagonal() *
                    eig_basis_.transpose();
    }
    wdag_ready_ = true;
  }
  return wdag_cache_;
}

Eigen::MatrixXd NystromFactor::reduced_root() const {
  if (use_llt_) {
    // Z = C L^{-T} gives Z Z^T = C W^{-1} C^T.
    return llt_.matrixU().solve<Eigen::OnTheRight>(c_);
  }
  if (rank_ == 0) return Eigen::MatrixXd::Zero(n(), 0);
  return c_ * eig_basis_ * eig_sigma_.cwiseSqrt().cwiseInverse().asDiagonal();
}

Eigen::MatrixXd NystromFactor::materialize_approx(Eigen::Index cap) const {
  if (n() > cap)
    throw TooLargeError("factor materialization exceeds the desk cap");
  const Eigen::MatrixXd z = reduced_root();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n(), n());
  out.selfadjointView<Eigen::Lower>().rankUpdate(z, 1.0);
  return Eigen::MatrixXd(out.selfadjointView<Eigen::Lower>());
}

double check_operator_error(const PsdOperator& a, const NystromFactor& f,
                            Eigen::Index cap) {
  if (a.n() != f.n())
    throw DimensionMismatchError("check_operator_error: size mismatch");
  const Eigen::MatrixXd diff = a.materialize(cap) - f.materialize_approx(cap);
  return spectral_norm_sym(diff, cap);
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t get_u64(std::istream& in, const std::string& what) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw IoError("truncated factor container: " + what);
  return v;
}

void put_matrix_row_major(std::ostream& out, const Eigen::MatrixXd& m) {
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajor r = m;
  out.write(reinterpret_cast<const char*>(r.data()),
            static_cast<std::streamsize>(sizeof(double)) * r.size());
}

Eigen::MatrixXd get_matrix_row_major(std::istream& in, Eigen::Index rows,
                                     Eigen::Index cols,
                                     const std::string& what) {
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor r(rows, cols);
  in.read(reinterpret_cast<char*>(r.data()),
          static_cast<std::streamsize>(sizeof(double)) * r.size());
  if (!in) throw IoError("truncated factor container: " + what);
  return Eigen::MatrixXd(r);
}

}  // namespace

void save_factor_stream(std::ostream& out, const NystromFactor& f) {
  put_u64(out, static_cast<std::uint64_t>(f.n()));
  put_u64(out, static_cast<std::uint64_t>(f.width()));
  put_u64(out, static_cast<std::uint64_t>(f.rank()));
  put_u64(out, f.seed());
  put_matrix_row_major(out, f.c());
  put_matrix_row_major(out, f.wdag());
}

NystromFactor load_factor_stream(std::istream& in, const std::string& what) {
  const auto n = static_cast<Eigen::Index>(get_u64(in, what));
  const auto width = static_cast<Eigen::Index>(get_u64(in, what));
  const auto rank = static_cast<Eigen::Index>(get_u64(in, what));
  const std::uint64_t seed = get_u64(in, what);
  if (n <= 0 || width <= 0 || rank < 0 || rank > width)
    throw IoError("corrupt factor header: " + what);
  NystromFactor f;
  f.seed_ = seed;
  f.c_ = get_matrix_row_major(in, n, width, what);
  const Eigen::MatrixXd wdag = get_matrix_row_major(in, width, width, what);

  // Recover the landmark Gram block from its pseudo-inverse: both share the
  // same range, so inverting the kept eigenvalues is exact.
  const SymEig ed = sym_eig(wdag);
  const double dmax = std::max(ed.values.maxCoeff(), 0.0);
  const double tau = static_cast<double>(width) *
                     std::numeric_limits<double>::epsilon() * dmax;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < width; ++i)
    if (ed.values(i) > tau) keep.push_back(i);
  if (static_cast<Eigen::Index>(keep.size()) != rank)
    throw IoError("factor container rank does not match payload: " + what);
  f.rank_ = rank;
  f.use_llt_ = false;
  f.eig_basis_.resize(width, rank);
  f.eig_sigma_.resize(rank);
  for (Eigen::Index r = 0; r < rank; ++r) {
    f.eig_basis_.col(r) = ed.vectors.col(keep[static_cast<std::size_t>(r)]);
    f.eig_sigma_(r) = 1.0 / ed.values(keep[static_cast<std::size_t>(r)]);
  }
  f.w_ = f.eig_basis_ * f.eig_sigma_.asDiagonal() * f.eig_basis_.transpose();
  f.wdag_cache_ = wdag;
  f.wdag_ready_ = true;
  return f;
}

void save_factor(const std::string& path, const NystromFactor& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write factor container: " + path);
  save_factor_stream(out, f);
  if (!out) throw IoError("write failed for factor container: " + path);
}

NystromFactor load_factor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open factor container: " + path);
  NystromFactor f = load_factor_stream(in, path);
  in.peek();
  if (!in.eof()) throw IoError("trailing bytes in factor container: " + path);
  return f;
}

}  // namespace blocknys
