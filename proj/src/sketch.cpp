#include "blocknys/sketch.hpp"

#include <cmath>

#include "blocknys/errors.hpp"
#include "blocknys/rng.hpp"

namespace blocknys {

CountSketch make_count_sketch(Eigen::Index rows, Eigen::Index cols,
                              std::uint64_t seed) {
  if (rows < 1 || cols < 1)
    throw InvalidSpecError("count sketch dimensions must be positive");
  CountSketch s;
  s.rows = rows;
  s.cols = cols;
  s.bucket.resize(static_cast<std::size_t>(cols));
  s.sign.resize(static_cast<std::size_t>(cols));
  Rng rng = make_rng(seed);
  for (Eigen::Index j = 0; j < cols; ++j) {
    s.bucket[static_cast<std::size_t>(j)] =
        static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(rows));
    s.sign[static_cast<std::size_t>(j)] = (rng() & 1u) ? 1.0 : -1.0;
  }
  return s;
}

Eigen::MatrixXd count_sketch_left(const CountSketch& s,
                                  const Eigen::MatrixXd& a) {
  if (a.rows() != s.cols)
    throw DimensionMismatchError("count sketch: row count mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(s.rows, a.cols());
  for (Eigen::Index j = 0; j < s.cols; ++j)
    out.row(s.bucket[static_cast<std::size_t>(j)]) +=
        s.sign[static_cast<std::size_t>(j)] * a.row(j);
  return out;
}

Eigen::MatrixXd count_sketch_right_t(const CountSketch& s,
                                     const Eigen::MatrixXd& a) {
  if (a.cols() != s.cols)
    throw DimensionMismatchError("count sketch: column count mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), s.rows);
  for (Eigen::Index j = 0; j < s.cols; ++j)
    out.col(s.bucket[static_cast<std::size_t>(j)]) +=
        s.sign[static_cast<std::size_t>(j)] * a.col(j);
  return out;
}

Eigen::MatrixXd count_sketch_dense(const CountSketch& s) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(s.rows, s.cols);
  for (Eigen::Index j = 0; j < s.cols; ++j)
    out(s.bucket[static_cast<std::size_t>(j)], j) =
        s.sign[static_cast<std::size_t>(j)];
  return out;
}

Eigen::MatrixXd gaussian_embedding(Eigen::Index rows, Eigen::Index cols,
                                   std::uint64_t seed) {
  if (rows < 1 || cols < 1)
    throw InvalidSpecError("embedding dimensions must be positive");
  Rng rng = make_rng(seed);
  Eigen::MatrixXd s = gaussian_matrix(rng, rows, cols);
  s /= std::sqrt(static_cast<double>(rows));
  return s;
}

}  // namespace blocknys
