#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace blocknys {

// Sparse sign embedding with exactly one nonzero per input coordinate:
// coordinate j lands in bucket[j] with sign sign[j].
struct CountSketch {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::vector<Eigen::Index> bucket;  // size cols
  std::vector<double> sign;          // size cols, each +/-1
};

CountSketch make_count_sketch(Eigen::Index rows, Eigen::Index cols,
                              std::uint64_t seed);

// S * A, where A has `cols` rows: bucket-wise signed row sums.
Eigen::MatrixXd count_sketch_left(const CountSketch& s,
                                  const Eigen::MatrixXd& a);

// A * S^T, where A has `cols` columns: bucket-wise signed column sums.
Eigen::MatrixXd count_sketch_right_t(const CountSketch& s,
                                     const Eigen::MatrixXd& a);

Eigen::MatrixXd count_sketch_dense(const CountSketch& s);

// Dense Johnson-Lindenstrauss embedding: rows x cols with N(0, 1/rows)
// entries, so squared norms are preserved in expectation.
Eigen::MatrixXd gaussian_embedding(Eigen::Index rows, Eigen::Index cols,
                                   std::uint64_t seed);

}  // namespace blocknys
