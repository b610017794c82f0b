#pragma once

#include <string>

#include <Eigen/Core>

namespace blocknys {

// Reads a real matrix in Matrix Market coordinate or array format; symmetric
// banners are expanded to full storage.
Eigen::MatrixXd read_matrix_market(const std::string& path);

// Writes a symmetric matrix in array format (lower triangle, column major)
// with full double precision.
void write_matrix_market(const std::string& path, const Eigen::MatrixXd& a);

}  // namespace blocknys
