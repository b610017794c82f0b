#include "blocknys/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "blocknys/errors.hpp"

namespace blocknys {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

Eigen::MatrixXd read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix market file: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw IoError("empty matrix market file: " + path);
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (lower(tag) != "%%matrixmarket" || lower(object) != "matrix")
    throw IoError("missing matrix market banner in " + path);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer" && field != "double")
    throw IoError("unsupported matrix market field: " + field);
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
    throw IoError("unsupported matrix market symmetry: " + symmetry);

  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      const auto pos = out.find_first_not_of(" \t\r");
      if (pos == std::string::npos) continue;
      if (out[pos] == '%') continue;
      return true;
    }
    return false;
  };

  if (!next_data_line(line)) throw IoError("missing size line in " + path);
  std::istringstream sizes(line);

  if (format == "coordinate") {
    Eigen::Index rows = 0, cols = 0;
    long long nnz = 0;
    sizes >> rows >> cols >> nnz;
    if (rows <= 0 || cols <= 0 || nnz < 0)
      throw IoError("bad coordinate size line in " + path);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
    for (long long k = 0; k < nnz; ++k) {
      if (!next_data_line(line))
        throw IoError("truncated coordinate data in " + path);
      std::istringstream entry(line);
      Eigen::Index i = 0, j = 0;
      double v = 0.0;
      entry >> i >> j >> v;
      if (i < 1 || i > rows || j < 1 || j > cols)
        throw IoError("coordinate entry out of range in " + path);
      a(i - 1, j - 1) = v;
      if (symmetric) a(j - 1, i - 1) = v;
    }
    return a;
  }

  if (format == "array") {
    Eigen::Index rows = 0, cols = 0;
    sizes >> rows >> cols;
    if (rows <= 0 || cols <= 0)
      throw IoError("bad array size line in " + path);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Eigen::Index i0 = symmetric ? j : 0;
      for (Eigen::Index i = i0; i < rows; ++i) {
        if (!next_data_line(line))
          throw IoError("truncated array data in " + path);
        const double v = std::stod(line);
        a(i, j) = v;
        if (symmetric) a(j, i) = v;
      }
    }
    return a;
  }

  throw IoError("unsupported matrix market format: " + format);
}

void write_matrix_market(const std::string& path, const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw DimensionMismatchError("matrix market writer expects a square matrix");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write matrix market file: " + path);
  out << "%%MatrixMarket matrix array real symmetric\n";
  out << a.rows() << " " << a.cols() << "\n";
  out.precision(17);
  out << std::scientific;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = j; i < a.rows(); ++i) out << a(i, j) << "\n";
  if (!out) throw IoError("write failed for matrix market file: " + path);
}

}  // namespace blocknys
