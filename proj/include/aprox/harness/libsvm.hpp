#pragma once

#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "aprox/numeric.hpp"

namespace aprox {

/// Rows of (1-based index, value) pairs with labels mapped to {-1, +1}.
struct SparseDataset {
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> labels;
  /// Labels as they appeared in the input, kept for serialization.
  std::vector<std::string> raw_labels;
  int n_features = 0;

  std::size_t size() const { return rows.size(); }
};

/// Accepts `label idx:val idx:val ...` lines; '#' starts a comment, blank
/// lines are skipped. Indices must be strictly increasing within a row.
/// Labels that are all +-1 are kept; otherwise exactly two distinct raw
/// labels are allowed and the lexicographically smaller one becomes -1.
/// Throws ParseError with line and column.
SparseDataset parse_libsvm(std::istream& in);
SparseDataset parse_libsvm(const std::string& text);
SparseDataset load_libsvm(const std::string& path);

/// One line per row, single spaces, shortest round-trip value formatting.
std::string serialize_libsvm(const SparseDataset& data);

struct DenseData {
  Matrix A;
  Vector b;
};

/// Dense m x n_features matrix. With `rescale`, every column is mapped
/// affinely onto [-1, 1] using its min and max (implicit zeros included);
/// constant columns become 0.
DenseData to_dense(const SparseDataset& data, bool rescale);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace aprox
