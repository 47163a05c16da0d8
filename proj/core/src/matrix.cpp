#include "benchbias/matrix.hpp"

#include <string>

#include "benchbias/error.hpp"

namespace benchbias {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::InvalidShape, "buffer of " + std::to_string(data_.size()) +
                                             " values cannot hold " + std::to_string(rows_) + "x" +
                                             std::to_string(cols_));
  }
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw Error(ErrorCode::InvalidShape, "row " + std::to_string(r) + " has " +
                                               std::to_string(rows[r].size()) + " columns, expected " +
                                               std::to_string(cols));
    }
    data.insert(data.end(), rows[r].begin(), rows[r].end());
  }
  return DenseMatrix(rows.size(), cols, std::move(data));
}

}  // namespace benchbias
