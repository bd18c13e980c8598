#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qpool {

/// Dense row-major matrix of doubles. Rows are frequency bins, columns time frames.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  std::size_t size() const noexcept { return data.size(); }
  bool same_shape(const Matrix& other) const noexcept {
    return rows == other.rows && cols == other.cols;
  }

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<const double> values() const noexcept { return data; }

  bool operator==(const Matrix&) const = default;
};

}  // namespace qpool
