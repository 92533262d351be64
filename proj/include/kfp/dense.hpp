#pragma once

#include <cstddef>
#include <vector>

namespace kfp {

/// Small row-major dense matrix for matrix-exponential checks.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  DenseMatrix operator*(const DenseMatrix& other) const;
  DenseMatrix operator+(const DenseMatrix& other) const;
  DenseMatrix operator-(const DenseMatrix& other) const;
  DenseMatrix scaled(double factor) const;

  double norm1() const;          // max column sum
  double norm_frobenius() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// exp(A) by scaling and squaring with a truncated Taylor series.
DenseMatrix expm(const DenseMatrix& A);

}  // namespace kfp
