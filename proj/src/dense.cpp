#include "kfp/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kfp {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& other) const {
  if (cols_ != other.rows_) throw std::invalid_argument("DenseMatrix: shape mismatch");
  DenseMatrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
    }
  }
  return out;
}

DenseMatrix DenseMatrix::operator+(const DenseMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw std::invalid_argument("DenseMatrix: shape mismatch");
  }
  DenseMatrix out = *this;
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] += other.data_[k];
  return out;
}

DenseMatrix DenseMatrix::operator-(const DenseMatrix& other) const {
  return *this + other.scaled(-1.0);
}

DenseMatrix DenseMatrix::scaled(double factor) const {
  DenseMatrix out = *this;
  for (auto& x : out.data_) x *= factor;
  return out;
}

double DenseMatrix::norm1() const {
  double best = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) sum += std::abs((*this)(i, j));
    best = std::max(best, sum);
  }
  return best;
}

double DenseMatrix::norm_frobenius() const {
  double sum = 0.0;
  for (double x : data_) sum += x * x;
  return std::sqrt(sum);
}

DenseMatrix expm(const DenseMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("expm: matrix not square");
  const double norm = A.norm1();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const DenseMatrix X = A.scaled(std::ldexp(1.0, -squarings));

  DenseMatrix result = DenseMatrix::identity(A.rows());
  DenseMatrix term = result;
  for (int k = 1; k <= 30; ++k) {
    term = (term * X).scaled(1.0 / k);
    result = result + term;
    if (term.norm1() <= 1e-18 * result.norm1()) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace kfp
