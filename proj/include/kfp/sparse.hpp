#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace kfp {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within a row; explicit zeros produced by assembly are kept so that
/// matrices assembled on the same mesh share one sparsity pattern.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Duplicates are summed. Throws std::out_of_range on a bad index.
  static SparseMatrix from_triplets(int rows, int cols,
                                    std::span<const Triplet> entries);
  static SparseMatrix identity(int size);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  const std::vector<int>& offsets() const { return offsets_; }
  const std::vector<int>& columns() const { return columns_; }
  const std::vector<double>& values() const { return values_; }

  /// Stored value at (i, j), zero if not in the pattern.
  double at(int i, int j) const;

  std::vector<double> diagonal() const;
  SparseMatrix transpose() const;

  /// y = A·x. Throws std::invalid_argument on a dimension mismatch.
  std::vector<double> matvec(std::span<const double> x) const;
  void matvec(std::span<const double> x, std::span<double> y) const;

  /// xᵀ A y
  double bilinear(std::span<const double> x, std::span<const double> y) const;

  /// Largest off-diagonal distance |i - j| over stored entries.
  int bandwidth() const;

  bool same_pattern(const SparseMatrix& other) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> offsets_{0};
  std::vector<int> columns_;
  std::vector<double> values_;

  friend SparseMatrix linear_combination(
      std::span<const std::pair<double, const SparseMatrix*>> terms);
};

/// Σ cₖ·Aₖ over matrices of equal shape. Uses the shared pattern directly when
/// all operands have one, otherwise merges row patterns.
SparseMatrix linear_combination(
    std::span<const std::pair<double, const SparseMatrix*>> terms);

SparseMatrix linear_combination(
    std::initializer_list<std::pair<double, const SparseMatrix*>> terms);

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;  // ‖A·x − b‖₂ / ‖b‖₂
  bool converged = false;
  int restarts = 0;
};

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 1000;
};

/// Jacobi-preconditioned BiCGStab. Recurrence breakdown triggers one restart
/// from the current iterate; non-convergence is reported, not thrown.
std::pair<std::vector<double>, SolveStats> solve(
    const SparseMatrix& A, std::span<const double> b,
    const SolverOptions& options = {},
    std::optional<std::span<const double>> initial_guess = std::nullopt);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace kfp
