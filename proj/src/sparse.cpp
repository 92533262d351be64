#include "kfp/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace kfp {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::span<const Triplet> entries) {
  if (rows < 0 || cols < 0) {
    throw std::invalid_argument("SparseMatrix: negative dimension");
  }
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw std::out_of_range("SparseMatrix::from_triplets: index out of range");
    }
  }

  SparseMatrix A;
  A.rows_ = rows;
  A.cols_ = cols;

  // Counting sort by row, then sort and compress each row.
  std::vector<int> count(static_cast<std::size_t>(rows) + 1, 0);
  for (const auto& t : entries) ++count[static_cast<std::size_t>(t.row) + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<std::pair<int, double>> bucket(entries.size());
  {
    std::vector<int> fill(count.begin(), count.end() - 1);
    for (const auto& t : entries) {
      bucket[static_cast<std::size_t>(fill[static_cast<std::size_t>(t.row)]++)] = {
          t.col, t.value};
    }
  }

  A.offsets_.assign(static_cast<std::size_t>(rows) + 1, 0);
  A.columns_.reserve(entries.size());
  A.values_.reserve(entries.size());
  for (int i = 0; i < rows; ++i) {
    auto first = bucket.begin() + count[static_cast<std::size_t>(i)];
    auto last = bucket.begin() + count[static_cast<std::size_t>(i) + 1];
    std::sort(first, last,
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = first; it != last; ++it) {
      if (!A.columns_.empty() &&
          static_cast<int>(A.columns_.size()) > A.offsets_[static_cast<std::size_t>(i)] &&
          A.columns_.back() == it->first) {
        A.values_.back() += it->second;
      } else {
        A.columns_.push_back(it->first);
        A.values_.push_back(it->second);
      }
    }
    A.offsets_[static_cast<std::size_t>(i) + 1] = static_cast<int>(A.columns_.size());
  }
  return A;
}

SparseMatrix SparseMatrix::identity(int size) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) t.push_back({i, i, 1.0});
  return from_triplets(size, size, t);
}

double SparseMatrix::at(int i, int j) const {
  const auto first = columns_.begin() + offsets_[static_cast<std::size_t>(i)];
  const auto last = columns_.begin() + offsets_[static_cast<std::size_t>(i) + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - columns_.begin())];
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(std::min(rows_, cols_)), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(static_cast<int>(i), static_cast<int>(i));
  return d;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (int i = 0; i < rows_; ++i) {
    for (int k = offsets_[static_cast<std::size_t>(i)]; k < offsets_[static_cast<std::size_t>(i) + 1]; ++k) {
      t.push_back({columns_[static_cast<std::size_t>(k)], i, values_[static_cast<std::size_t>(k)]});
    }
  }
  return from_triplets(cols_, rows_, t);
}

void SparseMatrix::matvec(std::span<const double> x, std::span<double> y) const {
  if (x.size() != static_cast<std::size_t>(cols_) ||
      y.size() != static_cast<std::size_t>(rows_)) {
    throw std::invalid_argument("SparseMatrix::matvec: dimension mismatch");
  }
  const int* off = offsets_.data();
  const int* col = columns_.data();
  const double* val = values_.data();
  for (int i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (int k = off[i]; k < off[i + 1]; ++k) sum += val[k] * x[static_cast<std::size_t>(col[k])];
    y[static_cast<std::size_t>(i)] = sum;
  }
}

std::vector<double> SparseMatrix::matvec(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(rows_));
  matvec(x, y);
  return y;
}

double SparseMatrix::bilinear(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != static_cast<std::size_t>(rows_)) {
    throw std::invalid_argument("SparseMatrix::bilinear: dimension mismatch");
  }
  return dot(x, matvec(y));
}

int SparseMatrix::bandwidth() const {
  int band = 0;
  for (int i = 0; i < rows_; ++i) {
    for (int k = offsets_[static_cast<std::size_t>(i)]; k < offsets_[static_cast<std::size_t>(i) + 1]; ++k) {
      band = std::max(band, std::abs(columns_[static_cast<std::size_t>(k)] - i));
    }
  }
  return band;
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ &&
         offsets_ == other.offsets_ && columns_ == other.columns_;
}

SparseMatrix linear_combination(
    std::span<const std::pair<double, const SparseMatrix*>> terms) {
  if (terms.empty()) {
    throw std::invalid_argument("linear_combination: no operands");
  }
  const SparseMatrix& first = *terms.front().second;
  for (const auto& [c, A] : terms) {
    if (A->rows() != first.rows() || A->cols() != first.cols()) {
      throw std::invalid_argument("linear_combination: shape mismatch");
    }
  }

  const bool shared = std::all_of(terms.begin(), terms.end(), [&](const auto& t) {
    return t.second->same_pattern(first);
  });
  if (shared) {
    SparseMatrix out = first;
    std::fill(out.values_.begin(), out.values_.end(), 0.0);
    for (const auto& [c, A] : terms) {
      for (std::size_t k = 0; k < out.values_.size(); ++k) out.values_[k] += c * A->values_[k];
    }
    return out;
  }

  std::vector<Triplet> t;
  for (const auto& [c, A] : terms) {
    for (int i = 0; i < A->rows(); ++i) {
      for (int k = A->offsets_[static_cast<std::size_t>(i)]; k < A->offsets_[static_cast<std::size_t>(i) + 1]; ++k) {
        t.push_back({i, A->columns_[static_cast<std::size_t>(k)], c * A->values_[static_cast<std::size_t>(k)]});
      }
    }
  }
  return SparseMatrix::from_triplets(first.rows(), first.cols(), t);
}

SparseMatrix linear_combination(
    std::initializer_list<std::pair<double, const SparseMatrix*>> terms) {
  return linear_combination(
      std::span<const std::pair<double, const SparseMatrix*>>(terms.begin(), terms.size()));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

namespace {

void residual(const SparseMatrix& A, std::span<const double> b,
              std::span<const double> x, std::span<double> r) {
  A.matvec(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
}

}  // namespace

std::pair<std::vector<double>, SolveStats> solve(
    const SparseMatrix& A, std::span<const double> b, const SolverOptions& options,
    std::optional<std::span<const double>> initial_guess) {
  if (A.rows() != A.cols()) throw std::invalid_argument("solve: matrix not square");
  if (b.size() != static_cast<std::size_t>(A.rows())) {
    throw std::invalid_argument("solve: right-hand side size mismatch");
  }
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve: tol must be positive");

  const std::size_t n = b.size();
  SolveStats stats;
  std::vector<double> x(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    stats.converged = true;
    return {x, stats};
  }
  if (initial_guess) {
    if (initial_guess->size() != n) throw std::invalid_argument("solve: initial guess size mismatch");
    std::copy(initial_guess->begin(), initial_guess->end(), x.begin());
  }

  std::vector<double> inv_diag = A.diagonal();
  for (auto& d : inv_diag) d = (d != 0.0) ? 1.0 / d : 1.0;

  const double target = options.tol * bnorm;
  std::vector<double> r(n), r_hat(n), p(n, 0.0), v(n, 0.0), s(n), t(n), p_hat(n), s_hat(n);
  residual(A, b, x, r);
  double rnorm = norm2(r);
  stats.residual = rnorm / bnorm;
  if (rnorm <= target) {
    stats.converged = true;
    return {x, stats};
  }

  r_hat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  bool breakdown_used = false;
  constexpr double tiny = std::numeric_limits<double>::min() * 1e10;

  auto restart = [&]() {
    residual(A, b, x, r);
    r_hat = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    rho = alpha = omega = 1.0;
  };

  while (stats.iterations < options.max_iter) {
    ++stats.iterations;
    const double rho_new = dot(r_hat, r);
    bool broke = std::abs(rho_new) < tiny * bnorm;
    double denom = 0.0;
    if (!broke) {
      const double beta = (rho_new / rho) * (alpha / omega);
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      for (std::size_t i = 0; i < n; ++i) p_hat[i] = inv_diag[i] * p[i];
      A.matvec(p_hat, v);
      denom = dot(r_hat, v);
      broke = std::abs(denom) < tiny;
    }
    if (broke) {
      if (breakdown_used) break;
      breakdown_used = true;
      ++stats.restarts;
      restart();
      continue;
    }
    alpha = rho_new / denom;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm2(s) <= target) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p_hat[i];
      residual(A, b, x, r);
      rnorm = norm2(r);
      if (rnorm <= target) break;
      restart();
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) s_hat[i] = inv_diag[i] * s[i];
    A.matvec(s_hat, t);
    const double tt = dot(t, t);
    omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
    for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p_hat[i] + omega * s_hat[i];
    for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
    rho = rho_new;
    rnorm = norm2(r);
    if (rnorm <= target) {
      // Guard against drift of the recursive residual.
      residual(A, b, x, r);
      rnorm = norm2(r);
      if (rnorm <= target) break;
      restart();
      continue;
    }
    if (std::abs(omega) < tiny) {
      if (breakdown_used) break;
      breakdown_used = true;
      ++stats.restarts;
      restart();
    }
  }

  residual(A, b, x, r);
  stats.residual = norm2(r) / bnorm;
  stats.converged = stats.residual <= options.tol;
  return {x, stats};
}

}  // namespace kfp
