#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace psscf {

/// One (row, col, value) entry used to assemble matrices.
struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Square sparse matrix in compressed sparse row form.
///
/// Canonical invariants, maintained by every constructor and operation:
/// column indices strictly increasing within a row, no stored value is
/// exactly zero, nnz() == vals().size(). Instances are immutable after
/// construction; operations return new values.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Builds from triplets; duplicate entries are summed, zeros dropped.
  static SparseMatrix from_triplets(std::size_t n, std::span<const Triplet> entries);

  /// Builds from a dense row-major n*n buffer, dropping exact zeros.
  static SparseMatrix from_dense(std::size_t n, std::span<const double> dense);

  static SparseMatrix identity(std::size_t n);
  static SparseMatrix zero(std::size_t n);

  std::size_t dim() const { return n_; }
  std::size_t nnz() const { return vals_.size(); }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> cols() const { return cols_; }
  std::span<const double> vals() const { return vals_; }

  /// Entry lookup by binary search; absent entries read as zero.
  double at(std::size_t row, std::size_t col) const;

  std::vector<double> to_dense() const;

  bool operator==(const SparseMatrix& other) const = default;

 private:
  friend class SparseBuilder;
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
};

/// Row-by-row assembly helper; rows must be appended in order with
/// strictly increasing columns. Skips exact zeros.
class SparseBuilder {
 public:
  explicit SparseBuilder(std::size_t n, std::size_t nnz_hint = 0);
  void push(std::size_t col, double value);
  void finish_row();
  SparseMatrix take();

 private:
  SparseMatrix m_;
  std::size_t rows_done_ = 0;
};

/// Exact sparse product; each output entry is a compensated dot product
/// (error-free transformation accumulation), so the stored value is within
/// one rounding of the exact dot. Counts toward matmul_count().
SparseMatrix matmul(const SparseMatrix& a, const SparseMatrix& b);

/// s*A + t*B with exact cancellations removed.
SparseMatrix add_scaled(const SparseMatrix& a, double s, const SparseMatrix& b, double t);

/// sum_i coeffs[i] * terms[i], compensated accumulation per entry.
/// Terms with coefficient zero are skipped.
SparseMatrix linear_combination(std::span<const double> coeffs,
                                std::span<const SparseMatrix* const> terms);

/// Maximum absolute column sum.
double one_norm(const SparseMatrix& a);

std::vector<double> matvec(const SparseMatrix& a, std::span<const double> x);
std::vector<double> matvec_transpose(const SparseMatrix& a, std::span<const double> x);

/// nnz / n^2.
double sparsity(const SparseMatrix& a);

/// Process-wide count of matmul() invocations, for cost instrumentation.
std::uint64_t matmul_count();
void reset_matmul_count();

}  // namespace psscf
