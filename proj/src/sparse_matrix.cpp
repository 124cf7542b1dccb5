#include "psscf/sparse_matrix.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

namespace psscf {

namespace {

std::atomic<std::uint64_t> g_matmul_count{0};

// Error-free sum: s + t = a + b exactly, |t| <= ulp(s) (Knuth two-sum).
inline void two_sum(double a, double b, double& s, double& t) {
  s = a + b;
  const double bb = s - a;
  t = (a - (s - bb)) + (b - bb);
}

// Error-free product via fma: p + e = a * b exactly.
inline void two_prod(double a, double b, double& p, double& e) {
  p = a * b;
  e = std::fma(a, b, -p);
}

// Dense scratch row for scatter/gather accumulation with a compensation
// term per slot, giving near-correctly-rounded dot products.
class ScratchRow {
 public:
  explicit ScratchRow(std::size_t n) : sum_(n, 0.0), comp_(n, 0.0), marked_(n, 0) {}

  void accumulate(std::size_t col, double a, double b) {
    double p, pe;
    two_prod(a, b, p, pe);
    double s, se;
    two_sum(sum_[col], p, s, se);
    sum_[col] = s;
    comp_[col] += se + pe;
    if (!marked_[col]) {
      marked_[col] = 1;
      touched_.push_back(col);
    }
  }

  // Emits touched slots in increasing column order, then clears them.
  void flush(SparseBuilder& out) {
    std::sort(touched_.begin(), touched_.end());
    for (std::size_t col : touched_) {
      out.push(col, sum_[col] + comp_[col]);
      sum_[col] = 0.0;
      comp_[col] = 0.0;
      marked_[col] = 0;
    }
    touched_.clear();
    out.finish_row();
  }

 private:
  std::vector<double> sum_;
  std::vector<double> comp_;
  std::vector<unsigned char> marked_;
  std::vector<std::size_t> touched_;
};

void require_same_dim(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("sparse dimension mismatch: " + std::to_string(a.dim()) +
                                " vs " + std::to_string(b.dim()));
  }
}

}  // namespace

SparseBuilder::SparseBuilder(std::size_t n, std::size_t nnz_hint) {
  m_.n_ = n;
  m_.row_ptr_.clear();
  m_.row_ptr_.reserve(n + 1);
  m_.row_ptr_.push_back(0);
  if (nnz_hint > 0) {
    m_.cols_.reserve(nnz_hint);
    m_.vals_.reserve(nnz_hint);
  }
}

void SparseBuilder::push(std::size_t col, double value) {
  if (value == 0.0) return;
  m_.cols_.push_back(col);
  m_.vals_.push_back(value);
}

void SparseBuilder::finish_row() {
  m_.row_ptr_.push_back(m_.cols_.size());
  ++rows_done_;
}

SparseMatrix SparseBuilder::take() {
  while (rows_done_ < m_.n_) finish_row();
  return std::move(m_);
}

SparseMatrix SparseMatrix::from_triplets(std::size_t n, std::span<const Triplet> entries) {
  for (const Triplet& t : entries) {
    if (t.row >= n || t.col >= n) {
      throw std::invalid_argument("triplet index out of range");
    }
  }
  std::vector<Triplet> sorted(entries.begin(), entries.end());
  std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseBuilder builder(n, sorted.size());
  std::size_t row = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    while (row < sorted[i].row) {
      builder.finish_row();
      ++row;
    }
    const std::size_t col = sorted[i].col;
    double sum = 0.0;
    while (i < sorted.size() && sorted[i].row == row && sorted[i].col == col) {
      sum += sorted[i].value;
      ++i;
    }
    builder.push(col, sum);
    if (i >= sorted.size() || sorted[i].row != row) {
      builder.finish_row();
      ++row;
    }
  }
  return builder.take();
}

SparseMatrix SparseMatrix::from_dense(std::size_t n, std::span<const double> dense) {
  if (dense.size() != n * n) throw std::invalid_argument("dense buffer size != n*n");
  SparseBuilder builder(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      builder.push(j, dense[i * n + j]);
    }
    builder.finish_row();
  }
  return builder.take();
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  if (n == 0) throw std::invalid_argument("identity: n must be >= 1");
  SparseBuilder builder(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    builder.push(i, 1.0);
    builder.finish_row();
  }
  return builder.take();
}

SparseMatrix SparseMatrix::zero(std::size_t n) {
  SparseBuilder builder(n);
  return builder.take();
}

double SparseMatrix::at(std::size_t row, std::size_t col) const {
  if (row >= n_ || col >= n_) throw std::out_of_range("SparseMatrix::at");
  const auto begin = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  const auto end = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  const auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return 0.0;
  return vals_[static_cast<std::size_t>(it - cols_.begin())];
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> dense(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      dense[i * n_ + cols_[k]] = vals_[k];
    }
  }
  return dense;
}

SparseMatrix matmul(const SparseMatrix& a, const SparseMatrix& b) {
  require_same_dim(a, b);
  g_matmul_count.fetch_add(1, std::memory_order_relaxed);
  const std::size_t n = a.dim();
  SparseBuilder builder(n, a.nnz() + b.nnz());
  ScratchRow scratch(n);
  const auto arp = a.row_ptr();
  const auto acols = a.cols();
  const auto avals = a.vals();
  const auto brp = b.row_ptr();
  const auto bcols = b.cols();
  const auto bvals = b.vals();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ka = arp[i]; ka < arp[i + 1]; ++ka) {
      const std::size_t mid = acols[ka];
      const double av = avals[ka];
      for (std::size_t kb = brp[mid]; kb < brp[mid + 1]; ++kb) {
        scratch.accumulate(bcols[kb], av, bvals[kb]);
      }
    }
    scratch.flush(builder);
  }
  return builder.take();
}

SparseMatrix add_scaled(const SparseMatrix& a, double s, const SparseMatrix& b, double t) {
  require_same_dim(a, b);
  const std::size_t n = a.dim();
  SparseBuilder builder(n, a.nnz() + b.nnz());
  const auto arp = a.row_ptr();
  const auto acols = a.cols();
  const auto avals = a.vals();
  const auto brp = b.row_ptr();
  const auto bcols = b.cols();
  const auto bvals = b.vals();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t ka = arp[i];
    std::size_t kb = brp[i];
    while (ka < arp[i + 1] || kb < brp[i + 1]) {
      const std::size_t ca = ka < arp[i + 1] ? acols[ka] : n;
      const std::size_t cb = kb < brp[i + 1] ? bcols[kb] : n;
      if (ca < cb) {
        builder.push(ca, s * avals[ka]);
        ++ka;
      } else if (cb < ca) {
        builder.push(cb, t * bvals[kb]);
        ++kb;
      } else {
        builder.push(ca, s * avals[ka] + t * bvals[kb]);
        ++ka;
        ++kb;
      }
    }
    builder.finish_row();
  }
  return builder.take();
}

SparseMatrix linear_combination(std::span<const double> coeffs,
                                std::span<const SparseMatrix* const> terms) {
  if (coeffs.size() != terms.size()) {
    throw std::invalid_argument("linear_combination: coeffs/terms size mismatch");
  }
  std::size_t n = 0;
  for (const SparseMatrix* m : terms) {
    if (n == 0) n = m->dim();
    if (m->dim() != n) throw std::invalid_argument("linear_combination: dimension mismatch");
  }
  SparseBuilder builder(n);
  ScratchRow scratch(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t term = 0; term < terms.size(); ++term) {
      const double c = coeffs[term];
      if (c == 0.0) continue;
      const SparseMatrix& m = *terms[term];
      const auto rp = m.row_ptr();
      const auto cols = m.cols();
      const auto vals = m.vals();
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
        scratch.accumulate(cols[k], c, vals[k]);
      }
    }
    scratch.flush(builder);
  }
  return builder.take();
}

double one_norm(const SparseMatrix& a) {
  std::vector<double> col_sums(a.dim(), 0.0);
  const auto cols = a.cols();
  const auto vals = a.vals();
  for (std::size_t k = 0; k < vals.size(); ++k) {
    col_sums[cols[k]] += std::fabs(vals[k]);
  }
  double best = 0.0;
  for (double s : col_sums) best = std::max(best, s);
  return best;
}

std::vector<double> matvec(const SparseMatrix& a, std::span<const double> x) {
  if (x.size() != a.dim()) throw std::invalid_argument("matvec: length mismatch");
  std::vector<double> y(a.dim(), 0.0);
  const auto rp = a.row_ptr();
  const auto cols = a.cols();
  const auto vals = a.vals();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double acc = 0.0;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      acc += vals[k] * x[cols[k]];
    }
    y[i] = acc;
  }
  return y;
}

std::vector<double> matvec_transpose(const SparseMatrix& a, std::span<const double> x) {
  if (x.size() != a.dim()) throw std::invalid_argument("matvec_transpose: length mismatch");
  std::vector<double> y(a.dim(), 0.0);
  const auto rp = a.row_ptr();
  const auto cols = a.cols();
  const auto vals = a.vals();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      y[cols[k]] += vals[k] * xi;
    }
  }
  return y;
}

double sparsity(const SparseMatrix& a) {
  if (a.dim() == 0) return 0.0;
  return static_cast<double>(a.nnz()) /
         (static_cast<double>(a.dim()) * static_cast<double>(a.dim()));
}

std::uint64_t matmul_count() { return g_matmul_count.load(std::memory_order_relaxed); }

void reset_matmul_count() { g_matmul_count.store(0, std::memory_order_relaxed); }

}  // namespace psscf
