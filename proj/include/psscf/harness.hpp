#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psscf/matrix_functions.hpp"
#include "psscf/sparse_matrix.hpp"

namespace psscf {

/// Minimal dense square matrix for reference computations.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> data;  // row-major, n*n

  double at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

DenseMatrix dense_from_sparse(const SparseMatrix& a);
double dense_one_norm(const DenseMatrix& a);
/// ||A - B||_1 for a sparse A against a dense B.
double diff_one_norm(const SparseMatrix& a, const DenseMatrix& b);

/// Banded matrix with i.i.d. standard normal entries on diagonals
/// -bandwidth..+bandwidth, from a deterministic generator (identical output
/// across platforms for a given seed).
SparseMatrix gen_banded(std::size_t n, std::size_t bandwidth, std::uint64_t seed);

struct SpectralRadiusEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool used_abs_surrogate = false;  // estimated on |B| after non-convergence
};

/// Power-iteration estimate of the spectral radius (relative change below
/// `tol`, at most `max_iterations` steps, seeded start vector). Falls back to
/// |B|, whose radius dominates, when the iteration oscillates.
SpectralRadiusEstimate spectral_radius(const SparseMatrix& b, double tol = 1e-6,
                                       int max_iterations = 1000,
                                       std::uint64_t seed = 0x9e37ULL);

/// I - 0.5 * B / rho(B), the adjacency-matrix normalization of the test sets.
SparseMatrix graph_normalize(const SparseMatrix& b);

/// Dense Horner evaluation of the truncated series, order chosen by
/// theta_truncation at eps_ref. For a squared-argument function the exact
/// dense square is formed first. Refuses n > 2000.
DenseMatrix dense_reference(const SparseMatrix& z, const FunctionSpec& function,
                            double eps_ref);

enum class BenchFunction { exp, cos, poly };

struct BenchConfig {
  BenchFunction function = BenchFunction::exp;
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> bandwidths;
  std::size_t trials_per_bandwidth = 1;
  double eps_tol = 1e-14;
  std::uint64_t seed = 1;
  std::optional<double> scale_target;    // rescale ||Z||_1 to this value
  std::vector<double> poly_coeffs;       // BenchFunction::poly only
};

struct BenchRow {
  std::string method;  // "PSSCF", "PS" or "reference"
  std::size_t n = 0;
  std::size_t bandwidth = 0;
  std::size_t trial = 0;
  double time_seconds = 0.0;
  double sparsity = 0.0;
  double rel_error = 0.0;
  double certified_bound = 0.0;
  std::size_t term_count = 0;  // N
  std::size_t block_size = 0;  // q
  std::size_t block_count = 0; // b
};

/// Runs the sweep: per (size, bandwidth, trial) one PSSCF, one unfiltered PS
/// at the same truncation order and one dense reference row. Failed rows are
/// recorded with NaN errors and the sweep continues. One warm-up evaluation
/// per size is excluded from the timings.
std::vector<BenchRow> run_benchmark(const BenchConfig& config);

}  // namespace psscf
