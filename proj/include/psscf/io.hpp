#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "psscf/harness.hpp"
#include "psscf/sparse_matrix.hpp"

namespace psscf {

/// Parses a Matrix Market "coordinate real general|symmetric" file.
/// Symmetric inputs are expanded to full storage, 1-based indices converted,
/// duplicates summed. Malformed input raises with the offending line number.
SparseMatrix read_matrix_market(const std::filesystem::path& path);

/// Writes coordinate real general, entries sorted by (row, col), values with
/// 17 significant digits so a write-read round trip is bit exact.
void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path);

/// CSV with the fixed header
/// method,n,bandwidth,trial,time_seconds,sparsity,rel_error,certified_bound,N,q,b
void write_bench_csv(std::span<const BenchRow> rows, const std::filesystem::path& path);

/// One real per line, a_0 first; blank lines and '#' comments skipped.
std::vector<double> read_coefficients(const std::filesystem::path& path);

/// Flat key=value benchmark configuration. Keys: function, sizes, bandwidths,
/// trials_per_bandwidth, eps_tol, seed, scale_target, coeffs_file.
BenchConfig parse_bench_config(const std::filesystem::path& path);

}  // namespace psscf
