#pragma once

#include <vector>

#include "psscf/sparse_matrix.hpp"

namespace psscf {

/// Result of one adaptive filtering run.
struct FilterOutcome {
  SparseMatrix kept;             // input minus the dropped entries
  double dropped_norm = 0.0;     // ||input - kept||_1, <= eps_g * (1 + e_r)
  std::vector<double> thresholds;  // filtering thresholds per pass, strictly decreasing
  int iterations = 0;
  std::size_t dropped_nnz = 0;
};

/// Adaptively drops near-zero entries of C so that the dropped part has
/// 1-norm at most eps_g * (1 + e_r).
///
/// The residue starts as all of C with scalar norm c = ||C||_1; while the
/// residue norm exceeds the budget, entries above the current threshold
/// eps_g / m are restored to the kept part, the norm is recomputed from the
/// remaining residue, and m becomes c / threshold. Thresholds shrink by more
/// than (1 + e_r) per pass, so the loop terminates.
FilterOutcome adaptive_filter(const SparseMatrix& c, double eps_g, double e_r);

}  // namespace psscf
