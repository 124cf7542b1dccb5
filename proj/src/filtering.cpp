#include "psscf/filtering.hpp"

#include <cmath>
#include <stdexcept>

namespace psscf {

FilterOutcome adaptive_filter(const SparseMatrix& c, double eps_g, double e_r) {
  if (!(eps_g > 0.0)) throw std::invalid_argument("adaptive_filter: eps_g must be positive");
  if (!(e_r > 0.0)) throw std::invalid_argument("adaptive_filter: e_r must be positive");

  const std::size_t n = c.dim();
  const auto cols = c.cols();
  const auto vals = c.vals();

  // residue membership per stored entry; starts as the whole matrix
  std::vector<char> in_residue(c.nnz(), 1);
  std::vector<double> col_sums(n, 0.0);
  for (std::size_t k = 0; k < vals.size(); ++k) col_sums[cols[k]] += std::fabs(vals[k]);

  auto residue_norm = [&]() {
    double best = 0.0;
    for (double s : col_sums) best = std::max(best, s);
    return best;
  };

  FilterOutcome out;
  double norm = residue_norm();
  double m = 1.0;
  const double budget = eps_g * (1.0 + e_r);
  while (norm > budget) {
    const double threshold = eps_g / m;
    out.thresholds.push_back(threshold);
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (in_residue[k] && std::fabs(vals[k]) > threshold) in_residue[k] = 0;
    }
    // exact column sums of the surviving residue, not an estimate
    std::fill(col_sums.begin(), col_sums.end(), 0.0);
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (in_residue[k]) col_sums[cols[k]] += std::fabs(vals[k]);
    }
    norm = residue_norm();
    m = norm / threshold;
    ++out.iterations;
  }

  SparseBuilder builder(n, c.nnz());
  const auto rp = c.row_ptr();
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      if (in_residue[k]) {
        ++dropped;
      } else {
        builder.push(cols[k], vals[k]);
      }
    }
    builder.finish_row();
  }
  out.kept = builder.take();
  out.dropped_norm = norm;
  out.dropped_nnz = dropped;
  return out;
}

}  // namespace psscf
