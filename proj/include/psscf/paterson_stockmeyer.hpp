#pragma once

#include <cstddef>
#include <span>

#include "psscf/sparse_matrix.hpp"

namespace psscf {

/// Blocking parameters for evaluating an N-term polynomial (degree N-1).
struct PSPlan {
  std::size_t term_count = 0;  // N
  std::size_t block_size = 1;  // q
  std::size_t block_count = 0; // b
  int g = 0;                   // 1 when the last block is a lone scalar term
  std::size_t mult_count = 0;  // matrix multiplications needed
};

/// q = floor(sqrt(N-1)), b = ceil(N/q), g = [N - q(b-1) == 1],
/// mult_count = q + b - 2 - g (zero for N <= 2).
PSPlan plan(std::size_t term_count);

/// Paterson-Stockmeyer evaluation of sum_{i<N} coeffs[i] * Z^i: powers
/// Z^2..Z^q, blocks B_i, then the Qin recursion over blocks. When the last
/// block is a lone scalar the first recursion step is a scaled add, not a
/// product, so exactly plan().mult_count multiplications are performed.
SparseMatrix eval_poly_ps(const SparseMatrix& z, std::span<const double> coeffs);

/// Right-to-left Horner evaluation; reference path and the choice for tiny N.
SparseMatrix eval_poly_horner(const SparseMatrix& z, std::span<const double> coeffs);

}  // namespace psscf
