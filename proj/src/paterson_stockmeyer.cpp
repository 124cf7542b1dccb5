#include "psscf/paterson_stockmeyer.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace psscf {

PSPlan plan(std::size_t term_count) {
  if (term_count == 0) throw std::invalid_argument("plan: N must be >= 1");
  PSPlan p;
  p.term_count = term_count;
  if (term_count <= 2) {
    p.block_size = 1;
    p.block_count = term_count;
    p.g = 0;
    p.mult_count = 0;
    return p;
  }
  const auto q = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(term_count - 1))));
  const std::size_t b = (term_count + q - 1) / q;
  p.block_size = q;
  p.block_count = b;
  p.g = (term_count - q * (b - 1) == 1) ? 1 : 0;
  p.mult_count = q + b - 2 - static_cast<std::size_t>(p.g);
  return p;
}

SparseMatrix eval_poly_ps(const SparseMatrix& z, std::span<const double> coeffs) {
  const std::size_t N = coeffs.size();
  if (N == 0) throw std::invalid_argument("eval_poly_ps: empty coefficients");
  const std::size_t n = z.dim();
  const PSPlan p = plan(N);
  const std::size_t q = p.block_size;
  const std::size_t b = p.block_count;

  // powers I, Z, ..., Z^q
  std::vector<SparseMatrix> powers;
  powers.reserve(q + 1);
  powers.push_back(SparseMatrix::identity(n));
  if (q >= 1 && N >= 2) powers.push_back(z);
  for (std::size_t i = 2; i <= q; ++i) powers.push_back(matmul(z, powers[i - 1]));

  auto block = [&](std::size_t i) {
    std::vector<double> c;
    std::vector<const SparseMatrix*> terms;
    for (std::size_t j = 0; j < q; ++j) {
      const std::size_t idx = i * q + j;
      if (idx >= N) break;
      c.push_back(coeffs[idx]);
      terms.push_back(&powers[std::min(j, powers.size() - 1)]);
    }
    return linear_combination(c, terms);
  };

  // last block is a lone scalar term iff N - q(b-1) == 1 (this also covers
  // N == 2, where the plan reports g == 0 but B_{b-1} = a_1 * I)
  const bool scalar_last = (N - q * (b - 1) == 1);
  SparseMatrix s = block(b - 1);
  for (std::size_t i = 1; i < b; ++i) {
    if (i == 1 && scalar_last) {
      s = add_scaled(block(b - 2), 1.0, powers[q], coeffs[(b - 1) * q]);
    } else {
      s = add_scaled(block(b - 1 - i), 1.0, matmul(powers[q], s), 1.0);
    }
  }
  return s;
}

SparseMatrix eval_poly_horner(const SparseMatrix& z, std::span<const double> coeffs) {
  const std::size_t N = coeffs.size();
  if (N == 0) throw std::invalid_argument("eval_poly_horner: empty coefficients");
  const std::size_t n = z.dim();
  const SparseMatrix eye = SparseMatrix::identity(n);
  if (N == 1) return add_scaled(eye, coeffs[0], SparseMatrix::zero(n), 0.0);
  // leading term is scalar * I, so the first step is a scaled add
  SparseMatrix acc = add_scaled(eye, coeffs[N - 2], z, coeffs[N - 1]);
  for (std::size_t idx = N - 2; idx-- > 0;) {
    acc = add_scaled(eye, coeffs[idx], matmul(z, acc), 1.0);
  }
  return acc;
}

}  // namespace psscf
