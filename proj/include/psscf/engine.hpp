#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "psscf/filtering.hpp"
#include "psscf/norm_profile.hpp"
#include "psscf/paterson_stockmeyer.hpp"
#include "psscf/sparse_matrix.hpp"

namespace psscf {

/// Coefficients a_0, a_1, ... of a power series, produced by a recurrence
/// a_i = rule(i, a_{i-1}) and memoized. Values are computed in extended
/// precision internally so each a_i is within one rounding of the exact
/// coefficient for the standard recurrences.
class CoefficientStream {
 public:
  using Rule = std::function<long double(std::size_t i, long double prev)>;

  CoefficientStream(double first, Rule rule, std::string description);

  /// Finite coefficient list; indices past the end read as zero.
  static CoefficientStream from_coefficients(std::vector<double> coeffs,
                                             std::string description = "polynomial");

  double at(std::size_t i) const;
  const std::string& description() const { return description_; }

 private:
  mutable std::vector<long double> cache_;
  Rule rule_;
  std::string description_;
};

enum class EvalMode { polynomial, series };

/// Per-step filtering-norm-thresholds and the quantities they derive from.
struct ErrorBudget {
  double eps_tol = 0.0;
  std::size_t term_count = 0;      // N
  double tail = 0.0;               // sum_{i>=N} |a_i| z_i (0 in polynomial mode)
  double filter_budget = 0.0;      // eps_tol - tail, or eps in polynomial mode
  std::size_t steps = 0;           // q + b - 2 - g
  std::vector<double> zeta_fnt;    // power-step FNTs, k = 2..q (index k-2)
  std::vector<double> sigma_fnt;   // Qin-step FNTs, j = 1..b-1-g (index j-1)
  std::vector<double> d;           // d_k, k = 2..q (index k-2)
  std::vector<double> sigma_weight;  // propagation weight per Qin FNT
  std::vector<std::vector<double>> beta;  // beta[i][j-2], i = 0..b-1, j = 2..q-1
};

/// Evaluation result with the diagnostics needed to audit the error budget.
struct EvalReport {
  SparseMatrix result;
  PSPlan plan;
  ErrorBudget budget;
  double certified_bound = 0.0;       // realized right side of the error bound
  std::vector<double> zeta_dropped;   // realized ||zeta_k||_1, k = 2..q
  std::vector<double> sigma_dropped;  // realized ||Sigma_j||_1, j = 1..b-1-g
  std::vector<std::size_t> nnz_history;
  double elapsed_seconds = 0.0;
};

struct EngineOptions {
  double filter_slack = 0.1;  // e_r passed to adaptive_filter
  NormProfileOptions profile;
};

struct ThetaResult {
  std::size_t term_count = 0;
  double tail = 0.0;
};

/// Minimal N with sum_{i>=N} |a_i| z_i <= 0.5 * eps_tol, plus that tail.
/// Throws if the series shows no sign of convergence within 10^6 terms.
ThetaResult theta_truncation(double eps_tol, const CoefficientStream& coeffs,
                             const NormProfile& z);

/// beta_{i,j} = sum_{k=j}^{q-1} |a_{iq+k}| z_{k-j}; zero when j >= q.
/// Coefficients at or beyond N are treated as zero.
double beta_bound(const CoefficientStream& coeffs, const NormProfile& z,
                  std::size_t q, std::size_t term_count, std::size_t i, std::size_t j);

/// Norm bounds on the blocks (Bbar_i) and on the Qin partial sums (Sbar_i).
struct BlockBounds {
  std::vector<double> block;    // Bbar_i, i = 0..b-1
  std::vector<double> partial;  // Sbar_i, i = 0..b-1
};
BlockBounds bound_blocks_and_partials(const CoefficientStream& coeffs, const NormProfile& z,
                                      const PSPlan& plan);

/// d_k = sum_{j=0}^{b-1} z_{q(b-1-j)} (beta_{b-1-j,k} + z_{q-k} Sbar_{j-1}),
/// with Sbar_{-1} = beta_{.,q} = 0.
double compute_dk(std::size_t k, const CoefficientStream& coeffs, const NormProfile& z,
                  const PSPlan& plan, std::span<const double> partial_bounds);

/// Equal-influence FNT schedule: each of the q+b-2-g filtered steps gets the
/// same share of the filtering budget. A zero weight makes the corresponding
/// FNT infinite (that step's error cannot reach the result).
struct FntSchedule {
  std::vector<double> zeta;          // k = 2..q
  std::vector<double> sigma;         // j = 1..b-1-g
  std::vector<double> sigma_weight;  // norm weight each sigma FNT divides
};
FntSchedule fnt_schedule(EvalMode mode, double eps, double tail, std::span<const double> d,
                         const NormProfile& z, const PSPlan& plan);

/// Evaluates sum a_i Z^i to within eps_tol in the 1-norm: truncation order
/// from theta_truncation, then the Paterson-Stockmeyer recursion with every
/// product followed by adaptive filtering at its FNT.
EvalReport evaluate_series(const SparseMatrix& z, const CoefficientStream& coeffs,
                           double eps_tol, const EngineOptions& options = {});

/// Same pipeline for a fixed N-term polynomial: no truncation step, the whole
/// eps is filtering budget.
EvalReport evaluate_polynomial_filtered(const SparseMatrix& z, std::span<const double> coeffs,
                                        double eps, const EngineOptions& options = {});

/// Recomputes the certified bound from the realized dropped norms recorded in
/// the report: sum d_k ||zeta_k|| + sum w_j ||Sigma_j|| (+ tail in series mode).
double certified_bound(const EvalReport& report);

}  // namespace psscf
