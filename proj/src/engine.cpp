#include "psscf/engine.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace psscf {

namespace {

constexpr std::size_t kMaxThetaTerms = 1'000'000;

double default_eval_elapsed(std::chrono::steady_clock::time_point start) {
  const auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(end - start).count();
}

}  // namespace

CoefficientStream::CoefficientStream(double first, Rule rule, std::string description)
    : cache_{static_cast<long double>(first)},
      rule_(std::move(rule)),
      description_(std::move(description)) {}

CoefficientStream CoefficientStream::from_coefficients(std::vector<double> coeffs,
                                                       std::string description) {
  const double first = coeffs.empty() ? 0.0 : coeffs[0];
  auto rule = [values = std::move(coeffs)](std::size_t i, long double) -> long double {
    return i < values.size() ? static_cast<long double>(values[i]) : 0.0L;
  };
  return CoefficientStream(first, std::move(rule), std::move(description));
}

double CoefficientStream::at(std::size_t i) const {
  while (cache_.size() <= i) {
    cache_.push_back(rule_(cache_.size(), cache_.back()));
  }
  return static_cast<double>(cache_[i]);
}

ThetaResult theta_truncation(double eps_tol, const CoefficientStream& coeffs,
                             const NormProfile& z) {
  if (!(eps_tol > 0.0)) throw std::invalid_argument("theta_truncation: eps_tol must be positive");
  std::vector<long double> terms;
  long double acc = 0.0L;
  int quiet_terms = 0;
  while (quiet_terms < 8) {
    if (terms.size() >= kMaxThetaTerms) {
      throw std::runtime_error("theta_truncation: series does not converge for this norm profile");
    }
    const std::size_t i = terms.size();
    const long double term =
        std::fabs(static_cast<long double>(coeffs.at(i))) * static_cast<long double>(z.at(i));
    terms.push_back(term);
    acc += term;
    if (std::isfinite(static_cast<double>(acc)) &&
        term < std::ldexp(static_cast<double>(acc) + eps_tol, -52)) {
      ++quiet_terms;
    } else {
      quiet_terms = 0;
    }
  }
  std::vector<long double> suffix(terms.size() + 1, 0.0L);
  for (std::size_t m = terms.size(); m-- > 0;) {
    suffix[m] = terms[m] + suffix[m + 1];
  }
  const long double target = 0.5L * static_cast<long double>(eps_tol);
  std::size_t n = terms.size();
  for (std::size_t m = 0; m <= terms.size(); ++m) {
    if (suffix[m] <= target) {
      n = m;
      break;
    }
  }
  if (suffix[n] > target) {
    throw std::runtime_error("theta_truncation: tail never reaches 0.5 * eps_tol");
  }
  n = std::max<std::size_t>(n, 1);
  return ThetaResult{n, static_cast<double>(suffix[n])};
}

double beta_bound(const CoefficientStream& coeffs, const NormProfile& z,
                  std::size_t q, std::size_t term_count, std::size_t i, std::size_t j) {
  if (j >= q) return 0.0;
  double sum = 0.0;
  for (std::size_t k = j; k < q; ++k) {
    const std::size_t idx = i * q + k;
    if (idx >= term_count) break;
    sum += std::fabs(coeffs.at(idx)) * z.at(k - j);
  }
  return sum;
}

BlockBounds bound_blocks_and_partials(const CoefficientStream& coeffs, const NormProfile& z,
                                      const PSPlan& plan) {
  const std::size_t q = plan.block_size;
  const std::size_t b = plan.block_count;
  BlockBounds bounds;
  bounds.block.resize(b, 0.0);
  for (std::size_t i = 0; i < b; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
      const std::size_t idx = i * q + j;
      if (idx >= plan.term_count) break;
      sum += std::fabs(coeffs.at(idx)) * z.at(j);
    }
    bounds.block[i] = sum;
  }
  bounds.partial.resize(b, 0.0);
  bounds.partial[0] = bounds.block[b - 1];
  for (std::size_t i = 1; i < b; ++i) {
    bounds.partial[i] = bounds.block[b - 1 - i] + z.at(q) * bounds.partial[i - 1];
  }
  return bounds;
}

double compute_dk(std::size_t k, const CoefficientStream& coeffs, const NormProfile& z,
                  const PSPlan& plan, std::span<const double> partial_bounds) {
  const std::size_t q = plan.block_size;
  const std::size_t b = plan.block_count;
  if (k < 2 || k > q) throw std::invalid_argument("compute_dk: k must lie in [2, q]");
  double sum = 0.0;
  for (std::size_t j = 0; j < b; ++j) {
    const double beta_term =
        k < q ? beta_bound(coeffs, z, q, plan.term_count, b - 1 - j, k) : 0.0;
    const double partial_prev = j >= 1 ? partial_bounds[j - 1] : 0.0;
    sum += z.at(q * (b - 1 - j)) * (beta_term + z.at(q - k) * partial_prev);
  }
  return sum;
}

FntSchedule fnt_schedule(EvalMode mode, double eps, double tail, std::span<const double> d,
                         const NormProfile& z, const PSPlan& plan) {
  const std::size_t q = plan.block_size;
  const std::size_t b = plan.block_count;
  const auto g = static_cast<std::size_t>(plan.g);
  const std::size_t steps = plan.mult_count;
  if (steps == 0) throw std::invalid_argument("fnt_schedule: plan has no filtered steps");
  const double budget = mode == EvalMode::series ? eps - tail : eps;
  if (!(budget > 0.0)) throw std::invalid_argument("fnt_schedule: nonpositive filtering budget");
  if (d.size() + 1 != q && !(q == 1 && d.empty())) {
    throw std::invalid_argument("fnt_schedule: need d_k for k = 2..q");
  }
  FntSchedule schedule;
  const double share = budget / static_cast<double>(steps);
  schedule.zeta.reserve(d.size());
  for (double dk : d) {
    schedule.zeta.push_back(dk > 0.0 ? share / dk : std::numeric_limits<double>::infinity());
  }
  // Filtered Qin step j (j = 1..b-1-g) runs after the g multiplication-free
  // steps; its drop passes through b-1-g-j further products of Z^q, so that
  // power's norm is the propagation weight.
  for (std::size_t j = 1; j + g <= b - 1; ++j) {
    const double weight = z.at(q * (b - 1 - g - j));
    schedule.sigma_weight.push_back(weight);
    schedule.sigma.push_back(weight > 0.0 ? share / weight
                                          : std::numeric_limits<double>::infinity());
  }
  return schedule;
}

namespace {

// Shared filtered-PS pipeline; `coefficient(idx)` must be zero at and beyond
// term_count.
EvalReport run_filtered_pipeline(const SparseMatrix& z_mat, const CoefficientStream& coeffs,
                                 double eps_tol, const ThetaResult& theta, EvalMode mode,
                                 const EngineOptions& options, const NormProfile* profile) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = z_mat.dim();
  const std::size_t N = theta.term_count;
  EvalReport report;
  report.plan = plan(N);
  report.budget.eps_tol = eps_tol;
  report.budget.term_count = N;
  report.budget.tail = theta.tail;
  report.budget.filter_budget =
      mode == EvalMode::series ? eps_tol - theta.tail : eps_tol;
  report.budget.steps = report.plan.mult_count;

  auto coefficient = [&](std::size_t idx) { return idx < N ? coeffs.at(idx) : 0.0; };

  if (report.budget.steps == 0) {
    // N <= 2: the polynomial is a scaled add, exact, nothing to filter
    SparseMatrix result = add_scaled(SparseMatrix::identity(n), coefficient(0),
                                     z_mat, N >= 2 ? coefficient(1) : 0.0);
    report.result = std::move(result);
    report.certified_bound = theta.tail;
    report.nnz_history.push_back(report.result.nnz());
    report.elapsed_seconds = default_eval_elapsed(start);
    return report;
  }

  const std::size_t q = report.plan.block_size;
  const std::size_t b = report.plan.block_count;
  const auto g = static_cast<std::size_t>(report.plan.g);

  BlockBounds bounds = bound_blocks_and_partials(coeffs, *profile, report.plan);
  for (std::size_t k = 2; k <= q; ++k) {
    report.budget.d.push_back(compute_dk(k, coeffs, *profile, report.plan, bounds.partial));
  }
  report.budget.beta.resize(b);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 2; j < q; ++j) {
      report.budget.beta[i].push_back(beta_bound(coeffs, *profile, q, N, i, j));
    }
  }
  FntSchedule schedule =
      fnt_schedule(mode, eps_tol, theta.tail, report.budget.d, *profile, report.plan);
  report.budget.zeta_fnt = schedule.zeta;
  report.budget.sigma_fnt = schedule.sigma;

  double largest_finite_fnt = 0.0;
  for (double v : schedule.zeta) {
    if (std::isfinite(v)) largest_finite_fnt = std::max(largest_finite_fnt, v);
  }
  for (double v : schedule.sigma) {
    if (std::isfinite(v)) largest_finite_fnt = std::max(largest_finite_fnt, v);
  }
  if (largest_finite_fnt == 0.0) {
    largest_finite_fnt = std::numeric_limits<double>::infinity();
  }
  const double e_r = options.filter_slack;
  auto filter_at = [&](const SparseMatrix& m, double fnt) {
    const double effective = std::isfinite(fnt) ? fnt : largest_finite_fnt;
    return adaptive_filter(m, effective / (1.0 + e_r), e_r);
  };

  // powers I, Z, then filtered products Z * Zhat_(k-1)
  std::vector<SparseMatrix> powers;
  powers.reserve(q + 1);
  powers.push_back(SparseMatrix::identity(n));
  powers.push_back(z_mat);
  report.nnz_history.push_back(z_mat.nnz());
  for (std::size_t k = 2; k <= q; ++k) {
    SparseMatrix product = matmul(z_mat, powers[k - 1]);
    FilterOutcome outcome = filter_at(product, schedule.zeta[k - 2]);
    report.zeta_dropped.push_back(outcome.dropped_norm);
    report.nnz_history.push_back(outcome.kept.nnz());
    powers.push_back(std::move(outcome.kept));
  }

  auto block = [&](std::size_t i) {
    std::vector<double> c;
    std::vector<const SparseMatrix*> terms;
    for (std::size_t j = 0; j < q; ++j) {
      const std::size_t idx = i * q + j;
      if (idx >= N) break;
      c.push_back(coefficient(idx));
      terms.push_back(&powers[j]);
    }
    return linear_combination(c, terms);
  };

  SparseMatrix s = block(b - 1);
  for (std::size_t i = 1; i < b; ++i) {
    if (i == 1 && g == 1) {
      // lone scalar last block: a scaled add, no product, no filtering
      s = add_scaled(block(b - 2), 1.0, powers[q], coefficient((b - 1) * q));
      report.nnz_history.push_back(s.nnz());
      continue;
    }
    SparseMatrix raw = add_scaled(block(b - 1 - i), 1.0, matmul(powers[q], s), 1.0);
    const std::size_t j = i - g;  // sigma index, 1-based
    FilterOutcome outcome = filter_at(raw, schedule.sigma[j - 1]);
    report.sigma_dropped.push_back(outcome.dropped_norm);
    report.nnz_history.push_back(outcome.kept.nnz());
    s = std::move(outcome.kept);
  }
  report.result = std::move(s);
  report.budget.sigma_weight = std::move(schedule.sigma_weight);
  report.certified_bound = certified_bound(report);
  report.elapsed_seconds = default_eval_elapsed(start);
  return report;
}

}  // namespace

EvalReport evaluate_series(const SparseMatrix& z, const CoefficientStream& coeffs,
                           double eps_tol, const EngineOptions& options) {
  if (!(eps_tol > 0.0)) throw std::invalid_argument("evaluate_series: eps_tol must be positive");
  const NormProfile profile = build_norm_profile(
      z, static_cast<std::size_t>(options.profile.cutoff), options.profile);
  const ThetaResult theta = theta_truncation(eps_tol, coeffs, profile);
  return run_filtered_pipeline(z, coeffs, eps_tol, theta, EvalMode::series, options, &profile);
}

EvalReport evaluate_polynomial_filtered(const SparseMatrix& z, std::span<const double> coeffs,
                                        double eps, const EngineOptions& options) {
  if (coeffs.empty()) {
    throw std::invalid_argument("evaluate_polynomial_filtered: empty coefficients");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("evaluate_polynomial_filtered: eps must be positive");
  const CoefficientStream stream =
      CoefficientStream::from_coefficients({coeffs.begin(), coeffs.end()});
  const ThetaResult theta{coeffs.size(), 0.0};
  if (plan(coeffs.size()).mult_count == 0) {
    return run_filtered_pipeline(z, stream, eps, theta, EvalMode::polynomial, options, nullptr);
  }
  const NormProfile profile = build_norm_profile(
      z, static_cast<std::size_t>(options.profile.cutoff), options.profile);
  return run_filtered_pipeline(z, stream, eps, theta, EvalMode::polynomial, options, &profile);
}

double certified_bound(const EvalReport& report) {
  double bound = report.budget.tail;
  for (std::size_t k = 0; k < report.zeta_dropped.size(); ++k) {
    if (report.budget.d[k] > 0.0) bound += report.budget.d[k] * report.zeta_dropped[k];
  }
  for (std::size_t j = 0; j < report.sigma_dropped.size(); ++j) {
    if (report.budget.sigma_weight[j] > 0.0) {
      bound += report.budget.sigma_weight[j] * report.sigma_dropped[j];
    }
  }
  return bound;
}

}  // namespace psscf
