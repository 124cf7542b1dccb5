#include "psscf/harness.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "psscf/engine.hpp"
#include "psscf/paterson_stockmeyer.hpp"

namespace psscf {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform01() {  // in (0, 1]
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }
  // Box-Muller, hand-rolled so streams do not depend on the standard library
  double standard_normal() {
    while (true) {
      const double u1 = uniform01();
      const double u2 = uniform01();
      const double v = std::sqrt(-2.0 * std::log(u1)) *
                       std::cos(2.0 * std::numbers::pi * u2);
      if (v != 0.0) return v;
    }
  }

 private:
  std::uint64_t state_;
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  Rng rng(a ^ (b * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL));
  return rng.next();
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

SparseMatrix rescale(const SparseMatrix& a, double factor) {
  return add_scaled(a, factor, SparseMatrix::zero(a.dim()), 0.0);
}

// compensated dense product, row-major
DenseMatrix dense_matmul(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t n = a.n;
  DenseMatrix out{n, std::vector<double>(n * n, 0.0)};
  std::vector<double> comp(n, 0.0);
  std::vector<double> sum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(comp.begin(), comp.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double av = a.data[i * n + k];
      if (av == 0.0) continue;
      const double* brow = &b.data[k * n];
      for (std::size_t j = 0; j < n; ++j) {
        double p = av * brow[j];
        double pe = std::fma(av, brow[j], -p);
        double s = sum[j] + p;
        double bb = s - sum[j];
        double se = (sum[j] - (s - bb)) + (p - bb);
        sum[j] = s;
        comp[j] += se + pe;
      }
    }
    for (std::size_t j = 0; j < n; ++j) out.data[i * n + j] = sum[j] + comp[j];
  }
  return out;
}

}  // namespace

DenseMatrix dense_from_sparse(const SparseMatrix& a) {
  return DenseMatrix{a.dim(), a.to_dense()};
}

double dense_one_norm(const DenseMatrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.n; ++i) s += std::fabs(a.data[i * a.n + j]);
    best = std::max(best, s);
  }
  return best;
}

double diff_one_norm(const SparseMatrix& a, const DenseMatrix& b) {
  if (a.dim() != b.n) throw std::invalid_argument("diff_one_norm: dimension mismatch");
  std::vector<double> col_sums(b.n, 0.0);
  const std::vector<double> ad = a.to_dense();
  for (std::size_t i = 0; i < b.n; ++i) {
    for (std::size_t j = 0; j < b.n; ++j) {
      col_sums[j] += std::fabs(ad[i * b.n + j] - b.data[i * b.n + j]);
    }
  }
  double best = 0.0;
  for (double s : col_sums) best = std::max(best, s);
  return best;
}

SparseMatrix gen_banded(std::size_t n, std::size_t bandwidth, std::uint64_t seed) {
  if (bandwidth >= n) throw std::invalid_argument("gen_banded: bandwidth must be < n");
  Rng rng(seed);
  SparseBuilder builder(n, n * (2 * bandwidth + 1));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= bandwidth ? i - bandwidth : 0;
    const std::size_t hi = std::min(i + bandwidth, n - 1);
    for (std::size_t j = lo; j <= hi; ++j) {
      builder.push(j, rng.standard_normal());
    }
    builder.finish_row();
  }
  return builder.take();
}

SpectralRadiusEstimate spectral_radius(const SparseMatrix& b, double tol, int max_iterations,
                                       std::uint64_t seed) {
  const std::size_t n = b.dim();
  SpectralRadiusEstimate est;
  if (n == 0 || b.nnz() == 0) return est;

  auto iterate = [&](const SparseMatrix& m) -> std::pair<double, int> {
    Rng rng(seed);
    std::vector<double> x(n);
    double norm = 0.0;
    for (double& v : x) {
      v = 1.0 + 0.01 * rng.uniform01();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : x) v /= norm;
    double rho_prev = -1.0;
    for (int it = 1; it <= max_iterations; ++it) {
      std::vector<double> y = matvec(m, x);
      double ynorm = 0.0;
      for (double v : y) ynorm += v * v;
      ynorm = std::sqrt(ynorm);
      if (ynorm == 0.0) return {0.0, it};
      if (rho_prev >= 0.0 && std::fabs(ynorm - rho_prev) <= tol * ynorm) {
        return {ynorm, it};
      }
      rho_prev = ynorm;
      for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ynorm;
    }
    return {-1.0, max_iterations};
  };

  auto [rho, iters] = iterate(b);
  est.iterations = iters;
  if (rho >= 0.0) {
    est.value = rho;
    est.converged = true;
    return est;
  }
  // oscillation (sign-indefinite or complex dominant pair); rho(|B|) >= rho(B)
  SparseBuilder abs_builder(n, b.nnz());
  const auto rp = b.row_ptr();
  const auto cols = b.cols();
  const auto vals = b.vals();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      abs_builder.push(cols[k], std::fabs(vals[k]));
    }
    abs_builder.finish_row();
  }
  const SparseMatrix abs_b = abs_builder.take();
  auto [rho_abs, iters_abs] = iterate(abs_b);
  est.iterations += iters_abs;
  est.used_abs_surrogate = true;
  if (rho_abs >= 0.0) {
    est.value = rho_abs;
    est.converged = true;
  } else {
    est.value = one_norm(abs_b);  // last resort, still an upper bound
  }
  return est;
}

SparseMatrix graph_normalize(const SparseMatrix& b) {
  const SpectralRadiusEstimate est = spectral_radius(b);
  if (!(est.value > 0.0)) {
    throw std::invalid_argument(
        "graph_normalize: spectral radius estimate is zero (nilpotent or zero input)");
  }
  return add_scaled(SparseMatrix::identity(b.dim()), 1.0, b, -0.5 / est.value);
}

DenseMatrix dense_reference(const SparseMatrix& z, const FunctionSpec& function,
                            double eps_ref) {
  if (z.dim() > 2000) {
    throw std::invalid_argument("dense_reference: n > 2000 is not dense-feasible here");
  }
  if (!(eps_ref > 0.0)) throw std::invalid_argument("dense_reference: eps_ref must be positive");
  const SparseMatrix argument =
      function.transform == ArgumentTransform::square ? matmul(z, z) : z;
  const NormProfile profile = build_norm_profile(argument, 10);
  const ThetaResult theta = theta_truncation(eps_ref, function.stream, profile);
  const std::size_t n = argument.dim();
  const DenseMatrix w = dense_from_sparse(argument);
  DenseMatrix acc{n, std::vector<double>(n * n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    acc.data[i * n + i] = function.stream.at(theta.term_count - 1);
  }
  for (std::size_t idx = theta.term_count - 1; idx-- > 0;) {
    acc = dense_matmul(w, acc);
    const double c = function.stream.at(idx);
    for (std::size_t i = 0; i < n; ++i) acc.data[i * n + i] += c;
  }
  return acc;
}

namespace {

struct CaseResult {
  EvalReport psscf;
  SparseMatrix ps_result;
  double ps_seconds = 0.0;
  DenseMatrix reference;
  double reference_seconds = 0.0;
  std::size_t reference_terms = 0;
};

CaseResult run_case(const BenchConfig& config, const SparseMatrix& generated) {
  CaseResult result;
  SparseMatrix z = generated;
  if (config.scale_target) {
    const double norm = one_norm(z);
    if (norm > 0.0) z = rescale(z, *config.scale_target / norm);
  }

  if (config.function == BenchFunction::poly) {
    if (config.poly_coeffs.empty()) {
      throw std::invalid_argument("benchmark: poly function needs coefficients");
    }
    double t0 = now_seconds();
    result.psscf = evaluate_polynomial_filtered(z, config.poly_coeffs, config.eps_tol);
    result.psscf.elapsed_seconds = now_seconds() - t0;
    t0 = now_seconds();
    result.ps_result = eval_poly_ps(z, config.poly_coeffs);
    result.ps_seconds = now_seconds() - t0;
    t0 = now_seconds();
    const DenseMatrix dz = dense_from_sparse(z);
    DenseMatrix acc{z.dim(), std::vector<double>(z.dim() * z.dim(), 0.0)};
    for (std::size_t i = 0; i < z.dim(); ++i) {
      acc.data[i * z.dim() + i] = config.poly_coeffs.back();
    }
    for (std::size_t idx = config.poly_coeffs.size() - 1; idx-- > 0;) {
      acc = dense_matmul(dz, acc);
      for (std::size_t i = 0; i < z.dim(); ++i) {
        acc.data[i * z.dim() + i] += config.poly_coeffs[idx];
      }
    }
    result.reference = std::move(acc);
    result.reference_seconds = now_seconds() - t0;
    result.reference_terms = config.poly_coeffs.size();
    return result;
  }

  const FunctionSpec spec = function_spec(
      config.function == BenchFunction::exp ? FunctionKind::exp : FunctionKind::cos);
  double t0 = now_seconds();
  result.psscf = config.function == BenchFunction::exp
                     ? expm_filtered(z, config.eps_tol)
                     : cosm_filtered(z, config.eps_tol);
  result.psscf.elapsed_seconds = now_seconds() - t0;

  // unfiltered PS at the same truncation order
  const std::size_t n_terms = result.psscf.budget.term_count;
  std::vector<double> coeffs(n_terms);
  for (std::size_t i = 0; i < n_terms; ++i) coeffs[i] = spec.stream.at(i);
  t0 = now_seconds();
  const SparseMatrix argument =
      spec.transform == ArgumentTransform::square ? matmul(z, z) : z;
  result.ps_result = eval_poly_ps(argument, coeffs);
  result.ps_seconds = now_seconds() - t0;

  const double eps_ref = config.eps_tol / 100.0;
  t0 = now_seconds();
  result.reference = dense_reference(z, spec, eps_ref);
  result.reference_seconds = now_seconds() - t0;
  const NormProfile ref_profile = build_norm_profile(argument, 10);
  result.reference_terms = theta_truncation(eps_ref, spec.stream, ref_profile).term_count;
  return result;
}

}  // namespace

std::vector<BenchRow> run_benchmark(const BenchConfig& config) {
  if (config.trials_per_bandwidth < 1) {
    throw std::invalid_argument("benchmark: trials_per_bandwidth must be >= 1");
  }
  for (std::size_t size : config.sizes) {
    for (std::size_t bw : config.bandwidths) {
      if (bw >= size) throw std::invalid_argument("benchmark: bandwidth must be < size");
    }
  }
  const double eps_ref = config.eps_tol / 100.0;
  std::vector<BenchRow> rows;
  for (std::size_t size : config.sizes) {
    bool warmed_up = false;
    for (std::size_t bw : config.bandwidths) {
      for (std::size_t trial = 1; trial <= config.trials_per_bandwidth; ++trial) {
        const std::uint64_t seed =
            mix_seed(config.seed, (size << 40) ^ (bw << 20) ^ trial);
        BenchRow base;
        base.n = size;
        base.bandwidth = bw;
        base.trial = trial;
        try {
          const SparseMatrix generated = gen_banded(size, bw, seed);
          if (!warmed_up) {
            run_case(config, generated);
            warmed_up = true;
          }
          CaseResult r = run_case(config, generated);
          const double ref_norm = dense_one_norm(r.reference);

          BenchRow psscf_row = base;
          psscf_row.method = "PSSCF";
          psscf_row.time_seconds = r.psscf.elapsed_seconds;
          psscf_row.sparsity = sparsity(r.psscf.result);
          psscf_row.rel_error = diff_one_norm(r.psscf.result, r.reference) / ref_norm;
          psscf_row.certified_bound = r.psscf.certified_bound;
          psscf_row.term_count = r.psscf.budget.term_count;
          psscf_row.block_size = r.psscf.plan.block_size;
          psscf_row.block_count = r.psscf.plan.block_count;
          rows.push_back(psscf_row);

          BenchRow ps_row = base;
          ps_row.method = "PS";
          ps_row.time_seconds = r.ps_seconds;
          ps_row.sparsity = sparsity(r.ps_result);
          ps_row.rel_error = diff_one_norm(r.ps_result, r.reference) / ref_norm;
          ps_row.certified_bound = r.psscf.budget.tail;
          ps_row.term_count = r.psscf.budget.term_count;
          ps_row.block_size = r.psscf.plan.block_size;
          ps_row.block_count = r.psscf.plan.block_count;
          rows.push_back(ps_row);

          BenchRow ref_row = base;
          ref_row.method = "reference";
          ref_row.time_seconds = r.reference_seconds;
          std::size_t ref_nnz = 0;
          for (double v : r.reference.data) ref_nnz += v != 0.0 ? 1 : 0;
          ref_row.sparsity = static_cast<double>(ref_nnz) /
                             (static_cast<double>(size) * static_cast<double>(size));
          ref_row.rel_error = 0.0;
          ref_row.certified_bound = eps_ref;
          ref_row.term_count = r.reference_terms;
          rows.push_back(ref_row);
        } catch (const std::exception&) {
          BenchRow failed = base;
          failed.method = "PSSCF";
          failed.rel_error = std::numeric_limits<double>::quiet_NaN();
          failed.certified_bound = std::numeric_limits<double>::quiet_NaN();
          rows.push_back(failed);
        }
      }
    }
  }
  return rows;
}

}  // namespace psscf
