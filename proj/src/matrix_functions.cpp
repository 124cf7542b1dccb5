#include "psscf/matrix_functions.hpp"

namespace psscf {

CoefficientStream exp_stream() {
  return CoefficientStream(
      1.0,
      [](std::size_t i, long double prev) { return prev / static_cast<long double>(i); },
      "exp");
}

CoefficientStream cos_stream() {
  return CoefficientStream(
      1.0,
      [](std::size_t i, long double prev) {
        const auto j = static_cast<long double>(i - 1);  // a_i from a_{i-1}
        return -prev / ((2.0L * j + 1.0L) * (2.0L * j + 2.0L));
      },
      "cos in A^2");
}

FunctionSpec function_spec(FunctionKind kind) {
  if (kind == FunctionKind::exp) {
    return FunctionSpec{FunctionKind::exp, exp_stream(), ArgumentTransform::none};
  }
  return FunctionSpec{FunctionKind::cos, cos_stream(), ArgumentTransform::square};
}

EvalReport expm_filtered(const SparseMatrix& a, double eps_tol, const EngineOptions& options) {
  return evaluate_series(a, exp_stream(), eps_tol, options);
}

EvalReport cosm_filtered(const SparseMatrix& a, double eps_tol, const EngineOptions& options) {
  const SparseMatrix w = matmul(a, a);
  EvalReport report = evaluate_series(w, cos_stream(), eps_tol, options);
  report.plan.mult_count += 1;  // the exact W = A^2 product
  return report;
}

}  // namespace psscf
