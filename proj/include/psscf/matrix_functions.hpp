#pragma once

#include "psscf/engine.hpp"
#include "psscf/sparse_matrix.hpp"

namespace psscf {

/// Taylor coefficients of e^x: a_0 = 1, a_{i+1} = a_i / (i+1).
CoefficientStream exp_stream();

/// Coefficients of cos in W = A^2: a_0 = 1, a_{j+1} = -a_j / ((2j+1)(2j+2)).
CoefficientStream cos_stream();

enum class FunctionKind { exp, cos };
enum class ArgumentTransform { none, square };

/// Which series to run and how the argument feeds it.
struct FunctionSpec {
  FunctionKind kind = FunctionKind::exp;
  CoefficientStream stream = exp_stream();
  ArgumentTransform transform = ArgumentTransform::none;
};

FunctionSpec function_spec(FunctionKind kind);

/// e^A to within eps_tol in the 1-norm.
EvalReport expm_filtered(const SparseMatrix& a, double eps_tol,
                         const EngineOptions& options = {});

/// cos A to within eps_tol in the 1-norm. Evaluated as a series in W = A^2;
/// the W product is exact (unfiltered) and counted in the report's plan.
EvalReport cosm_filtered(const SparseMatrix& a, double eps_tol,
                         const EngineOptions& options = {});

}  // namespace psscf
