#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "psscf/sparse_matrix.hpp"

namespace psscf {

/// Applies a linear operator to one vector in place of forming its matrix.
using ApplyFn = std::function<std::vector<double>(std::span<const double>)>;

inline constexpr std::uint64_t kDefaultEstimatorSeed = 0x5050ULL;

/// Block 1-norm estimate of the operator given by `apply` / `apply_transpose`
/// (Higham-Tisseur block algorithm: block width t, at most five iterations,
/// unit-vector refinement columns after the first pass). The estimate is a
/// realized ratio ||A x||_1 / ||x||_1 and therefore never exceeds the true
/// norm. `power` == 0 returns 1 without touching the oracle.
double estimate_power_one_norm(const ApplyFn& apply, const ApplyFn& apply_transpose,
                               std::size_t n, int power, int block_width = 2,
                               std::uint64_t seed = kDefaultEstimatorSeed);

/// Convenience overload: estimates ||Z^power||_1 through repeated sparse
/// matvecs, never forming the power.
double estimate_power_one_norm(const SparseMatrix& z, int power, int block_width = 2,
                               std::uint64_t seed = kDefaultEstimatorSeed);

/// alpha_K = max over k = ceil(K/2)..K of z_k^(1/k); K must be even and >= 2.
/// Guarantees ||Z^i|| <= alpha_K^i for all i >= ceil((K+1)/2) when the z_k
/// are upper bounds on ||Z^k||.
double lemma1_alpha(std::span<const double> z, int cutoff);

/// Upper-bound profile z_i for ||Z^i||_1: computed values up to the cutoff K
/// (default 10), geometric extrapolation alpha_K^i beyond.
class NormProfile {
 public:
  NormProfile(std::vector<double> z, double alpha);

  /// z_i; indices beyond the cutoff evaluate alpha^i.
  double at(std::size_t i) const;

  double alpha() const { return alpha_; }
  std::size_t cutoff() const { return z_.size() - 1; }
  std::span<const double> computed() const { return z_; }

 private:
  std::vector<double> z_;
  double alpha_;
};

struct NormProfileOptions {
  int cutoff = 10;                 // K of the extrapolation rule
  double norm_safety = 1.0;        // multiplies z_1..z_K
  int block_width = 2;             // estimator t
  std::uint64_t seed = kDefaultEstimatorSeed;
  std::size_t exact_dense_cap = 64;  // below this dimension use exact powers
};

/// Builds the profile: z_0 = 1, z_1..z_K estimated (or exact dense powers
/// for small matrices), alpha from lemma1_alpha. `i_max` is a usage hint;
/// the profile extends to any index via the alpha rule.
NormProfile build_norm_profile(const SparseMatrix& z, std::size_t i_max,
                               const NormProfileOptions& options = {});

}  // namespace psscf
