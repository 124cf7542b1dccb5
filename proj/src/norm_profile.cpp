#include "psscf/norm_profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psscf {

namespace {

// splitmix64; chosen over std::mt19937 so streams are identical across
// standard libraries.
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
  double sign() { return (next() >> 63) ? 1.0 : -1.0; }

 private:
  std::uint64_t state_;
};

using Matrix = std::vector<std::vector<double>>;  // column-major: t columns of length n

double column_one_norm(std::span<const double> col) {
  double s = 0.0;
  for (double v : col) s += std::fabs(v);
  return s;
}

bool columns_parallel(std::span<const double> a, std::span<const double> b) {
  // sign columns: parallel iff the dot product has absolute value n
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::fabs(dot) == static_cast<double>(a.size());
}

}  // namespace

double estimate_power_one_norm(const ApplyFn& apply, const ApplyFn& apply_transpose,
                               std::size_t n, int power, int block_width,
                               std::uint64_t seed) {
  if (block_width < 1) throw std::invalid_argument("estimate_power_one_norm: t must be >= 1");
  if (power < 0) throw std::invalid_argument("estimate_power_one_norm: negative power");
  if (power == 0) return 1.0;
  if (n == 0) return 0.0;

  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(block_width), n);
  Rng rng(seed);

  Matrix x(t, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) x[0][i] = 1.0 / static_cast<double>(n);
  for (std::size_t j = 1; j < t; ++j) {
    for (std::size_t i = 0; i < n; ++i) x[j][i] = rng.sign() / static_cast<double>(n);
  }

  constexpr int kMaxIterations = 5;
  double est = 0.0;
  double est_old = 0.0;
  std::size_t best_index = 0;
  std::vector<char> index_used(n, 0);
  Matrix signs_old(t, std::vector<double>(n, 0.0));
  std::vector<std::size_t> column_source(t, 0);  // unit-vector index per column, from pass 2

  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    Matrix y(t);
    for (std::size_t j = 0; j < t; ++j) y[j] = apply(x[j]);

    std::size_t jbest = 0;
    double norm_best = -1.0;
    for (std::size_t j = 0; j < t; ++j) {
      const double nj = column_one_norm(y[j]);
      if (nj > norm_best) {
        norm_best = nj;
        jbest = j;
      }
    }
    if (norm_best > est) {
      est = norm_best;
      best_index = iter > 1 ? column_source[jbest] : jbest;
    }
    if (iter >= 2 && norm_best <= est_old) break;
    est_old = est;

    Matrix signs(t, std::vector<double>(n));
    for (std::size_t j = 0; j < t; ++j) {
      for (std::size_t i = 0; i < n; ++i) signs[j][i] = y[j][i] >= 0.0 ? 1.0 : -1.0;
    }
    if (t > 1) {
      bool all_parallel = true;
      for (std::size_t j = 0; j < t && all_parallel; ++j) {
        bool found = false;
        for (std::size_t jo = 0; jo < t && !found; ++jo) {
          found = columns_parallel(signs[j], signs_old[jo]);
        }
        all_parallel = found;
      }
      if (iter >= 2 && all_parallel) break;
      // repeated sign patterns carry no new information; replace them
      for (std::size_t j = 0; j < t; ++j) {
        bool parallel = false;
        for (std::size_t jo = 0; jo < j && !parallel; ++jo) {
          parallel = columns_parallel(signs[j], signs[jo]);
        }
        for (std::size_t jo = 0; jo < t && !parallel; ++jo) {
          parallel = columns_parallel(signs[j], signs_old[jo]);
        }
        if (parallel) {
          for (std::size_t i = 0; i < n; ++i) signs[j][i] = rng.sign();
        }
      }
    }
    signs_old = signs;

    Matrix zt(t);
    for (std::size_t j = 0; j < t; ++j) zt[j] = apply_transpose(signs[j]);
    std::vector<double> h(n, 0.0);
    for (std::size_t j = 0; j < t; ++j) {
      for (std::size_t i = 0; i < n; ++i) h[i] = std::max(h[i], std::fabs(zt[j][i]));
    }
    if (iter >= 2) {
      double hmax = 0.0;
      for (double v : h) hmax = std::max(hmax, v);
      if (hmax == h[best_index]) break;
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&h](std::size_t a, std::size_t b) { return h[a] > h[b]; });
    std::vector<std::size_t> picks;
    for (std::size_t i : order) {
      if (!index_used[i]) picks.push_back(i);
      if (picks.size() == t) break;
    }
    if (picks.empty()) break;
    for (std::size_t j = 0; j < t; ++j) {
      std::fill(x[j].begin(), x[j].end(), 0.0);
      if (j < picks.size()) {
        x[j][picks[j]] = 1.0;
        column_source[j] = picks[j];
        index_used[picks[j]] = 1;
      } else {
        for (std::size_t i = 0; i < n; ++i) x[j][i] = rng.sign() / static_cast<double>(n);
        column_source[j] = 0;
      }
    }
  }
  return est;
}

double estimate_power_one_norm(const SparseMatrix& z, int power, int block_width,
                               std::uint64_t seed) {
  ApplyFn fwd = [&z, power](std::span<const double> v) {
    std::vector<double> y(v.begin(), v.end());
    for (int p = 0; p < power; ++p) y = matvec(z, y);
    return y;
  };
  ApplyFn bwd = [&z, power](std::span<const double> v) {
    std::vector<double> y(v.begin(), v.end());
    for (int p = 0; p < power; ++p) y = matvec_transpose(z, y);
    return y;
  };
  return estimate_power_one_norm(fwd, bwd, z.dim(), power, block_width, seed);
}

double lemma1_alpha(std::span<const double> z, int cutoff) {
  if (cutoff < 2 || cutoff % 2 != 0) {
    throw std::invalid_argument("lemma1_alpha: K must be even and >= 2");
  }
  if (z.size() < static_cast<std::size_t>(cutoff) + 1) {
    throw std::invalid_argument("lemma1_alpha: need z_0..z_K");
  }
  double alpha = 0.0;
  for (int k = (cutoff + 1) / 2; k <= cutoff; ++k) {
    if (z[static_cast<std::size_t>(k)] < 0.0) {
      throw std::invalid_argument("lemma1_alpha: negative norm bound");
    }
    alpha = std::max(alpha, std::pow(z[static_cast<std::size_t>(k)], 1.0 / k));
  }
  return alpha;
}

NormProfile::NormProfile(std::vector<double> z, double alpha)
    : z_(std::move(z)), alpha_(alpha) {
  if (z_.empty()) throw std::invalid_argument("NormProfile: empty profile");
}

double NormProfile::at(std::size_t i) const {
  if (i < z_.size()) return z_[i];
  return std::pow(alpha_, static_cast<double>(i));
}

NormProfile build_norm_profile(const SparseMatrix& z, std::size_t i_max,
                               const NormProfileOptions& options) {
  if (i_max < 1) throw std::invalid_argument("build_norm_profile: i_max must be >= 1");
  const int cutoff = options.cutoff;
  const std::size_t n = z.dim();
  std::vector<double> profile(static_cast<std::size_t>(cutoff) + 1, 0.0);
  profile[0] = 1.0;
  if (n <= options.exact_dense_cap) {
    // exact 1-norms of dense powers; estimator noise is not worth it here
    std::vector<double> power = SparseMatrix::identity(n).to_dense();
    const std::vector<double> base = z.to_dense();
    std::vector<double> next(n * n);
    for (int i = 1; i <= cutoff; ++i) {
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
          double acc = 0.0;
          for (std::size_t k = 0; k < n; ++k) acc += power[r * n + k] * base[k * n + c];
          next[r * n + c] = acc;
        }
      }
      power.swap(next);
      double norm = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += std::fabs(power[r * n + c]);
        norm = std::max(norm, s);
      }
      profile[static_cast<std::size_t>(i)] = norm;
    }
  } else {
    for (int i = 1; i <= cutoff; ++i) {
      profile[static_cast<std::size_t>(i)] = estimate_power_one_norm(
          z, i, options.block_width, options.seed + static_cast<std::uint64_t>(i));
    }
  }
  if (options.norm_safety != 1.0) {
    for (int i = 1; i <= cutoff; ++i) profile[static_cast<std::size_t>(i)] *= options.norm_safety;
  }
  const double alpha = lemma1_alpha(profile, cutoff);
  return NormProfile(std::move(profile), alpha);
}

}  // namespace psscf
