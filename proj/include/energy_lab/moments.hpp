#ifndef ENERGY_LAB_MOMENTS_HPP_
#define ENERGY_LAB_MOMENTS_HPP_

#include "energy_lab/distributions.hpp"
#include "energy_lab/numerics.hpp"

#include <cstdint>
#include <stdexcept>

namespace energy_lab {

/// Raised when a requested moment is infinite for the given law.
class MomentUndefinedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// First three moments of a single law. `skew` is the contracted third
/// central moment, skew_j = sum_i E[(X_i - m_i)^2 (X_j - m_j)].
struct DistributionMoments {
  Vector mean;
  Matrix cov;
  Vector skew;
};

/// Difference of moments between X and Y: mu = EX - EY, Delta = Cov X - Cov Y,
/// beta = skew(X) - skew(Y).
struct MomentDiff {
  Vector mu;
  Matrix delta;
  Vector beta;

  int dim() const { return static_cast<int>(mu.size()); }
};

MomentDiff operator-(const DistributionMoments& x, const DistributionMoments& y);

struct MomentFunctionals {
  double mu_norm_sq = 0.0;
  double mu_norm_4 = 0.0;
  double delta_frob_sq = 0.0;
  double trace_sq = 0.0;
  double beta_dot_mu = 0.0;

  /// Tr(Delta)^2 / |Delta|_F^2, in [0, d]; zero when Delta vanishes.
  double gamma_sq() const { return delta_frob_sq > 0.0 ? trace_sq / delta_frob_sq : 0.0; }
  /// |mu|^2.
  double mean_feature() const { return mu_norm_sq; }
  /// 2 |Delta|_F^2 + Tr(Delta)^2 - |mu|^4 - 4 beta.mu.
  double covariance_feature() const {
    return 2.0 * delta_frob_sq + trace_sq - mu_norm_4 - 4.0 * beta_dot_mu;
  }
};

/// Plug-in moments of the rows of `x`: sample mean, unbiased (N-1)
/// covariance, plug-in third central moments. Single O(N d^2) pass.
DistributionMoments sample_moments(const RowMatrix& x);

MomentDiff moment_diff_from_samples(const SampleMatrix& x, const SampleMatrix& y);

struct AnalyticMomentOptions {
  /// Draws used when no closed form exists (SinhArcsinhSkew).
  std::int64_t fallback_samples = std::int64_t{1} << 22;
  std::uint64_t fallback_seed = 0x6d6f6d656e7473ULL;
};

/// Closed-form moments where known; deterministic cached Monte-Carlo for
/// SinhArcsinhSkew. Throws MomentUndefinedError for MultivariateT(dof <= 2).
DistributionMoments analytic_moments(const DistributionSpec& spec,
                                     const AnalyticMomentOptions& options = {});

MomentDiff moment_diff_analytic(const DistributionSpec& x, const DistributionSpec& y,
                                const AnalyticMomentOptions& options = {});

MomentFunctionals functionals(const MomentDiff& md);

}  // namespace energy_lab

#endif  // ENERGY_LAB_MOMENTS_HPP_
