#include "energy_lab/moments.hpp"

#include <fmt/format.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace energy_lab {

MomentDiff operator-(const DistributionMoments& x, const DistributionMoments& y) {
  if (x.mean.size() != y.mean.size()) {
    throw std::invalid_argument(fmt::format("dimension mismatch: {} vs {}", x.mean.size(),
                                            y.mean.size()));
  }
  return MomentDiff{x.mean - y.mean, x.cov - y.cov, x.skew - y.skew};
}

DistributionMoments sample_moments(const RowMatrix& x) {
  const auto n = x.rows();
  if (n < 3) throw std::invalid_argument("sample moments need at least 3 rows");
  DistributionMoments m;
  m.mean = x.colwise().mean().transpose();
  const RowMatrix centered = x.rowwise() - m.mean.transpose();
  m.cov = centered.transpose() * centered / static_cast<double>(n - 1);
  m.cov = 0.5 * (m.cov + m.cov.transpose()).eval();
  // sum_i c_i^2 c_j = |c|^2 c_j, so the contraction never forms the d^3 tensor.
  const Vector sq = centered.rowwise().squaredNorm();
  m.skew = centered.transpose() * sq / static_cast<double>(n);
  return m;
}

MomentDiff moment_diff_from_samples(const SampleMatrix& x, const SampleMatrix& y) {
  if (x.dim() != y.dim()) {
    throw std::invalid_argument(
        fmt::format("sample dimension mismatch: {} vs {}", x.dim(), y.dim()));
  }
  return sample_moments(x.data) - sample_moments(y.data);
}

namespace {

DistributionMoments lognormal_moments(const DistributionSpec& spec, double sigma) {
  const int d = spec.dim();
  const Vector a = sigma * spec.mean;
  const Matrix s = sigma * sigma * spec.base_cov;
  DistributionMoments m;
  m.mean.resize(d);
  for (int i = 0; i < d; ++i) m.mean[i] = std::exp(a[i] + 0.5 * s(i, i));
  m.cov.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m.cov(i, j) = m.mean[i] * m.mean[j] * std::expm1(s(i, j));
  // E[(X_i - m_i)^2 (X_j - m_j)]
  //   = m_i^2 m_j [e^{S_ii + 2 S_ij} - e^{S_ii} - 2 e^{S_ij} + 2]
  m.skew = Vector::Zero(d);
  for (int j = 0; j < d; ++j) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i) {
      const double bracket =
          std::expm1(s(i, i) + 2.0 * s(i, j)) - std::expm1(s(i, i)) - 2.0 * std::expm1(s(i, j));
      acc += m.mean[i] * m.mean[i] * m.mean[j] * bracket;
    }
    m.skew[j] = acc;
  }
  return m;
}

DistributionMoments monte_carlo_moments(const DistributionSpec& spec,
                                        const AnalyticMomentOptions& options) {
  const int d = spec.dim();
  const std::int64_t n = options.fallback_samples;
  if (n < 3) throw std::invalid_argument("Monte-Carlo fallback needs at least 3 draws");

  // Accumulate raw moments of y = x - shift; central moments are shift invariant
  // and a shift near the mean keeps the raw sums well conditioned.
  const auto* skewed = std::get_if<SinhArcsinhSkew>(&spec.family);
  Vector shift = spec.mean;
  if (skewed) {
    shift = spec.mean.unaryExpr([&](double v) { return std::sinh(std::asinh(v) + skewed->skew); });
  }

  SampleStream stream(spec, options.fallback_seed);
  constexpr std::int64_t kChunk = std::int64_t{1} << 14;
  Vector s1 = Vector::Zero(d);
  Matrix s2 = Matrix::Zero(d, d);
  Vector s3 = Vector::Zero(d);
  double sq_total = 0.0;
  for (std::int64_t done = 0; done < n;) {
    const std::int64_t take = std::min(kChunk, n - done);
    RowMatrix y = stream.next(take);
    y.rowwise() -= shift.transpose();
    const Vector sq = y.rowwise().squaredNorm();
    s1 += y.colwise().sum().transpose();
    s2.noalias() += y.transpose() * y;
    s3.noalias() += y.transpose() * sq;
    sq_total += sq.sum();
    done += take;
  }
  const double nd = static_cast<double>(n);
  const Vector mean_y = s1 / nd;
  const Matrix raw2 = s2 / nd;
  DistributionMoments m;
  m.mean = mean_y + shift;
  m.cov = (s2 - nd * mean_y * mean_y.transpose()) / (nd - 1.0);
  m.cov = 0.5 * (m.cov + m.cov.transpose()).eval();
  m.skew = s3 / nd - mean_y * (sq_total / nd) - 2.0 * raw2 * mean_y +
           2.0 * mean_y * mean_y.squaredNorm();
  return m;
}

DistributionMoments cached_monte_carlo_moments(const DistributionSpec& spec,
                                               const AnalyticMomentOptions& options) {
  using Key = std::tuple<std::string, std::int64_t, std::uint64_t>;
  static std::mutex mutex;
  static std::map<Key, DistributionMoments> cache;
  const Key key{spec.digest(), options.fallback_samples, options.fallback_seed};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  DistributionMoments m = monte_carlo_moments(spec, options);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(m)).first->second;
}

}  // namespace

DistributionMoments analytic_moments(const DistributionSpec& spec,
                                     const AnalyticMomentOptions& options) {
  spec.validate();
  const int d = spec.dim();
  if (std::holds_alternative<Gaussian>(spec.family)) {
    return {spec.mean, spec.base_cov, Vector::Zero(d)};
  }
  if (const auto* t = std::get_if<MultivariateT>(&spec.family)) {
    if (t->dof <= 2.0) {
      throw MomentUndefinedError(fmt::format(
          "moment does not exist: MultivariateT(dof={}) has infinite covariance (needs dof > 2)",
          t->dof));
    }
    return {spec.mean, spec.base_cov * (t->dof / (t->dof - 2.0)), Vector::Zero(d)};
  }
  if (const auto* e = std::get_if<ExpScale>(&spec.family)) {
    return lognormal_moments(spec, e->sigma);
  }
  return cached_monte_carlo_moments(spec, options);
}

MomentDiff moment_diff_analytic(const DistributionSpec& x, const DistributionSpec& y,
                                const AnalyticMomentOptions& options) {
  if (x.dim() != y.dim()) {
    throw std::invalid_argument(
        fmt::format("spec dimension mismatch: {} vs {}", x.dim(), y.dim()));
  }
  return analytic_moments(x, options) - analytic_moments(y, options);
}

MomentFunctionals functionals(const MomentDiff& md) {
  MomentFunctionals f;
  f.mu_norm_sq = md.mu.squaredNorm();
  f.mu_norm_4 = f.mu_norm_sq * f.mu_norm_sq;
  f.delta_frob_sq = md.delta.squaredNorm();
  const double tr = md.delta.trace();
  f.trace_sq = tr * tr;
  f.beta_dot_mu = md.beta.dot(md.mu);
  return f;
}

}  // namespace energy_lab
