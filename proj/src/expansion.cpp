#include "energy_lab/expansion.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace energy_lab {

namespace {

void require_positive_lambda(double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error(fmt::format("lambda must be > 0, got {}", lambda));
}

ExpansionResult assemble(double first, double third) { return {first, third, first + third}; }

}  // namespace

HProfile HProfile::gaussian() {
  const double root_pi = std::sqrt(std::numbers::pi);
  return {0.5 * root_pi, 0.25 * root_pi};
}

void HProfile::validate() const {
  if (!(i0 > 0.0) || !(i2 > 0.0)) {
    throw std::domain_error("HProfile integrals must both be positive");
  }
}

ExpansionResult spherical_expansion(const MomentFunctionals& f, double lambda, SphereDim dim,
                                    const HProfile& h) {
  require_positive_lambda(lambda);
  h.validate();
  const int d = dim.value();
  // Vol(S^{d-1}) / c_d with c_d = Vol(S^d).
  const double ratio = std::exp(log_surface_volume(d) - log_surface_volume(d + 1));
  const double first = ratio / d * f.mean_feature() * h.i0 / lambda;
  const double third =
      ratio / (4.0 * d * (d + 2.0)) * f.covariance_feature() * h.i2 / (lambda * lambda * lambda);
  return assemble(first, third);
}

ExpansionResult asymptotic_expansion(const MomentFunctionals& f, double lambda, SphereDim dim,
                                     const HProfile& h) {
  require_positive_lambda(lambda);
  h.validate();
  const double d = dim.value();
  const double root = 1.0 / std::sqrt(2.0 * std::numbers::pi * d);
  const double first = root * f.mean_feature() * h.i0 / lambda;
  const double third = root / (4.0 * d) * f.covariance_feature() * h.i2 / (lambda * lambda * lambda);
  return assemble(first, third);
}

ExpansionResult gaussian_expansion(const Vector& mu, const Matrix& delta, double lambda) {
  require_positive_lambda(lambda);
  require_symmetric(delta, "Delta");
  if (delta.rows() != mu.size()) {
    throw std::invalid_argument(
        fmt::format("mu has {} entries but Delta is {}x{}", mu.size(), delta.rows(), delta.cols()));
  }
  const double d = static_cast<double>(mu.size());
  const double mu2 = mu.squaredNorm();
  const double tr = delta.trace();
  const double bracket = 2.0 * delta.squaredNorm() + tr * tr - mu2 * mu2;
  const double inv_root = 1.0 / std::sqrt(8.0 * d);
  const double first = inv_root * mu2 / lambda;
  const double third = inv_root / (8.0 * d) * bracket / (lambda * lambda * lambda);
  return assemble(first, third);
}

bool gaussian_pair_is_valid(const Matrix& delta, double lambda) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(delta, Eigen::EigenvaluesOnly);
  const double spread = 0.5 * eig.eigenvalues().cwiseAbs().maxCoeff();
  return lambda * lambda > spread;
}

double isotropic_midpoint_lambda(const Matrix& cov_x, const Matrix& cov_y) {
  if (cov_x.rows() != cov_y.rows() || cov_x.rows() < 1) {
    throw std::invalid_argument("covariances must have matching positive dimension");
  }
  const double lambda_sq = (cov_x.trace() + cov_y.trace()) / (2.0 * cov_x.rows());
  if (!(lambda_sq > 0.0)) throw std::domain_error("midpoint lambda^2 must be positive");
  return std::sqrt(lambda_sq);
}

ExpansionResult mdependent_expansion(double mu1, double delta_sq, double lambda, int d, int M,
                                     double rho_sq) {
  require_positive_lambda(lambda);
  if (d < 2) throw std::domain_error("mdependent_expansion requires d >= 2");
  if (M < 0) throw std::domain_error("bandwidth M must be non-negative");
  const double dd = d;
  const double scale = std::sqrt(dd / 8.0);
  const double delta4 = delta_sq * delta_sq;
  const double rho4 = rho_sq * rho_sq;
  const double mu2 = mu1 * mu1;
  const double first = scale * mu2 / lambda;
  const double bracket =
      delta4 / 8.0 - mu2 * mu2 / 8.0 + delta4 / (4.0 * dd) + M * rho4 / (2.0 * dd);
  return assemble(first, scale * bracket / (lambda * lambda * lambda));
}

namespace {

void require_marginal_domain(double delta_sq, double lambda) {
  require_positive_lambda(lambda);
  if (lambda * lambda < 0.5 * delta_sq) {
    throw std::domain_error(
        fmt::format("lambda^2 = {} is below delta^2/2 = {}", lambda * lambda, 0.5 * delta_sq));
  }
}

}  // namespace

double mdependent_marginal_form(double mu1, double delta_sq, double lambda) {
  require_marginal_domain(delta_sq, lambda);
  const double l3 = lambda * lambda * lambda;
  const double mu2 = mu1 * mu1;
  return (mu2 / lambda - mu2 * mu2 / (8.0 * l3) + delta_sq * delta_sq / (8.0 * l3)) /
         std::pow(2.0, 1.5);
}

double mdependent_marginal_exact(double mu1, double delta_sq, double lambda) {
  require_marginal_domain(delta_sq, lambda);
  const double l2 = lambda * lambda;
  return std::sqrt(mu1 * mu1 + 2.0 * l2) -
         (std::sqrt(l2 + 0.5 * delta_sq) + std::sqrt(l2 - 0.5 * delta_sq)) / std::sqrt(2.0);
}

double cosine_similarity_gamma(double gamma_sq, int d) {
  if (d < 1) throw std::domain_error("dimension must be positive");
  const double tol = 1e-12 * d;
  if (!(gamma_sq >= -tol && gamma_sq <= d + tol)) {
    throw std::domain_error(fmt::format("gamma^2 = {} outside [0, {}]", gamma_sq, d));
  }
  const double g = std::clamp(gamma_sq, 0.0, static_cast<double>(d));
  return (2.0 + g) / std::sqrt(4.0 + g * (4.0 + d));
}

double cosine_similarity(const Matrix& delta) {
  require_symmetric(delta, "Delta");
  const double frob = delta.squaredNorm();
  if (!(frob > 0.0)) throw std::domain_error("cosine similarity is undefined for Delta = 0");
  const double tr = delta.trace();
  const auto d = static_cast<int>(delta.rows());
  return cosine_similarity_gamma(std::clamp(tr * tr / frob, 0.0, static_cast<double>(d)), d);
}

std::string to_string(SimilarityCase c) {
  switch (c) {
    case SimilarityCase::LocalBiased: return "local-biased";
    case SimilarityCase::LocalUnbiased: return "local-unbiased";
    case SimilarityCase::GlobalBiased: return "global-biased";
    case SimilarityCase::GlobalUnbiased: return "global-unbiased";
  }
  throw std::invalid_argument("invalid similarity case");
}

double similarity_regime(SimilarityCase c, int d, int correlation_length) {
  if (d < 2) throw std::domain_error("similarity_regime requires d >= 2");
  const double dd = d;
  switch (c) {
    case SimilarityCase::LocalBiased:
    case SimilarityCase::LocalUnbiased:
      if (correlation_length < 1 || correlation_length >= d) {
        throw std::domain_error(
            fmt::format("local regime needs 1 <= M < d, got M={} d={}", correlation_length, d));
      }
      return c == SimilarityCase::LocalBiased ? std::sqrt(1.0 / correlation_length)
                                              : std::sqrt(correlation_length / dd);
    case SimilarityCase::GlobalBiased: return std::sqrt(1.0 / dd);
    case SimilarityCase::GlobalUnbiased: return 1.0;
  }
  throw std::invalid_argument("invalid similarity case");
}

}  // namespace energy_lab
