#ifndef ENERGY_LAB_EXPANSION_HPP_
#define ENERGY_LAB_EXPANSION_HPP_

#include "energy_lab/moments.hpp"
#include "energy_lab/numerics.hpp"

#include <string>

namespace energy_lab {

/// Leading terms of the squared energy distance in the perturbative regime.
/// The O(lambda^{b-4}) remainder is not represented.
struct ExpansionResult {
  double first_order = 0.0;  ///< mean term, proportional to 1/lambda
  double third_order = 0.0;  ///< covariance / skew term, proportional to 1/lambda^3
  double total = 0.0;
};

/// The two radial moments of a spherically symmetric profile h:
/// i0 = int_0^inf h(r) dr and i2 = int_0^inf h(r) r^2 dr.
struct HProfile {
  double i0 = 0.0;
  double i2 = 0.0;

  /// h(r) = exp(-r^2): i0 = sqrt(pi)/2, i2 = sqrt(pi)/4.
  static HProfile gaussian();
  void validate() const;
};

/// Spherically symmetric expansion with the exact ratio Vol(S^{d-1}) / c_d,
/// c_d = Vol(S^d).
ExpansionResult spherical_expansion(const MomentFunctionals& f, double lambda, SphereDim d,
                                    const HProfile& h);

/// Same structure with Vol(S^{d-1}) / c_d replaced by sqrt(d / 2 pi).
ExpansionResult asymptotic_expansion(const MomentFunctionals& f, double lambda, SphereDim d,
                                     const HProfile& h = HProfile::gaussian());

/// Gaussian pair Y ~ N(0, lambda^2 I - Delta/2), X ~ N(mu, lambda^2 I + Delta/2):
///   |mu|^2 / (lambda sqrt(8d)) + [2|Delta|_F^2 + Tr(Delta)^2 - |mu|^4] / (lambda^3 8d sqrt(8d)).
/// Evaluates even when the covariances are not positive definite; use
/// gaussian_pair_is_valid to check.
ExpansionResult gaussian_expansion(const Vector& mu, const Matrix& delta, double lambda);

/// True when lambda^2 I +- Delta/2 are both positive definite.
bool gaussian_pair_is_valid(const Matrix& delta, double lambda);

/// lambda^2 = Tr(C_x + C_y) / (2d): the isotropic scale midway between two
/// covariances. Reduces to lambda for the lambda^2 I +- Delta/2 pair.
double isotropic_midpoint_lambda(const Matrix& cov_x, const Matrix& cov_y);

/// Banded-Delta Gaussian expansion with the asymptotic band count 2dM:
///   sqrt(d/8) [mu1^2/lambda + (delta^4/8 - mu1^4/8 + delta^4/(4d) + M rho^4/(2d)) / lambda^3].
ExpansionResult mdependent_expansion(double mu1, double delta_sq, double lambda, int d, int M,
                                     double rho_sq);

/// Per-sqrt(d) marginal-only approximation
///   2^{-3/2} [mu1^2/lambda - mu1^4/(8 lambda^3) + delta^4/(8 lambda^3)].
double mdependent_marginal_form(double mu1, double delta_sq, double lambda);

/// The unexpanded marginal form
///   sqrt(mu1^2 + 2 lambda^2) - [sqrt(lambda^2 + delta^2/2) + sqrt(lambda^2 - delta^2/2)] / sqrt(2).
double mdependent_marginal_exact(double mu1, double delta_sq, double lambda);

/// Cosine similarity between the gradients (in the eigenvalues of Delta) of
/// 2|Delta|_F^2 + Tr(Delta)^2 and of |Delta|_F^2:
///   S = (2 + g) / sqrt(4 + g (4 + d)),  g = Tr(Delta)^2 / |Delta|_F^2.
double cosine_similarity_gamma(double gamma_sq, int d);

/// Matrix form; g is computed from the trace and Frobenius norm.
/// Throws std::domain_error when Delta is zero.
double cosine_similarity(const Matrix& delta);

enum class SimilarityCase { LocalBiased, LocalUnbiased, GlobalBiased, GlobalUnbiased };

std::string to_string(SimilarityCase c);

/// Large-d limits of the cosine similarity: sqrt(1/M), sqrt(M/d), sqrt(1/d), 1.
/// `correlation_length` is M for the local cases and is ignored otherwise.
double similarity_regime(SimilarityCase c, int d, int correlation_length = 1);

}  // namespace energy_lab

#endif  // ENERGY_LAB_EXPANSION_HPP_
