#include "energy_lab/sphere_check.hpp"

#include "energy_lab/numerics.hpp"
#include "energy_lab/seeding.hpp"

#include <array>
#include <cmath>
#include <random>

namespace energy_lab {

namespace {

constexpr int kRankOneTerms = 3;

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
  }
};

}  // namespace

std::vector<SphereCheckRow> sphere_integral_check(int d, std::int64_t n_mc, std::uint64_t seed) {
  const SphereDim dim(d);
  if (n_mc < 2) throw std::invalid_argument("sphere check needs at least 2 Monte-Carlo points");

  std::mt19937_64 setup(derive_seed(seed, {static_cast<std::uint64_t>(d), 0}));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_vector = [&] {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = normal(setup);
    return v;
  };
  const Vector mu = random_vector();
  Matrix delta(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) delta(i, j) = normal(setup);
  delta = 0.5 * (delta + delta.transpose()).eval();

  Tensor3 kappa(d);
  std::array<Vector, kRankOneTerms> factors;
  std::array<double, kRankOneTerms> weights{};
  for (int r = 0; r < kRankOneTerms; ++r) {
    factors[r] = random_vector();
    weights[r] = normal(setup);
    kappa.add_rank_one(weights[r], factors[r]);
  }

  std::vector<SphereCheckRow> rows(4);
  rows[0].integral = "(theta.mu)^2";
  rows[0].closed_form = linear_square_sphere_integral(mu);
  rows[1].integral = "(theta.mu)^4";
  rows[1].closed_form = linear_quartic_sphere_integral(mu);
  rows[2].integral = "(theta.Delta theta)^2";
  rows[2].closed_form = quadratic_form_sphere_integral(delta);
  rows[3].integral = "(theta.mu) kappa[theta,theta,theta]";
  rows[3].closed_form = skew_contraction_sphere_integral(kappa, mu);

  // Uniform points on the sphere: normalized standard Gaussian vectors.
  std::mt19937_64 engine(derive_seed(seed, {static_cast<std::uint64_t>(d), 1}));
  std::array<Moments, 4> acc;
  Vector theta(d);
  for (std::int64_t n = 0; n < n_mc; ++n) {
    for (int i = 0; i < d; ++i) theta[i] = normal(engine);
    theta /= theta.norm();
    const double lin = theta.dot(mu);
    const double quad = theta.dot(delta * theta);
    double cubic = 0.0;
    for (int r = 0; r < kRankOneTerms; ++r) {
      const double p = theta.dot(factors[r]);
      cubic += weights[r] * p * p * p;
    }
    acc[0].add(lin * lin);
    acc[1].add(lin * lin * lin * lin);
    acc[2].add(quad * quad);
    acc[3].add(lin * cubic);
  }

  const double vol = surface_volume(d);
  const auto nd = static_cast<double>(n_mc);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double mean = acc[k].sum / nd;
    const double var = std::max(0.0, (acc[k].sum_sq / nd - mean * mean) * nd / (nd - 1.0));
    auto& row = rows[k];
    row.monte_carlo = vol * mean;
    row.std_error = vol * std::sqrt(var / nd);
    const double diff = row.monte_carlo - row.closed_form;
    row.z_score = row.std_error > 0.0 ? std::abs(diff) / row.std_error : (diff == 0.0 ? 0.0 : INFINITY);
    row.relative_error =
        row.closed_form != 0.0 ? std::abs(diff / row.closed_form) : std::abs(diff);
  }
  return rows;
}

}  // namespace energy_lab
