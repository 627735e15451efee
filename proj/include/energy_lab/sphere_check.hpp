#ifndef ENERGY_LAB_SPHERE_CHECK_HPP_
#define ENERGY_LAB_SPHERE_CHECK_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace energy_lab {

/// One closed-form spherical integral compared against uniform-sphere
/// Monte Carlo.
struct SphereCheckRow {
  std::string integral;
  double closed_form = 0.0;
  double monte_carlo = 0.0;
  double std_error = 0.0;
  double z_score = 0.0;
  double relative_error = 0.0;
};

/// Checks the four quadratic / quartic spherical integrals on random
/// mu, symmetric Delta and symmetric kappa (a sum of rank-one cubes) drawn
/// from `seed`, using `n_mc` uniform points on S^{d-1}.
std::vector<SphereCheckRow> sphere_integral_check(int d, std::int64_t n_mc, std::uint64_t seed);

}  // namespace energy_lab

#endif  // ENERGY_LAB_SPHERE_CHECK_HPP_
