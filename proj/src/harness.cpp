#include "energy_lab/harness.hpp"

#include "energy_lab/parallel.hpp"
#include "energy_lab/seeding.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <tuple>

namespace energy_lab {

namespace {

double parse_number(const std::string& text, const std::string& label) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw std::invalid_argument("bad family parameter in '" + label + "'");
  }
  return v;
}

}  // namespace

Family parse_family(const std::string& label) {
  const auto colon = label.find(':');
  const std::string kind = label.substr(0, colon);
  if (colon == std::string::npos) {
    if (kind == "gaussian") return Gaussian{};
    throw std::invalid_argument("unknown family '" + label +
                                "' (expected gaussian, t:<dof>, exp:<sigma>, sinh:<skew>)");
  }
  const double p = parse_number(label.substr(colon + 1), label);
  if (kind == "t") {
    if (p <= 0.0) throw std::invalid_argument("t family needs dof > 0: '" + label + "'");
    return MultivariateT{p};
  }
  if (kind == "exp") {
    if (p <= 0.0) throw std::invalid_argument("exp family needs sigma > 0: '" + label + "'");
    return ExpScale{p};
  }
  if (kind == "sinh") return SinhArcsinhSkew{p};
  throw std::invalid_argument("unknown family '" + label + "'");
}

std::string family_label(const Family& family) {
  return std::visit(
      [](const auto& f) -> std::string {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, Gaussian>) {
          return "gaussian";
        } else if constexpr (std::is_same_v<F, MultivariateT>) {
          return fmt::format("t:{}", f.dof);
        } else if constexpr (std::is_same_v<F, ExpScale>) {
          return fmt::format("exp:{}", f.sigma);
        } else {
          return fmt::format("sinh:{}", f.skew);
        }
      },
      family);
}

std::vector<Family> default_families() {
  return {Gaussian{},         MultivariateT{2},      MultivariateT{3},      MultivariateT{5},
          ExpScale{0.75},     ExpScale{1.0},         ExpScale{1.25},        SinhArcsinhSkew{0.05},
          SinhArcsinhSkew{0.1}, SinhArcsinhSkew{0.2}};
}

void SweepConfig::validate() const {
  if (dims.empty()) throw std::invalid_argument("dims: at least one dimension required");
  for (int d : dims) {
    if (d < 2) throw std::invalid_argument(fmt::format("dims: dimension {} < 2", d));
  }
  if (families.empty()) throw std::invalid_argument("families: at least one family required");
  for (const auto& f : families) {
    // Construct a tiny spec to reuse the family parameter checks.
    make_spec(f, Vector::Zero(2), Matrix::Identity(2, 2));
  }
  if (mu1_values.empty()) throw std::invalid_argument("mu1: at least one value required");
  for (double m : mu1_values) {
    if (!std::isfinite(m)) throw std::invalid_argument("mu1: values must be finite");
  }
  if (n_cov < 3) throw std::invalid_argument(fmt::format("n_cov: {} < 3", n_cov));
  if (n_samples < 1024) throw std::invalid_argument(fmt::format("n_samples: {} < 1024", n_samples));
  if (!(closeness_min >= 0.0 && closeness_min <= closeness_max && closeness_max <= 1.0)) {
    throw std::invalid_argument(fmt::format(
        "closeness: need 0 <= closeness_min <= closeness_max <= 1, got [{}, {}]", closeness_min,
        closeness_max));
  }
  if (max_pairs && *max_pairs < 4) throw std::invalid_argument("max_pairs: must be at least 4");
  if (moment_samples < 3) throw std::invalid_argument("moment_samples: must be at least 3");
}

bool SweepRecord::has_flag(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

std::string GroupKey::label() const {
  return fmt::format("d={} {}({})", d, family, param);
}

GroupKey group_key(const SweepRecord& r) { return {r.d, r.family_kind, r.param, r.family}; }

std::map<GroupKey, std::vector<SweepRecord>> group_records(std::span<const SweepRecord> records) {
  std::map<GroupKey, std::vector<SweepRecord>> groups;
  for (const auto& r : records) groups[group_key(r)].push_back(r);
  return groups;
}

void sort_records(std::vector<SweepRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    const auto ka = group_key(a);
    const auto kb = group_key(b);
    if (ka != kb) return ka < kb;
    return std::tie(a.mu1_index, a.cov_index) < std::tie(b.mu1_index, b.cov_index);
  });
}

std::uint64_t cell_seed(std::uint64_t master_seed, int d, const Family& family, int mu1_index,
                        int cov_index) {
  return derive_seed(master_seed,
                     {static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(family_id(family)),
                      std::bit_cast<std::uint64_t>(family_param(family)),
                      static_cast<std::uint64_t>(mu1_index), static_cast<std::uint64_t>(cov_index)});
}

SweepRecord run_cell(const SweepConfig& cfg, int d, const Family& family, int mu1_index,
                     int cov_index) {
  SweepRecord r;
  r.d = d;
  r.family = family_name(family);
  r.param = family_param(family);
  r.family_kind = family_id(family);
  r.mu1_index = mu1_index;
  r.mu1 = cfg.mu1_values.at(static_cast<std::size_t>(mu1_index));
  r.cov_index = cov_index;
  r.cov_kind = cov_index % 2 == 0 ? CovarianceKind::Wishart : CovarianceKind::ExpDecay;
  r.seed = cell_seed(cfg.master_seed, d, family, mu1_index, cov_index);

  std::mt19937_64 setup(derive_seed(r.seed, {1}));
  const double closeness =
      std::uniform_real_distribution<double>(cfg.closeness_min, cfg.closeness_max)(setup);
  const Matrix cov = random_covariance(r.cov_kind, d, closeness, derive_seed(r.seed, {2}));

  // Skewed X is compared against a symmetric Gaussian Y; the other families
  // use the same transformation on both sides.
  const bool skewed = std::holds_alternative<SinhArcsinhSkew>(family);
  const DistributionSpec spec_x = make_spec(family, Vector::Constant(d, r.mu1), cov);
  const DistributionSpec spec_y =
      make_spec(skewed ? Family{Gaussian{}} : family, Vector::Zero(d), Matrix::Identity(d, d));

  const SampleMatrix x = sample(spec_x, cfg.n_samples, derive_seed(r.seed, {3}));
  const SampleMatrix y = sample(spec_y, cfg.n_samples, derive_seed(r.seed, {4}));
  EstimatorOptions opts;
  opts.mode = cfg.mode;
  opts.max_pairs = cfg.max_pairs;
  r.estimate = energy_distance_sq(x.data, y.data, opts);

  MomentDiff md;
  Matrix cov_x;
  Matrix cov_y;
  try {
    AnalyticMomentOptions mopts;
    mopts.fallback_samples = cfg.moment_samples;
    const DistributionMoments mx = analytic_moments(spec_x, mopts);
    const DistributionMoments my = analytic_moments(spec_y, mopts);
    md = mx - my;
    cov_x = mx.cov;
    cov_y = my.cov;
  } catch (const MomentUndefinedError&) {
    const DistributionMoments mx = sample_moments(x.data);
    const DistributionMoments my = sample_moments(y.data);
    md = mx - my;
    cov_x = mx.cov;
    cov_y = my.cov;
    r.flags.emplace_back(kMomentsUnreliable);
  }
  r.functionals = functionals(md);
  r.feature1 = r.functionals.mean_feature();
  r.feature2 = r.functionals.covariance_feature();
  r.lambda = isotropic_midpoint_lambda(cov_x, cov_y);
  r.predicted = std::holds_alternative<Gaussian>(family)
                    ? gaussian_expansion(md.mu, md.delta, r.lambda).total
                    : std::numeric_limits<double>::quiet_NaN();
  return r;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  struct Cell {
    int d;
    Family family;
    int mu1_index;
    int cov_index;
  };
  std::vector<Cell> cells;
  for (int d : cfg.dims) {
    for (const auto& f : cfg.families) {
      for (int m = 0; m < static_cast<int>(cfg.mu1_values.size()); ++m) {
        for (int c = 0; c < cfg.n_cov; ++c) cells.push_back({d, f, m, c});
      }
    }
  }
  std::vector<SweepRecord> records(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
    const Cell& c = cells[i];
    records[i] = run_cell(cfg, c.d, c.family, c.mu1_index, c.cov_index);
  });
  sort_records(records);
  return records;
}

RegressionFit fit_cell_group(std::span<const SweepRecord> records, const std::string& group) {
  const std::string name = group.empty() ? std::string("cell group") : "group " + group;
  if (records.size() < 3) {
    throw std::invalid_argument(
        fmt::format("{}: regression needs at least 3 records, got {}", name, records.size()));
  }
  std::set<std::pair<double, double>> distinct;
  Matrix features(static_cast<Eigen::Index>(records.size()), 2);
  Vector targets(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    features(k, 0) = records[i].feature1;
    features(k, 1) = records[i].feature2;
    targets[k] = records[i].estimate.value;
    distinct.emplace(records[i].feature1, records[i].feature2);
  }
  if (distinct.size() < 2) {
    throw DegenerateDesignError(name + ": all feature rows are identical");
  }
  try {
    return fit_two_term(features, targets);
  } catch (const DegenerateDesignError& e) {
    throw DegenerateDesignError(name + ": " + e.what());
  }
}

DirectCheck gaussian_direct_check(std::span<const SweepRecord> records) {
  DirectCheck out;
  std::vector<double> predicted;
  std::vector<double> observed;
  for (const auto& r : records) {
    if (r.family != family_name(Gaussian{})) {
      throw std::invalid_argument("direct check applies to Gaussian records only, got " + r.family);
    }
    DirectCheckRow row;
    row.predicted = r.predicted;
    row.estimated = r.estimate.value;
    const double diff = std::abs(row.estimated - row.predicted);
    row.relative_error = row.predicted != 0.0 ? diff / std::abs(row.predicted) : diff;
    out.rows.push_back(row);
    predicted.push_back(row.predicted);
    observed.push_back(row.estimated);
  }
  out.r_squared = records.empty() ? std::numeric_limits<double>::quiet_NaN()
                                  : r_squared(predicted, observed);
  return out;
}

MDependentCheck mdependent_check(int d, int M, double delta_sq, double rho_sq, double mu1,
                                 double lambda, std::int64_t n_samples, std::uint64_t seed,
                                 const EstimatorOptions& options) {
  const BandedDelta band{d, delta_sq, rho_sq, M};
  const auto [spec_x, spec_y] = banded_gaussian_pair(band, mu1, lambda);
  const SampleMatrix x = sample(spec_x, n_samples, derive_seed(seed, {1}));
  const SampleMatrix y = sample(spec_y, n_samples, derive_seed(seed, {2}));

  MDependentCheck out;
  out.d = d;
  out.normalization = std::sqrt(8.0 / d);
  out.simulated = energy_distance_sq(x.data, y.data, options);
  out.predicted = gaussian_expansion(Vector::Constant(d, mu1), band.matrix(), lambda);
  out.predicted_asymptotic = mdependent_expansion(mu1, delta_sq, lambda, d, M, rho_sq);
  return out;
}

}  // namespace energy_lab
