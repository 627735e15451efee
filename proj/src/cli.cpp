#include "energy_lab/cli.hpp"

#include "energy_lab/estimators.hpp"
#include "energy_lab/expansion.hpp"
#include "energy_lab/harness.hpp"
#include "energy_lab/moments.hpp"
#include "energy_lab/report.hpp"
#include "energy_lab/sample_io.hpp"
#include "energy_lab/sphere_check.hpp"
#include "energy_lab/sweep_config.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <optional>
#include <ostream>

namespace energy_lab {

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out_dir;
  std::string mode;
  std::optional<std::int64_t> n_samples;
};

unsigned resolve_threads(const GlobalOptions& g, std::optional<unsigned> from_file) {
  if (g.threads) return std::max(1u, *g.threads);
  if (const char* env = std::getenv("ENERGY_LAB_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0 || v > 4096) {
      throw std::invalid_argument(fmt::format("ENERGY_LAB_THREADS: invalid value '{}'", env));
    }
    return static_cast<unsigned>(v);
  }
  return from_file.value_or(1u);
}

EstimatorMode resolve_mode(const GlobalOptions& g, EstimatorMode fallback) {
  return g.mode.empty() ? fallback : parse_estimator_mode(g.mode);
}

// --- estimate ---------------------------------------------------------------

int cmd_estimate(const GlobalOptions& g, const std::string& x_file, const std::string& y_file,
                 std::ostream& out, std::ostream& err) {
  const RowMatrix x = read_sample_csv(std::filesystem::path(x_file));
  const RowMatrix y = read_sample_csv(std::filesystem::path(y_file));
  if (x.cols() != y.cols()) {
    throw std::invalid_argument(fmt::format("dimension mismatch: '{}' has {} columns, '{}' has {}",
                                            x_file, x.cols(), y_file, y.cols()));
  }
  EstimatorOptions opts;
  opts.mode = resolve_mode(g, EstimatorMode::UStat);
  opts.threads = resolve_threads(g, std::nullopt);
  const EstimateWithError e = energy_distance_sq(x, y, opts);
  err << "# value,std_error,n_x,n_y (" << to_string(opts.mode) << ")\n";
  out << fmt::format("{},{},{},{}\n", format_number(e.value), format_number(e.std_error), e.n_x,
                     e.n_y);
  return kExitOk;
}

// --- predict ----------------------------------------------------------------

struct PredictArgs {
  std::string x_file;
  std::string y_file;
  std::optional<double> lambda;
  bool banded = false;
  int d = 64;
  int M = 2;
  double delta_sq = 0.0;
  double rho_sq = 0.0;
  double mu1 = 0.0;
};

void print_prediction(std::ostream& out, const std::string& name, double lambda,
                      const ExpansionResult& r) {
  out << fmt::format("{},{},{},{},{}\n", name, format_number(lambda), format_number(r.first_order),
                     format_number(r.third_order), format_number(r.total));
}

int cmd_predict(const PredictArgs& a, std::ostream& out, std::ostream& err) {
  out << "predictor,lambda,first_order,third_order,total\n";
  if (a.banded) {
    if (!a.lambda) throw std::invalid_argument("--banded requires --lambda");
    const BandedDelta band{a.d, a.delta_sq, a.rho_sq, a.M};
    band.validate();
    if (!gaussian_pair_is_valid(band.matrix(), *a.lambda)) {
      err << "warning: lambda^2 I +- Delta/2 is not positive definite\n";
    }
    print_prediction(out, "gaussian", *a.lambda,
                     gaussian_expansion(Vector::Constant(a.d, a.mu1), band.matrix(), *a.lambda));
    print_prediction(out, "mdependent", *a.lambda,
                     mdependent_expansion(a.mu1, a.delta_sq, *a.lambda, a.d, a.M, a.rho_sq));
    return kExitOk;
  }
  if (a.x_file.empty() || a.y_file.empty()) {
    throw std::invalid_argument("predict needs --x and --y sample files, or --banded");
  }
  const RowMatrix x = read_sample_csv(std::filesystem::path(a.x_file));
  const RowMatrix y = read_sample_csv(std::filesystem::path(a.y_file));
  if (x.cols() != y.cols()) {
    throw std::invalid_argument(fmt::format("dimension mismatch: {} vs {} columns", x.cols(),
                                            y.cols()));
  }
  const DistributionMoments mx = sample_moments(x);
  const DistributionMoments my = sample_moments(y);
  const MomentDiff md = mx - my;
  const MomentFunctionals f = functionals(md);
  const double lambda = a.lambda.value_or(isotropic_midpoint_lambda(mx.cov, my.cov));
  const SphereDim dim(static_cast<int>(x.cols()));
  print_prediction(out, "gaussian", lambda, gaussian_expansion(md.mu, md.delta, lambda));
  print_prediction(out, "spherical", lambda,
                   spherical_expansion(f, lambda, dim, HProfile::gaussian()));
  print_prediction(out, "asymptotic", lambda, asymptotic_expansion(f, lambda, dim));
  err << fmt::format("# features: |mu|^2 = {}, covariance term = {}\n", f.mean_feature(),
                     f.covariance_feature());
  return kExitOk;
}

// --- sweep ------------------------------------------------------------------

int cmd_sweep(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::optional<unsigned> file_threads;
  if (!g.config.empty()) {
    cfg = load_run_config(g.config);
    file_threads = cfg.sweep.threads;
  }
  if (g.seed) cfg.sweep.master_seed = *g.seed;
  if (g.n_samples) cfg.sweep.n_samples = *g.n_samples;
  cfg.sweep.mode = resolve_mode(g, cfg.sweep.mode);
  cfg.sweep.threads = resolve_threads(g, file_threads);
  const std::filesystem::path out_dir =
      !g.out_dir.empty() ? std::filesystem::path(g.out_dir)
                         : cfg.out_dir.value_or(std::filesystem::path("results"));
  cfg.sweep.validate();

  const std::size_t n_cells = cfg.sweep.dims.size() * cfg.sweep.families.size() *
                              cfg.sweep.mu1_values.size() *
                              static_cast<std::size_t>(cfg.sweep.n_cov);
  err << fmt::format("running {} cells with {} thread(s)\n", n_cells, cfg.sweep.threads);
  const auto start = std::chrono::steady_clock::now();
  const std::vector<SweepRecord> records = run_sweep(cfg.sweep);
  const std::vector<GroupFit> fits = fit_groups(records);
  const auto files = emit_report(records, fits, out_dir);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& f : files) err << "wrote " << f.string() << '\n';
  err << fmt::format("finished in {:.1f} s\n", secs);
  write_summary(out, fits);
  return kExitOk;
}

// --- sphere-check -----------------------------------------------------------

int cmd_sphere_check(const GlobalOptions& g, int d, std::int64_t n_mc, std::ostream& out,
                     std::ostream& err) {
  const auto rows = sphere_integral_check(d, n_mc, g.seed.value_or(1));
  out << "integral,closed_form,monte_carlo,std_error,z_score,relative_error\n";
  bool ok = true;
  for (const auto& r : rows) {
    out << fmt::format("\"{}\",{},{},{},{},{}\n", r.integral, format_number(r.closed_form),
                       format_number(r.monte_carlo), format_number(r.std_error),
                       format_number(r.z_score), format_number(r.relative_error));
    if (!(r.z_score <= 5.0)) {
      ok = false;
      err << fmt::format("FAIL: {} z-score {:.2f} > 5\n", r.integral, r.z_score);
    }
  }
  return ok ? kExitOk : kExitCheckFailed;
}

// --- similarity -------------------------------------------------------------

struct SimilarityArgs {
  std::optional<double> gamma_sq;
  std::string delta_file;
  std::optional<int> d;
  bool table = false;
  int M = 1;
  std::optional<double> rho;
};

int cmd_similarity(const SimilarityArgs& a, std::ostream& out, std::ostream& err) {
  if (a.table) {
    if (!a.d) throw std::invalid_argument("--table requires --d");
    if (a.rho) err << "# rho only selects the regime; the limits do not depend on its value\n";
    out << "case,similarity\n";
    for (SimilarityCase c : {SimilarityCase::LocalBiased, SimilarityCase::LocalUnbiased,
                             SimilarityCase::GlobalBiased, SimilarityCase::GlobalUnbiased}) {
      out << fmt::format("{},{}\n", to_string(c), format_number(similarity_regime(c, *a.d, a.M)));
    }
    return kExitOk;
  }
  if (a.gamma_sq.has_value() == !a.delta_file.empty()) {
    throw std::invalid_argument("give exactly one of --gamma-sq or --delta-file");
  }
  double gamma_sq = 0.0;
  double s = 0.0;
  if (a.gamma_sq) {
    if (!a.d) throw std::invalid_argument("--gamma-sq requires --d");
    gamma_sq = *a.gamma_sq;
    if (!(gamma_sq >= 0.0 && gamma_sq <= *a.d)) {
      throw std::invalid_argument(
          fmt::format("gamma^2 = {} outside [0, d] = [0, {}]", format_number(gamma_sq), *a.d));
    }
    s = cosine_similarity_gamma(gamma_sq, *a.d);
  } else {
    const RowMatrix m = read_sample_csv(std::filesystem::path(a.delta_file));
    if (m.rows() != m.cols()) {
      throw std::invalid_argument(
          fmt::format("Delta must be square, got {}x{}", m.rows(), m.cols()));
    }
    if (a.d && *a.d != m.rows()) {
      throw std::invalid_argument(fmt::format("--d {} does not match the {}x{} Delta file", *a.d,
                                              m.rows(), m.cols()));
    }
    const Matrix delta = m;
    s = cosine_similarity(delta);
    const double frob = delta.squaredNorm();
    gamma_sq = delta.trace() * delta.trace() / frob;
  }
  out << "similarity,gamma_sq\n";
  out << fmt::format("{},{}\n", format_number(s), format_number(gamma_sq));
  return kExitOk;
}

// --- mdep-check -------------------------------------------------------------

struct MdepArgs {
  std::vector<int> dims{32, 64, 128};
  int M = 2;
  double delta_sq = 0.0;
  double rho_sq = 2.0;
  double mu1 = 0.0;
  double lambda = 4.0;
};

int cmd_mdep_check(const GlobalOptions& g, const MdepArgs& a, std::ostream& out,
                   std::ostream& err) {
  EstimatorOptions opts;
  opts.mode = resolve_mode(g, EstimatorMode::UStat);
  opts.threads = resolve_threads(g, std::nullopt);
  const std::int64_t n = g.n_samples.value_or(std::int64_t{1} << 13);
  const std::uint64_t seed = g.seed.value_or(7);
  out << "d,M,delta_sq,rho_sq,mu1,lambda,estimate,std_error,normalized_estimate,"
         "normalized_std_error,predicted_first,predicted_third,predicted_total,"
         "normalized_predicted,asymptotic_total\n";
  for (int d : a.dims) {
    err << fmt::format("d = {} ...\n", d);
    const MDependentCheck c =
        mdependent_check(d, a.M, a.delta_sq, a.rho_sq, a.mu1, a.lambda, n, seed, opts);
    out << fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", d, a.M, format_number(a.delta_sq),
        format_number(a.rho_sq), format_number(a.mu1), format_number(a.lambda),
        format_number(c.simulated.value), format_number(c.simulated.std_error),
        format_number(c.normalized_simulated()), format_number(c.normalized_std_error()),
        format_number(c.predicted.first_order), format_number(c.predicted.third_order),
        format_number(c.predicted.total), format_number(c.normalized_predicted()),
        format_number(c.predicted_asymptotic.total));
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy distance estimators, moment expansions and verification sweeps",
               "energy-lab"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "Sweep configuration file (INI)");
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--threads", g.threads, "Worker threads (fallback: ENERGY_LAB_THREADS)")
      ->check(CLI::Range(1u, 4096u));
  app.add_option("--out-dir", g.out_dir, "Output directory for report files");
  app.add_option("--mode", g.mode, "Estimator mode: ustat or vstat")
      ->check(CLI::IsMember({"ustat", "vstat"}, CLI::ignore_case));
  app.add_option("--n-samples", g.n_samples, "Samples per distribution")
      ->check(CLI::PositiveNumber);

  std::string x_file;
  std::string y_file;
  auto* estimate = app.add_subcommand("estimate", "Estimate D^2 from two CSV sample files");
  estimate->add_option("x_file", x_file, "CSV samples of X")->required();
  estimate->add_option("y_file", y_file, "CSV samples of Y")->required();

  PredictArgs pa;
  auto* predict = app.add_subcommand("predict", "Moment-expansion predictions of D^2");
  predict->add_option("--x", pa.x_file, "CSV samples of X");
  predict->add_option("--y", pa.y_file, "CSV samples of Y");
  predict->add_option("--lambda", pa.lambda, "Scale (default: isotropic midpoint)")
      ->check(CLI::PositiveNumber);
  predict->add_flag("--banded", pa.banded, "Predict the banded Gaussian pair instead");
  predict->add_option("--d", pa.d, "Dimension (banded)");
  predict->add_option("--M", pa.M, "Bandwidth (banded)");
  predict->add_option("--delta-sq", pa.delta_sq, "Diagonal entry of Delta (banded)");
  predict->add_option("--rho-sq", pa.rho_sq, "Band entry of Delta (banded)");
  predict->add_option("--mu1", pa.mu1, "Per-coordinate mean shift (banded)");

  auto* sweep = app.add_subcommand("sweep", "Run the verification sweep and write reports");

  int sphere_d = 3;
  std::int64_t n_mc = 1000000;
  auto* sphere = app.add_subcommand("sphere-check", "Check spherical integrals by Monte Carlo");
  sphere->add_option("--d", sphere_d, "Ambient dimension (>= 2)");
  sphere->add_option("--n-mc", n_mc, "Monte-Carlo points")->check(CLI::Range(2LL, 1LL << 40));

  SimilarityArgs sa;
  auto* similarity = app.add_subcommand("similarity", "Gradient cosine similarity");
  similarity->add_option("--gamma-sq", sa.gamma_sq, "Tr(Delta)^2 / |Delta|_F^2");
  similarity->add_option("--delta-file", sa.delta_file, "CSV file holding a symmetric Delta");
  similarity->add_option("--d", sa.d, "Dimension")->check(CLI::PositiveNumber);
  similarity->add_flag("--table", sa.table, "Print the four asymptotic regime values");
  similarity->add_option("--M", sa.M, "Correlation length for the local regimes")
      ->check(CLI::PositiveNumber);
  similarity->add_option("--rho", sa.rho, "Correlation level for the global regimes");

  MdepArgs ma;
  auto* mdep = app.add_subcommand("mdep-check", "Simulate banded Gaussian pairs vs expansion");
  mdep->add_option("--d", ma.dims, "Dimensions")->delimiter(',');
  mdep->add_option("--M", ma.M, "Bandwidth");
  mdep->add_option("--delta-sq", ma.delta_sq, "Diagonal entry of Delta");
  mdep->add_option("--rho-sq", ma.rho_sq, "Band entry of Delta");
  mdep->add_option("--mu1", ma.mu1, "Per-coordinate mean shift");
  mdep->add_option("--lambda", ma.lambda, "Scale")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*estimate) return cmd_estimate(g, x_file, y_file, out, err);
    if (*predict) return cmd_predict(pa, out, err);
    if (*sweep) return cmd_sweep(g, out, err);
    if (*sphere) return cmd_sphere_check(g, sphere_d, n_mc, out, err);
    if (*similarity) return cmd_similarity(sa, out, err);
    if (*mdep) return cmd_mdep_check(g, ma, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace energy_lab
