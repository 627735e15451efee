#include "energy_lab/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace energy_lab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line, const char* column) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw std::runtime_error(
        fmt::format("sweep.csv line {}: column '{}' is not a number: '{}'", line, column, s));
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s, std::size_t line, const char* column) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw std::runtime_error(
        fmt::format("sweep.csv line {}: column '{}' is not an integer: '{}'", line, column, s));
  }
  return v;
}

std::string file_stem(const GroupKey& k) {
  std::string stem = fmt::format("scatter_d{}_{}_{}", k.d, k.family, format_number(k.param));
  std::replace(stem.begin(), stem.end(), '.', 'p');
  std::replace(stem.begin(), stem.end(), '-', 'm');
  return stem;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << text;
  f.close();
  if (!f) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

std::vector<GroupFit> fit_groups(std::span<const SweepRecord> records) {
  std::vector<GroupFit> out;
  for (const auto& [key, group] : group_records(records)) {
    GroupFit g;
    g.key = key;
    g.n_records = group.size();
    g.direct_r_squared = kNaN;
    if (group.size() < 3) {
      g.status = "skipped";
    } else {
      try {
        g.fit = fit_cell_group(group, key.label());
        g.status = "ok";
      } catch (const DegenerateDesignError&) {
        g.status = "degenerate";
      }
    }
    if (key.family == family_name(Gaussian{}) && !group.empty()) {
      g.direct_r_squared = gaussian_direct_check(group).r_squared;
    }
    out.push_back(std::move(g));
  }
  return out;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records) {
  out << kSweepHeader << '\n';
  for (const auto& r : records) {
    const auto& f = r.functionals;
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.d, r.family,
                       format_number(r.param), format_number(r.mu1), to_string(r.cov_kind),
                       r.cov_index, r.seed, format_number(r.estimate.value),
                       format_number(r.estimate.std_error), format_number(f.mu_norm_sq),
                       format_number(f.mu_norm_4), format_number(f.delta_frob_sq),
                       format_number(f.trace_sq), format_number(f.beta_dot_mu),
                       format_number(r.feature1), format_number(r.feature2),
                       format_number(r.predicted), join_flags(r.flags));
  }
}

void write_fits_csv(std::ostream& out, std::span<const GroupFit> fits) {
  out << kFitsHeader << '\n';
  for (const auto& g : fits) {
    const double a1 = g.fit ? g.fit->alpha1 : kNaN;
    const double a2 = g.fit ? g.fit->alpha2 : kNaN;
    const double r2 = g.fit ? g.fit->r_squared : kNaN;
    out << fmt::format("{},{},{},{},{},{},{},{}\n", g.key.d, g.key.family,
                       format_number(g.key.param), format_number(a1), format_number(a2),
                       format_number(r2), g.n_records, g.status);
  }
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) {
    throw std::runtime_error("sweep.csv line 1: unexpected header");
  }
  std::vector<SweepRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 18) {
      throw std::runtime_error(
          fmt::format("sweep.csv line {}: expected 18 columns, got {}", line_no, cols.size()));
    }
    SweepRecord r;
    r.d = static_cast<int>(parse_u64(cols[0], line_no, "d"));
    r.family = cols[1];
    r.family_kind = -1;
    for (const Family& f : {Family{Gaussian{}}, Family{MultivariateT{1}}, Family{ExpScale{1}},
                            Family{SinhArcsinhSkew{0}}}) {
      if (family_name(f) == r.family) r.family_kind = family_id(f);
    }
    if (r.family_kind < 0) {
      throw std::runtime_error(
          fmt::format("sweep.csv line {}: unknown family '{}'", line_no, r.family));
    }
    r.param = parse_double(cols[2], line_no, "param");
    r.mu1 = parse_double(cols[3], line_no, "mu1");
    if (cols[4] == to_string(CovarianceKind::Wishart)) {
      r.cov_kind = CovarianceKind::Wishart;
    } else if (cols[4] == to_string(CovarianceKind::ExpDecay)) {
      r.cov_kind = CovarianceKind::ExpDecay;
    } else {
      throw std::runtime_error(
          fmt::format("sweep.csv line {}: unknown cov_kind '{}'", line_no, cols[4]));
    }
    r.cov_index = static_cast<int>(parse_u64(cols[5], line_no, "cov_index"));
    r.seed = parse_u64(cols[6], line_no, "seed");
    r.estimate.value = parse_double(cols[7], line_no, "estimate");
    r.estimate.std_error = parse_double(cols[8], line_no, "std_error");
    r.functionals.mu_norm_sq = parse_double(cols[9], line_no, "f_mu2");
    r.functionals.mu_norm_4 = parse_double(cols[10], line_no, "f_mu4");
    r.functionals.delta_frob_sq = parse_double(cols[11], line_no, "f_frob2");
    r.functionals.trace_sq = parse_double(cols[12], line_no, "f_trace2");
    r.functionals.beta_dot_mu = parse_double(cols[13], line_no, "f_beta_mu");
    r.feature1 = parse_double(cols[14], line_no, "feature1");
    r.feature2 = parse_double(cols[15], line_no, "feature2");
    r.predicted = parse_double(cols[16], line_no, "predicted");
    if (!cols[17].empty()) r.flags = split(cols[17], ';');
    out.push_back(std::move(r));
  }
  return out;
}

std::string scatter_svg(const std::string& title, std::span<const double> predicted,
                        std::span<const double> estimated, double r_squared) {
  constexpr double kSize = 480.0;
  constexpr double kMargin = 60.0;
  const double plot = kSize - 2 * kMargin;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    for (double v : {predicted[i], estimated[i]}) {
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo <= 0.0) hi = lo + (lo != 0.0 ? std::abs(lo) : 1.0);
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto sx = [&](double v) { return kMargin + (v - lo) / (hi - lo) * plot; };
  auto sy = [&](double v) { return kSize - kMargin - (v - lo) / (hi - lo) * plot; };

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" "
      "viewBox=\"0 0 {0} {0}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" "
      "text-anchor=\"middle\">{2}</text>\n"
      "<rect x=\"{3}\" y=\"{3}\" width=\"{4}\" height=\"{4}\" fill=\"none\" stroke=\"black\"/>\n"
      "<line x1=\"{5}\" y1=\"{6}\" x2=\"{7}\" y2=\"{8}\" stroke=\"gray\" "
      "stroke-dasharray=\"4 3\"/>\n",
      kSize, kSize / 2, title, kMargin, plot, sx(lo), sy(lo), sx(hi), sy(hi));
  s += fmt::format(
      "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" "
      "text-anchor=\"middle\">predicted D^2</text>\n",
      kSize / 2, kSize - 20);
  s += fmt::format(
      "<text x=\"20\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"12\" "
      "text-anchor=\"middle\" transform=\"rotate(-90 20 {0})\">estimated D^2</text>\n",
      kSize / 2);
  s += fmt::format(
      "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">R^2 = {:.4f}</text>\n",
      kMargin + 8, kMargin + 18, r_squared);
  s += fmt::format(
      "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>\n"
      "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" "
      "text-anchor=\"end\">{}</text>\n",
      kMargin, kSize - kMargin + 14, fmt::format("{:.3g}", lo), kSize - kMargin,
      kSize - kMargin + 14, fmt::format("{:.3g}", hi));
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double px = std::isfinite(predicted[i]) ? sx(predicted[i]) : kMargin;
    const double py = std::isfinite(estimated[i]) ? sy(estimated[i]) : kSize - kMargin;
    s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"steelblue\"/>\n", px, py);
  }
  s += "</svg>\n";
  return s;
}

std::vector<std::filesystem::path> emit_report(std::span<const SweepRecord> records,
                                               std::span<const GroupFit> fits,
                                               const std::filesystem::path& out_dir) {
  if (records.empty()) throw std::invalid_argument("no records to report");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" + out_dir.string() +
                             "': " + ec.message());
  }
  std::vector<std::filesystem::path> written;

  std::ostringstream sweep;
  write_sweep_csv(sweep, records);
  written.push_back(out_dir / "sweep.csv");
  write_file(written.back(), sweep.str());

  std::ostringstream fits_text;
  write_fits_csv(fits_text, fits);
  written.push_back(out_dir / "fits.csv");
  write_file(written.back(), fits_text.str());

  const auto groups = group_records(records);
  for (const auto& g : fits) {
    const auto it = groups.find(g.key);
    if (it == groups.end()) continue;
    const auto& group = it->second;
    std::vector<double> predicted;
    std::vector<double> estimated;
    double r2 = kNaN;
    if (g.key.family == family_name(Gaussian{})) {
      for (const auto& r : group) predicted.push_back(r.predicted);
      r2 = g.direct_r_squared;
    } else if (g.fit) {
      for (const auto& r : group) {
        predicted.push_back(g.fit->alpha1 * r.feature1 + g.fit->alpha2 * r.feature2);
      }
      r2 = g.fit->r_squared;
    } else {
      continue;
    }
    for (const auto& r : group) estimated.push_back(r.estimate.value);
    written.push_back(out_dir / (file_stem(g.key) + ".svg"));
    write_file(written.back(), scatter_svg(g.key.label(), predicted, estimated, r2));
  }
  return written;
}

void write_summary(std::ostream& out, std::span<const GroupFit> fits) {
  out << "d,family,param,r_squared,direct_r_squared,n_records,status\n";
  for (const auto& g : fits) {
    out << fmt::format("{},{},{},{},{},{},{}\n", g.key.d, g.key.family, format_number(g.key.param),
                       format_number(g.fit ? g.fit->r_squared : kNaN),
                       format_number(g.direct_r_squared), g.n_records, g.status);
  }
}

}  // namespace energy_lab
