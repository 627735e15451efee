#include "energy_lab/cli.hpp"
#include "energy_lab/distributions.hpp"
#include "energy_lab/expansion.hpp"
#include "energy_lab/sample_io.hpp"
#include "energy_lab/sweep_config.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace energy_lab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("energy_lab_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_samples(const fs::path& p, const RowMatrix& m) {
  std::ofstream f(p);
  write_sample_csv(f, m);
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("estimate: identical files in V-statistic mode give zero") {
  const fs::path dir = scratch("identical");
  const RowMatrix x = sample(make_spec(Gaussian{}, Vector::Zero(3), Matrix::Identity(3, 3)), 200, 4).data;
  write_samples(dir / "x.csv", x);
  const Run r = run({"--mode", "vstat", "estimate", (dir / "x.csv").string(), (dir / "x.csv").string()});
  REQUIRE(r.code == kExitOk);
  const auto f = fields(lines(r.out).at(0));
  REQUIRE(f.size() == 4);
  CHECK(std::stod(f[0]) == 0.0);
  CHECK(f[2] == "200");
  CHECK(f[3] == "200");
}

TEST_CASE("estimate: one-dimensional fixture") {
  const fs::path dir = scratch("fixture");
  write_text(dir / "x.csv", "# x\n0\n1\n2\n");
  write_text(dir / "y.csv", "5\n6\n");
  // U-statistic: 4.5 - (4/3)/2 - 1/2.
  const Run r = run({"estimate", (dir / "x.csv").string(), (dir / "y.csv").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(std::stod(fields(r.out).at(0)) == doctest::Approx(4.5 - 2.0 / 3.0 - 0.5));
  const Run v = run({"--mode", "vstat", "estimate", (dir / "x.csv").string(), (dir / "y.csv").string()});
  CHECK(std::stod(fields(v.out).at(0)) == doctest::Approx(4.5 - 4.0 / 9.0 - 0.25));
}

TEST_CASE("estimate: missing or malformed input is a usage error") {
  const fs::path dir = scratch("bad");
  write_text(dir / "x.csv", "1,2\n3,x\n");
  write_text(dir / "y.csv", "1,2\n3,4\n");
  write_text(dir / "z.csv", "1\n2\n");
  Run r = run({"estimate", (dir / "missing.csv").string(), (dir / "y.csv").string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("missing.csv") != std::string::npos);
  r = run({"estimate", (dir / "x.csv").string(), (dir / "y.csv").string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("row 2") != std::string::npos);
  r = run({"estimate", (dir / "y.csv").string(), (dir / "z.csv").string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("dimension mismatch") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("usage errors and help") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"--threads", "0", "sphere-check"}).code == kExitUsage);
  CHECK(run({"--mode", "median", "sphere-check"}).code == kExitUsage);
  const Run h = run({"--help"});
  CHECK(h.code == kExitOk);
  CHECK(h.out.find("sweep") != std::string::npos);
}

TEST_CASE("invalid thread environment variable is an error") {
  ::setenv("ENERGY_LAB_THREADS", "lots", 1);
  const fs::path dir = scratch("env");
  write_text(dir / "x.csv", "0\n1\n");
  const Run r = run({"estimate", (dir / "x.csv").string(), (dir / "x.csv").string()});
  ::unsetenv("ENERGY_LAB_THREADS");
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("ENERGY_LAB_THREADS") != std::string::npos);
}

TEST_CASE("predict: sample files and banded pair") {
  const fs::path dir = scratch("predict");
  const RowMatrix x =
      sample(make_spec(Gaussian{}, Vector::Constant(4, 0.1), Matrix::Identity(4, 4)), 4000, 1).data;
  const RowMatrix y = sample(make_spec(Gaussian{}, Vector::Zero(4), Matrix::Identity(4, 4)), 4000, 2).data;
  write_samples(dir / "x.csv", x);
  write_samples(dir / "y.csv", y);
  Run r = run({"predict", "--x", (dir / "x.csv").string(), "--y", (dir / "y.csv").string()});
  REQUIRE(r.code == kExitOk);
  auto l = lines(r.out);
  REQUIRE(l.size() == 4);
  CHECK(l[0] == "predictor,lambda,first_order,third_order,total");
  CHECK(l[1].rfind("gaussian,", 0) == 0);
  CHECK(l[2].rfind("spherical,", 0) == 0);
  CHECK(l[3].rfind("asymptotic,", 0) == 0);

  r = run({"predict", "--banded", "--lambda", "4", "--d", "64", "--M", "2", "--rho-sq", "2", "--mu1", "0.1"});
  REQUIRE(r.code == kExitOk);
  l = lines(r.out);
  REQUIRE(l.size() == 3);
  const ExpansionResult m = mdependent_expansion(0.1, 0.0, 4.0, 64, 2, 2.0);
  CHECK(std::stod(fields(l[2]).at(4)) == doctest::Approx(m.total).epsilon(1e-12));
  CHECK(run({"predict"}).code == kExitUsage);
  CHECK(run({"predict", "--banded"}).code == kExitUsage);
}

TEST_CASE("sweep: a config runs twice to identical files") {
  const fs::path dir = scratch("sweep");
  write_text(dir / "tiny.config",
             "[sweep]\ndims = 4\nfamilies = gaussian, exp:0.5\nmu1 = 0.2, 0.4\nn_cov = 3\n"
             "n_samples = 1024\nmoment_samples = 4096\n");
  const std::string cfg = (dir / "tiny.config").string();
  const Run a = run({"--config", cfg, "--out-dir", (dir / "a").string(), "sweep"});
  REQUIRE(a.code == kExitOk);
  const Run b = run({"--config", cfg, "--threads", "2", "--out-dir", (dir / "b").string(), "sweep"});
  REQUIRE(b.code == kExitOk);
  CHECK(a.out == b.out);
  for (const char* name : {"sweep.csv", "fits.csv", "scatter_d4_Gaussian_0.svg", "scatter_d4_ExpScale_0p5.svg"}) {
    INFO(name);
    REQUIRE(fs::exists(dir / "a" / name));
    CHECK(read_text(dir / "a" / name) == read_text(dir / "b" / name));
  }
  CHECK(lines(read_text(dir / "a" / "sweep.csv")).size() == 13);
  const Run seeded = run({"--config", cfg, "--seed", "5", "--out-dir", (dir / "c").string(), "sweep"});
  REQUIRE(seeded.code == kExitOk);
  CHECK(read_text(dir / "a" / "sweep.csv") != read_text(dir / "c" / "sweep.csv"));
}

TEST_CASE("sweep: invalid config key is a usage error naming it") {
  const fs::path dir = scratch("badcfg");
  write_text(dir / "bad.config", "[sweep]\ndims = 4\nsamples = 10\n");
  const Run r = run({"--config", (dir / "bad.config").string(), "--out-dir", (dir / "o").string(), "sweep"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("sweep.samples") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "o"));
}

TEST_CASE("sweep: every dimension and family yields a fit row") {
  const fs::path dir = scratch("families");
  write_text(dir / "all.config",
             "[sweep]\ndims = 16, 32, 64\n"
             "families = gaussian, t:2, t:3, t:5, exp:0.75, exp:1, exp:1.25, sinh:0.05, sinh:0.1, sinh:0.2\n"
             "mu1 = 0.02, 0.06\nn_cov = 3\nn_samples = 1024\nmoment_samples = 8192\n");
  const Run r = run({"--config", (dir / "all.config").string(), "--out-dir", (dir / "o").string(), "sweep"});
  REQUIRE(r.code == kExitOk);
  const auto fit_lines = lines(read_text(dir / "o" / "fits.csv"));
  REQUIRE(fit_lines.size() == 31);
  for (std::size_t i = 1; i < fit_lines.size(); ++i) {
    const auto f = fields(fit_lines[i]);
    REQUIRE(f.size() == 8);
    CHECK(f[7] == "ok");
    CHECK(f[6] == "6");
  }
  CHECK(lines(r.out).size() == 31);
}

TEST_CASE("similarity subcommand") {
  Run r = run({"similarity", "--gamma-sq", "0", "--d", "8"});
  REQUIRE(r.code == kExitOk);
  CHECK(std::stod(fields(lines(r.out).at(1)).at(0)) == doctest::Approx(1.0));
  r = run({"similarity", "--gamma-sq", "8", "--d", "8"});
  CHECK(std::stod(fields(lines(r.out).at(1)).at(0)) == doctest::Approx(cosine_similarity_gamma(8, 8)));
  CHECK(run({"similarity", "--gamma-sq", "9", "--d", "8"}).code == kExitUsage);
  CHECK(run({"similarity", "--gamma-sq", "-1", "--d", "8"}).code == kExitUsage);

  const fs::path dir = scratch("similarity");
  write_text(dir / "delta.csv", "2,0,0,0\n0,1,0,0\n0,0,0,0\n0,0,0,0\n");
  r = run({"similarity", "--delta-file", (dir / "delta.csv").string()});
  REQUIRE(r.code == kExitOk);
  const auto f = fields(lines(r.out).at(1));
  CHECK(std::stod(f[1]) == doctest::Approx(9.0 / 5.0));
  CHECK(std::stod(f[0]) == doctest::Approx(cosine_similarity_gamma(9.0 / 5.0, 4)));

  r = run({"similarity", "--table", "--d", "256", "--M", "4"});
  REQUIRE(r.code == kExitOk);
  CHECK(lines(r.out).size() == 5);
}

TEST_CASE("sphere-check and mdep-check subcommands") {
  Run r = run({"sphere-check", "--d", "3", "--n-mc", "20000"});
  CHECK(r.code == kExitOk);
  CHECK(lines(r.out).size() == 5);
  CHECK(run({"sphere-check", "--d", "1"}).code == kExitUsage);

  r = run({"--n-samples", "1024", "mdep-check", "--d", "8,16", "--M", "1", "--rho-sq", "0.5"});
  REQUIRE(r.code == kExitOk);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 3);
  CHECK(fields(l[1]).at(0) == "8");
  CHECK(fields(l[2]).at(0) == "16");
}

TEST_CASE("shipped smoke config parses") {
  const fs::path dir = scratch("smoke");
  // Only validate: run with a tiny sample override so the test stays quick.
  const Run r = run({"--config", std::string(ENERGY_LAB_CONFIG_DIR) + "/smoke.config", "--n-samples", "1024",
                     "--out-dir", (dir / "o").string(), "sweep"});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(dir / "o" / "sweep.csv"));
}

TEST_CASE("every shipped config is valid") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(ENERGY_LAB_CONFIG_DIR)) {
    if (entry.path().extension() != ".config") continue;
    INFO(entry.path().string());
    const RunConfig c = load_run_config(entry.path());
    CHECK_NOTHROW(c.sweep.validate());
    CHECK(c.out_dir.has_value());
    ++count;
  }
  CHECK(count >= 5);
}
