#include "energy_lab/estimators.hpp"

#include "energy_lab/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

namespace energy_lab {

std::string to_string(EstimatorMode mode) {
  return mode == EstimatorMode::UStat ? "ustat" : "vstat";
}

EstimatorMode parse_estimator_mode(const std::string& text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "ustat") return EstimatorMode::UStat;
  if (lower == "vstat") return EstimatorMode::VStat;
  throw std::invalid_argument("unknown estimator mode '" + text + "' (expected ustat or vstat)");
}

namespace {

constexpr Eigen::Index kRowBlock = 64;
constexpr int kLanes = 8;

// Adds |a - b_j| for j in [jc, jend) to per-lane sums (lane = j mod kLanes).
void accumulate_lanes(
    const double* ai, const double* bt, Eigen::Index nb, Eigen::Index d, Eigen::Index jc,
    Eigen::Index jend, std::array<double, kLanes>& lanes) {
  for (Eigen::Index j = jc; j < jend; j += kLanes) {
    double acc[kLanes] = {};
    for (Eigen::Index k = 0; k < d; ++k) {
      const double ak = ai[k];
      const double* bk = bt + k * nb + j;
      for (int t = 0; t < kLanes; ++t) {
        const double diff = ak - bk[t];
        acc[t] += diff * diff;
      }
    }
    for (int t = 0; t < kLanes; ++t) lanes[t] += std::sqrt(acc[t]);
  }
}

// 1-d case: sum_j |a_i - b_j| from sorted b and prefix sums, O((Na + Nb) log Nb).
std::vector<double> row_sums_1d(const SampleView& a, const SampleView& b) {
  std::vector<double> sorted(static_cast<std::size_t>(b.rows()));
  for (Eigen::Index t = 0; t < b.rows(); ++t) sorted[static_cast<std::size_t>(t)] = b(t, 0);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> prefix(sorted.size() + 1, 0.0);
  for (std::size_t t = 0; t < sorted.size(); ++t) prefix[t + 1] = prefix[t] + sorted[t];
  const double total = prefix.back();
  const auto nb = static_cast<double>(sorted.size());
  std::vector<double> out(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double v = a(i, 0);
    const auto k = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), v) -
                                            sorted.begin());
    const double below = prefix[k];
    const auto kd = static_cast<double>(k);
    out[static_cast<std::size_t>(i)] = (v * kd - below) + ((total - below) - v * (nb - kd));
  }
  return out;
}

}  // namespace

std::vector<double> pairwise_row_sums(const SampleView& a, const SampleView& b, unsigned threads) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument(
        fmt::format("sample dimension mismatch: {} vs {}", a.cols(), b.cols()));
  }
  if (a.cols() == 1) return row_sums_1d(a, b);

  const Eigen::Index d = a.cols();
  const Eigen::Index nb = b.rows();
  // Coordinate-major copy of b: for fixed k the values b_{j,k} are contiguous,
  // so kLanes distances accumulate side by side in a fixed per-lane order.
  const RowMatrix bt = b.transpose();
  std::vector<double> out(static_cast<std::size_t>(a.rows()));
  const auto n_blocks = static_cast<std::size_t>((a.rows() + kRowBlock - 1) / kRowBlock);

  const Eigen::Index full = nb - nb % kLanes;
  // Columns of bt per cache block (about 32 KiB), a multiple of kLanes.
  const Eigen::Index chunk =
      std::max<Eigen::Index>(kLanes, (Eigen::Index{4096} / std::max<Eigen::Index>(d, 1)) / kLanes * kLanes);

  parallel_for(n_blocks, threads, [&](std::size_t block) {
    const Eigen::Index begin = static_cast<Eigen::Index>(block) * kRowBlock;
    const Eigen::Index end = std::min(a.rows(), begin + kRowBlock);
    std::vector<std::array<double, kLanes>> lane_sum(static_cast<std::size_t>(end - begin));
    // Each lane accumulates its distances in increasing j, independent of blocking.
    for (Eigen::Index jc = 0; jc < full; jc += chunk) {
      const Eigen::Index jend = std::min(full, jc + chunk);
      for (Eigen::Index i = begin; i < end; ++i) {
        const double* ai = a.data() + i * a.outerStride();
        auto& lanes = lane_sum[static_cast<std::size_t>(i - begin)];
        accumulate_lanes(ai, bt.data(), nb, d, jc, jend, lanes);
      }
    }
    for (Eigen::Index i = begin; i < end; ++i) {
      const double* ai = a.data() + i * a.outerStride();
      double tail = 0.0;
      for (Eigen::Index j = full; j < nb; ++j) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
          const double diff = ai[k] - bt(k, j);
          acc += diff * diff;
        }
        tail += std::sqrt(acc);
      }
      CompensatedSum row;
      for (double s : lane_sum[static_cast<std::size_t>(i - begin)]) row.add(s);
      row.add(tail);
      out[static_cast<std::size_t>(i)] = row.value();
    }
  });
  return out;
}

namespace {

double compensated_total(const std::vector<double>& values) {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value();
}

}  // namespace

double energy_score(const SampleView& forecast, const Vector& observation, unsigned threads) {
  const auto n = forecast.rows();
  if (n < 2) throw std::invalid_argument("energy_score needs at least 2 forecast rows");
  if (observation.size() != forecast.cols()) {
    throw std::invalid_argument(fmt::format("observation has {} entries, forecast has {} columns",
                                            observation.size(), forecast.cols()));
  }
  const RowMatrix obs = observation.transpose();
  const double to_obs = compensated_total(pairwise_row_sums(forecast, obs, threads));
  const double within = compensated_total(pairwise_row_sums(forecast, forecast, threads));
  const auto nd = static_cast<double>(n);
  return to_obs / nd - within / (2.0 * nd * (nd - 1.0));
}

double averaged_energy_score(std::span<const RowMatrix> forecasts,
                             std::span<const Vector> observations, unsigned threads) {
  if (forecasts.size() != observations.size()) {
    throw std::invalid_argument(fmt::format("{} forecasts but {} observations", forecasts.size(),
                                            observations.size()));
  }
  if (forecasts.empty()) throw std::invalid_argument("averaged_energy_score needs a time step");
  CompensatedSum total;
  for (std::size_t t = 0; t < forecasts.size(); ++t) {
    total.add(energy_score(forecasts[t], observations[t], threads));
  }
  return total.value() / static_cast<double>(forecasts.size());
}

EstimateWithError energy_distance_sq(const SampleView& x_in, const SampleView& y_in,
                                     const EstimatorOptions& options) {
  if (x_in.cols() != y_in.cols()) {
    throw std::invalid_argument(
        fmt::format("sample dimension mismatch: {} vs {}", x_in.cols(), y_in.cols()));
  }
  Eigen::Index nx_rows = x_in.rows();
  Eigen::Index ny_rows = y_in.rows();
  if (options.max_pairs) {
    if (*options.max_pairs < 4) throw std::invalid_argument("max_pairs must be at least 4");
    const auto cap = static_cast<Eigen::Index>(std::sqrt(static_cast<double>(*options.max_pairs)));
    if (nx_rows * ny_rows > *options.max_pairs) {
      nx_rows = std::min(nx_rows, cap);
      ny_rows = std::min(ny_rows, cap);
    }
  }
  if (nx_rows < 2 || ny_rows < 2) {
    throw std::invalid_argument(fmt::format(
        "energy distance needs at least 2 rows per sample, got {} and {}", nx_rows, ny_rows));
  }
  const SampleView x = x_in.topRows(nx_rows);
  const SampleView y = y_in.topRows(ny_rows);

  const std::vector<double> cross = pairwise_row_sums(x, y, options.threads);
  const std::vector<double> within_x = pairwise_row_sums(x, x, options.threads);
  const std::vector<double> within_y = pairwise_row_sums(y, y, options.threads);
  const double s_xy = compensated_total(cross);
  const double s_xx = compensated_total(within_x);
  const double s_yy = compensated_total(within_y);

  const bool ustat = options.mode == EstimatorMode::UStat;
  auto within_norm = [ustat](double n) { return ustat ? n * (n - 1.0) : n * n; };
  const auto nx = static_cast<double>(nx_rows);
  const auto ny = static_cast<double>(ny_rows);
  const double yy_term = 0.5 * s_yy / within_norm(ny);

  EstimateWithError est;
  est.n_x = nx_rows;
  est.n_y = ny_rows;
  est.value = s_xy / (nx * ny) - 0.5 * s_xx / within_norm(nx) - yy_term;

  // Leave-one-out over x rows; the U form needs three rows for a defined
  // within-x average after deletion.
  if (nx_rows >= (ustat ? 3 : 2)) {
    std::vector<double> loo(within_x.size());
    CompensatedSum mean_acc;
    for (std::size_t i = 0; i < loo.size(); ++i) {
      const double cross_i = (s_xy - cross[i]) / ((nx - 1.0) * ny);
      const double xx_i = (s_xx - 2.0 * within_x[i]) / within_norm(nx - 1.0);
      loo[i] = cross_i - 0.5 * xx_i - yy_term;
      mean_acc.add(loo[i]);
    }
    const double mean = mean_acc.value() / nx;
    CompensatedSum ss;
    for (double v : loo) ss.add((v - mean) * (v - mean));
    est.std_error = std::sqrt((nx - 1.0) / nx * ss.value());
  }
  return est;
}

}  // namespace energy_lab
