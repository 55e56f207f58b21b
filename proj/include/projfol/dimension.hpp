#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "projfol/fractal.hpp"
#include "projfol/parallel.hpp"
#include "projfol/projective.hpp"
#include "projfol/sampling.hpp"

namespace projfol {

struct ScaleWindow {
  double r_min = 0x1p-9;
  double r_max = 0x1p-3;
};

/// Parses "RMIN:RMAX"; throws std::invalid_argument unless 0 < RMIN < RMAX.
ScaleWindow parse_window(const std::string& text);

struct FitOptions {
  ScaleWindow window;
  /// Grid points per factor of two.
  int steps_per_octave = 1;
  /// Grid points backed by fewer hits are dropped before fitting.
  std::uint64_t min_hits = 50;
  /// RMS residual bound in log space; larger residuals mark the fit INVALID.
  double residual_bound = 0.05;
  /// Weight each scale by its hit count, the inverse Poisson variance of the
  /// log count. Suits independent samples; pair counts are correlated.
  bool weight_by_hits = false;
};

struct DimensionEstimate {
  double value = 0.0;
  ScaleWindow window;
  double fit_residual = 0.0;
  std::uint64_t pair_count = 0;
  int points_used = 0;
  bool valid = false;
  std::size_t excluded = 0;
  std::string note;

  nlohmann::json to_json() const;
};

/// r_min * 2^(j / steps) for j = 0, 1, ... while <= r_max.
std::vector<double> dyadic_grid(const FitOptions& options);

/// Least-squares slope of log y against log r over grid points with enough
/// hits, optionally weighted by the hit counts.
DimensionEstimate fit_power_law(std::span<const double> r, std::span<const double> y,
                                std::span<const std::uint64_t> hits, const FitOptions& options);

/// Unit vectors of K^m stored contiguously, with the sine metric
/// sqrt(1 - |<a, b>|^2). Small distances are recomputed from the 2x2 minors
/// to avoid cancellation.
class LineCloud {
 public:
  LineCloud(int dim, bool real) : dim_(dim), real_(real) {}
  static LineCloud from_points(const ProjectiveMeasure& m);

  void add(const Eigen::VectorXcd& unit);
  void add(const Vector& unit);
  std::size_t size() const { return count_; }
  int dim() const { return dim_; }
  inline double operator()(std::size_t i, std::size_t j) const;

 private:
  int dim_;
  bool real_;
  std::size_t count_ = 0;
  std::vector<double> re_;
  std::vector<double> im_;
};

inline double LineCloud::operator()(std::size_t i, std::size_t j) const {
  const double* ar = re_.data() + i * static_cast<std::size_t>(dim_);
  const double* br = re_.data() + j * static_cast<std::size_t>(dim_);
  if (real_) {
    double c = 0.0;
    for (int t = 0; t < dim_; ++t) c += ar[t] * br[t];
    double d2 = 1.0 - c * c;
    if (d2 < 1e-4) {
      d2 = 0.0;
      for (int s = 0; s < dim_; ++s)
        for (int t = s + 1; t < dim_; ++t) {
          const double m = ar[s] * br[t] - ar[t] * br[s];
          d2 += m * m;
        }
    }
    return std::sqrt(std::clamp(d2, 0.0, 1.0));
  }
  const double* ai = im_.data() + i * static_cast<std::size_t>(dim_);
  const double* bi = im_.data() + j * static_cast<std::size_t>(dim_);
  // <a, b> = sum conj(a) b
  double cr = 0.0, ci = 0.0;
  for (int t = 0; t < dim_; ++t) {
    cr += ar[t] * br[t] + ai[t] * bi[t];
    ci += ar[t] * bi[t] - ai[t] * br[t];
  }
  double d2 = 1.0 - (cr * cr + ci * ci);
  if (d2 < 1e-4) {
    d2 = 0.0;
    for (int s = 0; s < dim_; ++s)
      for (int t = s + 1; t < dim_; ++t) {
        // a_s b_t - a_t b_s
        const double mr = (ar[s] * br[t] - ai[s] * bi[t]) - (ar[t] * br[s] - ai[t] * bi[s]);
        const double mi = (ar[s] * bi[t] + ai[s] * br[t]) - (ar[t] * bi[s] + ai[t] * br[s]);
        d2 += mr * mr + mi * mi;
      }
  }
  return std::sqrt(std::clamp(d2, 0.0, 1.0));
}

class EuclideanCloud {
 public:
  explicit EuclideanCloud(const ChartMeasure& m);
  std::size_t size() const { return count_; }
  double operator()(std::size_t i, std::size_t j) const;

 private:
  int dim_ = 0;
  std::size_t count_ = 0;
  std::vector<double> x_;
};

struct PairOptions {
  int threads = 1;
  /// Beyond this many points the pair sum is estimated from random pairs.
  std::size_t exact_limit = 20000;
  std::uint64_t subsample_pairs = 10'000'000;
  std::uint64_t seed = 0;
};

/// Pair counts and weights with distance <= grid[b], accumulated per bin.
struct PairHistogram {
  std::vector<std::uint64_t> hits;
  std::vector<double> mass;
  std::uint64_t pairs = 0;
  double total_mass = 0.0;

  void merge(const PairHistogram& other);
};

namespace detail {

inline constexpr std::size_t kRowsPerChunk = 64;

/// Index of the first grid point >= d; grid.size() when d exceeds the grid.
inline std::size_t grid_bin(double d, double r_min, double steps, std::size_t bins) {
  if (d <= r_min) return 0;
  double b = std::ceil(std::log2(d / r_min) * steps - 1e-9);
  if (!(b < static_cast<double>(bins))) return bins;
  return static_cast<std::size_t>(b);
}

}  // namespace detail

/// Histogram of pairwise distances of a weighted cloud over the dyadic grid.
/// Distinct pairs only. Deterministic for any thread count.
template <class Metric>
PairHistogram pair_histogram(const Metric& metric, std::span<const double> weights, const FitOptions& fit,
                             const PairOptions& options) {
  const std::vector<double> grid = dyadic_grid(fit);
  const std::size_t bins = grid.size();
  const std::size_t n = metric.size();
  const double steps = fit.steps_per_octave;
  const double r_top = bins ? grid.back() : 0.0;
  auto fresh = [&] {
    PairHistogram h;
    h.hits.assign(bins + 1, 0);
    h.mass.assign(bins + 1, 0.0);
    return h;
  };
  auto record = [&](PairHistogram& h, std::size_t i, std::size_t j) {
    const double w = weights[i] * weights[j];
    const double d = metric(i, j);
    const std::size_t b = d > r_top ? bins : detail::grid_bin(d, fit.window.r_min, steps, bins);
    ++h.hits[b];
    h.mass[b] += w;
    ++h.pairs;
    h.total_mass += w;
  };

  std::vector<PairHistogram> parts;
  if (n <= options.exact_limit) {
    const std::size_t chunks = (n + detail::kRowsPerChunk - 1) / detail::kRowsPerChunk;
    parts.assign(chunks, fresh());
    parallel_for(chunks, options.threads, [&](std::size_t c) {
      const std::size_t end = std::min(n, (c + 1) * detail::kRowsPerChunk);
      for (std::size_t i = c * detail::kRowsPerChunk; i < end; ++i)
        for (std::size_t j = i + 1; j < n; ++j) record(parts[c], i, j);
    });
  } else {
    constexpr std::uint64_t kPairsPerChunk = 1u << 16;
    const std::size_t chunks = static_cast<std::size_t>((options.subsample_pairs + kPairsPerChunk - 1) / kPairsPerChunk);
    parts.assign(chunks, fresh());
    parallel_for(chunks, options.threads, [&](std::size_t c) {
      Rng rng(options.seed, 0x7061697273ull + c);
      const std::uint64_t begin = c * kPairsPerChunk;
      const std::uint64_t end = std::min(options.subsample_pairs, begin + kPairsPerChunk);
      for (std::uint64_t p = begin; p < end; ++p) {
        const std::size_t i = rng.below(n);
        std::size_t j = rng.below(n - 1);
        if (j >= i) ++j;
        record(parts[c], i, j);
      }
    });
  }
  PairHistogram total = fresh();
  for (const PairHistogram& h : parts) total.merge(h);
  return total;
}

/// Fits log C(r) against log r from a pair histogram.
DimensionEstimate correlation_fit(const PairHistogram& h, const FitOptions& fit, std::size_t points);

/// Correlation dimension: slope of the weighted fraction of distinct pairs
/// within distance r. A single atom, or a cloud whose pairs all coincide,
/// has dimension 0.
template <class Metric>
DimensionEstimate correlation_dimension(const Metric& metric, std::span<const double> weights, const FitOptions& fit,
                                        const PairOptions& options = {}) {
  return correlation_fit(pair_histogram(metric, weights, fit, options), fit, metric.size());
}

DimensionEstimate correlation_dimension(const ChartMeasure& m, const FitOptions& fit, const PairOptions& options = {});
DimensionEstimate correlation_dimension(const ProjectiveMeasure& m, const FitOptions& fit,
                                        const PairOptions& options = {});

/// Greedy epsilon-net covering numbers N(eps) over the grid; the estimate is
/// the slope of log N(eps) against log(1/eps). Scales where the net has fewer
/// than 2 centres or more than size/min_points_per_ball centres are dropped.
template <class Metric>
DimensionEstimate box_counting_dimension(const Metric& metric, const FitOptions& fit,
                                         std::size_t min_points_per_ball = 10) {
  const std::vector<double> grid = dyadic_grid(fit);
  const std::size_t n = metric.size();
  std::vector<double> inverse_count(grid.size());
  std::vector<std::uint64_t> usable(grid.size());
  std::vector<std::size_t> centres;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    centres.clear();
    for (std::size_t i = 0; i < n; ++i) {
      bool covered = false;
      for (std::size_t c : centres) {
        if (metric(i, c) <= grid[g]) {
          covered = true;
          break;
        }
      }
      if (!covered) centres.push_back(i);
    }
    const double count = static_cast<double>(std::max<std::size_t>(centres.size(), 1));
    inverse_count[g] = 1.0 / count;  // ~ eps^D
    usable[g] = (centres.size() >= 2 && centres.size() * min_points_per_ball <= n) ? fit.min_hits : 0;
  }
  DimensionEstimate e = fit_power_law(grid, inverse_count, usable, fit);
  e.points_used = static_cast<int>(n);
  return e;
}

/// Sum over distinct pairs of w_i w_j d^-sigma; +inf if a distinct pair
/// coincides (d == 0) and sigma > 0.
template <class Metric>
double energy_integral(const Metric& metric, std::span<const double> weights, double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("energy_integral: sigma must be nonnegative");
  const std::size_t n = metric.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = metric(i, j);
      if (d == 0.0 && sigma > 0.0) return std::numeric_limits<double>::infinity();
      sum += 2.0 * weights[i] * weights[j] * (sigma == 0.0 ? 1.0 : std::pow(d, -sigma));
    }
  }
  return sum;
}

/// Energies of the uniform measures on the nested prefixes [0, sizes[p]) for
/// every sigma: result[p][s] = N_p^-2 sum over distinct pairs below N_p of
/// d^-sigmas[s]. One pass over the pairs of the largest prefix.
template <class Metric>
std::vector<std::vector<double>> nested_energy_profile(const Metric& metric, std::span<const std::size_t> sizes,
                                                       std::span<const double> sigmas, int threads = 1) {
  if (sizes.empty()) return {};
  for (std::size_t p = 1; p < sizes.size(); ++p) {
    if (sizes[p] <= sizes[p - 1]) throw std::invalid_argument("nested_energy_profile: sizes must increase");
  }
  const std::size_t n = sizes.back();
  if (n > metric.size()) throw std::invalid_argument("nested_energy_profile: prefix exceeds the cloud");
  const std::size_t ns = sigmas.size();
  const std::size_t chunks = (n + detail::kRowsPerChunk - 1) / detail::kRowsPerChunk;
  // sums[c][p * ns + s]: pairs (i, j), i < j, whose larger index j falls in prefix bucket p.
  std::vector<std::vector<double>> sums(chunks, std::vector<double>(sizes.size() * ns, 0.0));
  std::vector<char> infinite(chunks, 0);
  parallel_for(chunks, threads, [&](std::size_t c) {
    std::vector<double>& acc = sums[c];
    const std::size_t end = std::min(n, (c + 1) * detail::kRowsPerChunk);
    for (std::size_t i = c * detail::kRowsPerChunk; i < end; ++i) {
      std::size_t bucket = 0;
      for (std::size_t j = i + 1; j < n; ++j) {
        while (j >= sizes[bucket]) ++bucket;
        const double d = metric(i, j);
        if (d == 0.0) {
          infinite[c] = 1;
          for (std::size_t s = 0; s < ns; ++s) acc[bucket * ns + s] += sigmas[s] == 0.0 ? 1.0 : 0.0;
          continue;
        }
        const double log_d = std::log(d);
        for (std::size_t s = 0; s < ns; ++s) acc[bucket * ns + s] += std::exp(-sigmas[s] * log_d);
      }
    }
  });
  bool any_infinite = false;
  for (char f : infinite) any_infinite = any_infinite || f;
  std::vector<std::vector<double>> out(sizes.size(), std::vector<double>(ns, 0.0));
  std::vector<double> running(ns, 0.0);
  for (std::size_t p = 0; p < sizes.size(); ++p) {
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t c = 0; c < chunks; ++c) running[s] += sums[c][p * ns + s];
      const double np = static_cast<double>(sizes[p]);
      out[p][s] = (any_infinite && sigmas[s] > 0.0) ? std::numeric_limits<double>::infinity()
                                                    : 2.0 * running[s] / (np * np);
    }
  }
  return out;
}

/// Slope of the empirical CDF of `samples` (log-log) over the grid. Needs at
/// least 1e4 samples; +inf entries count towards the total but never hit.
DimensionEstimate tail_exponent(std::span<const double> samples, const FitOptions& fit);

/// Images of the support under Proj_U, as unit coefficient vectors, with the
/// weights of the kept points (not renormalized).
struct ProjectedSupport {
  LineCloud cloud;
  std::vector<double> weights;
  std::size_t excluded = 0;
};

ProjectedSupport project_support(const ProjectiveMeasure& m, const FoliationCenter& center,
                                 double exclusion = kDefaultExclusion);

/// Projects the support through Proj_U and estimates the correlation dimension
/// in the codomain metric. Points within the exclusion radius of L_U are
/// dropped and counted; more than 10% dropped is an error.
DimensionEstimate transverse_dimension_estimate(const ProjectiveMeasure& m, const FoliationCenter& center,
                                                const FitOptions& fit, const PairOptions& options = {},
                                                double exclusion = kDefaultExclusion);

}  // namespace projfol
