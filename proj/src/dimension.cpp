#include "projfol/dimension.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace projfol {

ScaleWindow parse_window(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("window must look like RMIN:RMAX");
  ScaleWindow w;
  try {
    std::size_t used = 0;
    w.r_min = std::stod(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("trailing characters");
    const std::string rest = text.substr(colon + 1);
    w.r_max = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("window must look like RMIN:RMAX, got '" + text + "'");
  }
  if (!(w.r_min > 0.0 && w.r_min < w.r_max)) throw std::invalid_argument("window needs 0 < RMIN < RMAX");
  return w;
}

nlohmann::json DimensionEstimate::to_json() const {
  return {{"value", value},     {"r_min", window.r_min}, {"r_max", window.r_max},
          {"residual", fit_residual}, {"pairs", pair_count}, {"valid", valid}};
}

std::vector<double> dyadic_grid(const FitOptions& options) {
  const ScaleWindow& w = options.window;
  if (!(w.r_min > 0.0 && w.r_min < w.r_max)) throw std::invalid_argument("scale window needs 0 < r_min < r_max");
  if (options.steps_per_octave < 1) throw std::invalid_argument("steps_per_octave must be positive");
  std::vector<double> grid;
  for (int j = 0;; ++j) {
    const double r = w.r_min * std::exp2(static_cast<double>(j) / options.steps_per_octave);
    if (r > w.r_max * (1.0 + 1e-12)) break;
    grid.push_back(r);
  }
  return grid;
}

DimensionEstimate fit_power_law(std::span<const double> r, std::span<const double> y,
                                std::span<const std::uint64_t> hits, const FitOptions& options) {
  DimensionEstimate e;
  e.window = options.window;
  std::vector<double> xs, ys, ws;
  for (std::size_t g = 0; g < r.size(); ++g) {
    if (hits[g] < options.min_hits || !(y[g] > 0.0)) continue;
    xs.push_back(std::log(r[g]));
    ys.push_back(std::log(y[g]));
    ws.push_back(options.weight_by_hits ? static_cast<double>(hits[g]) : 1.0);
  }
  e.points_used = static_cast<int>(xs.size());
  if (xs.size() < 2) {
    e.valid = false;
    e.note = "fewer than two scales survive pruning";
    return e;
  }
  const double k = static_cast<double>(xs.size());
  double sw = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sw += ws[i];
    mx += ws[i] * xs[i];
    my += ws[i] * ys[i];
  }
  mx /= sw;
  my /= sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
    sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double res = ys[i] - (my + slope * (xs[i] - mx));
    sse += res * res;
  }
  e.value = slope;
  e.fit_residual = std::sqrt(sse / k);
  e.valid = e.fit_residual <= options.residual_bound;
  if (!e.valid) e.note = "fit residual above bound";
  return e;
}

void PairHistogram::merge(const PairHistogram& other) {
  for (std::size_t b = 0; b < hits.size(); ++b) {
    hits[b] += other.hits[b];
    mass[b] += other.mass[b];
  }
  pairs += other.pairs;
  total_mass += other.total_mass;
}

LineCloud LineCloud::from_points(const ProjectiveMeasure& m) {
  if (m.size() == 0) throw std::invalid_argument("LineCloud: empty measure");
  LineCloud cloud(m.points.front().ambient_dim(), m.points.front().field().is_real());
  for (const ProjectivePoint& p : m.points) cloud.add(p.rep());
  return cloud;
}

void LineCloud::add(const Eigen::VectorXcd& unit) {
  if (unit.size() != dim_) throw std::invalid_argument("LineCloud: dimension mismatch");
  for (int i = 0; i < dim_; ++i) {
    re_.push_back(unit[i].real());
    if (!real_) im_.push_back(unit[i].imag());
  }
  ++count_;
}

void LineCloud::add(const Vector& unit) { add(Eigen::VectorXcd(unit)); }

EuclideanCloud::EuclideanCloud(const ChartMeasure& m) : count_(m.size()) {
  if (count_ == 0) return;
  dim_ = static_cast<int>(m.points.front().size());
  x_.reserve(count_ * static_cast<std::size_t>(dim_));
  for (const Eigen::VectorXd& p : m.points) {
    if (p.size() != dim_) throw std::invalid_argument("EuclideanCloud: ragged points");
    x_.insert(x_.end(), p.data(), p.data() + dim_);
  }
}

double EuclideanCloud::operator()(std::size_t i, std::size_t j) const {
  const double* a = x_.data() + i * static_cast<std::size_t>(dim_);
  const double* b = x_.data() + j * static_cast<std::size_t>(dim_);
  double s = 0.0;
  for (int t = 0; t < dim_; ++t) s += (a[t] - b[t]) * (a[t] - b[t]);
  return std::sqrt(s);
}

DimensionEstimate correlation_fit(const PairHistogram& h, const FitOptions& fit, std::size_t points) {
  const std::vector<double> grid = dyadic_grid(fit);
  std::vector<double> c(grid.size());
  std::vector<std::uint64_t> hits(grid.size());
  std::uint64_t cum_hits = 0;
  double cum_mass = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    cum_hits += h.hits[g];
    cum_mass += h.mass[g];
    hits[g] = cum_hits;
    c[g] = h.total_mass > 0.0 ? cum_mass / h.total_mass : 0.0;
  }
  if (h.pairs == 0) {
    DimensionEstimate e;
    e.window = fit.window;
    e.valid = true;
    e.points_used = static_cast<int>(points);
    e.note = "no distinct pairs";
    return e;
  }
  DimensionEstimate e = fit_power_law(grid, c, hits, fit);
  e.pair_count = h.pairs;
  e.points_used = static_cast<int>(points);
  return e;
}

DimensionEstimate correlation_dimension(const ChartMeasure& m, const FitOptions& fit, const PairOptions& options) {
  return correlation_dimension(EuclideanCloud(m), m.weights, fit, options);
}

DimensionEstimate correlation_dimension(const ProjectiveMeasure& m, const FitOptions& fit,
                                        const PairOptions& options) {
  if (m.size() == 0) throw std::invalid_argument("correlation_dimension: empty measure");
  return correlation_dimension(LineCloud::from_points(m), m.weights, fit, options);
}

DimensionEstimate tail_exponent(std::span<const double> samples, const FitOptions& fit) {
  if (samples.size() < 10000) throw std::invalid_argument("tail_exponent: needs at least 1e4 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::vector<double> grid = dyadic_grid(fit);
  std::vector<double> cdf(grid.size());
  std::vector<std::uint64_t> hits(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto count = static_cast<std::uint64_t>(std::upper_bound(sorted.begin(), sorted.end(), grid[g]) - sorted.begin());
    hits[g] = count;
    cdf[g] = static_cast<double>(count) / static_cast<double>(sorted.size());
  }
  DimensionEstimate e = fit_power_law(grid, cdf, hits, fit);
  e.pair_count = samples.size();
  return e;
}

ProjectedSupport project_support(const ProjectiveMeasure& m, const FoliationCenter& center, double exclusion) {
  const int grade = center.center().grade() + 1;
  ProjectedSupport out{LineCloud(binomial(center.ambient_dim(), grade), center.field().is_real()), {}, 0};
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto image = try_proj_radial(center, m.points[i], exclusion);
    if (!image) {
      ++out.excluded;
      continue;
    }
    out.cloud.add(image->rep.coeffs());
    out.weights.push_back(m.weights[i]);
  }
  return out;
}

DimensionEstimate transverse_dimension_estimate(const ProjectiveMeasure& m, const FoliationCenter& center,
                                                const FitOptions& fit, const PairOptions& options,
                                                double exclusion) {
  if (m.size() == 0) throw std::invalid_argument("transverse_dimension_estimate: empty measure");
  ProjectedSupport p = project_support(m, center, exclusion);
  if (p.excluded * 10 > m.size()) {
    throw GeometryError("transverse_dimension_estimate: more than 10% of the support lies near the centre");
  }
  double kept_mass = 0.0;
  for (double w : p.weights) kept_mass += w;
  for (double& w : p.weights) w /= kept_mass;
  DimensionEstimate e = correlation_dimension(p.cloud, p.weights, fit, options);
  e.excluded = p.excluded;
  if (e.note.empty()) e.note = "estimate on one sampled support; a lower-bound proxy for arbitrary sets";
  return e;
}

}  // namespace projfol
