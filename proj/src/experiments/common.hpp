#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "projfol/experiments.hpp"
#include "projfol/fractal.hpp"
#include "projfol/sampling.hpp"

namespace projfol::detail {

/// Stable stream id for a named sub-computation.
inline std::uint64_t stream_of(std::string_view label, std::uint64_t index = 0) {
  const std::uint64_t h = fnv1a(std::span(reinterpret_cast<const unsigned char*>(label.data()), label.size()));
  return h ^ (index * 0x9e3779b97f4a7c15ull);
}

inline std::vector<Vector> random_factors(Rng& rng, Field field, int ambient, int count) {
  std::vector<Vector> f;
  f.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vector v = gaussian_vector(rng, field, ambient);
    f.push_back(v / v.norm());
  }
  return f;
}

inline double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Resolves a preset name or a JSON spec path.
IfsSpec load_fractal(const std::string& name_or_path);

/// Natural measure of the spec, centred at the chart origin with diameter at
/// most 1, lifted into R^chart_dim through a generic isometry.
ChartMeasure build_chart_measure(const IfsSpec& spec, int chart_dim, std::size_t points, std::uint64_t seed);

ExperimentReport start_report(const ExperimentConfig& config);
void finish_report(ExperimentReport& report, const ExperimentConfig& config, const Stopwatch& clock);

}  // namespace projfol::detail
