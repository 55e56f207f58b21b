#include <array>
#include <numbers>

#include "common.hpp"
#include "projfol/parallel.hpp"

namespace projfol {

namespace {

/// Uniform point of the closed unit disc.
Vector disc_point(Rng& rng) {
  const double r = std::sqrt(rng.uniform());
  const double a = 2.0 * std::numbers::pi * rng.uniform();
  Vector x(2);
  x << r * std::cos(a), r * std::sin(a);
  return x;
}

}  // namespace

ExperimentReport run_affine_check(const ExperimentConfig& config) {
  detail::Stopwatch clock;
  ExperimentReport report = detail::start_report(config);
  const Field field = Field::real();
  const std::uint64_t pairs = config.samples.value_or(10'000);
  constexpr std::uint64_t kChunk = 1000;
  const std::uint64_t chunks = (pairs + kChunk - 1) / kChunk;

  Rng setup(config.seed, detail::stream_of("affine direction"));
  const double angle = 2.0 * std::numbers::pi * setup.uniform();
  const double v0 = std::cos(angle), v1 = std::sin(angle);
  Vector at_infinity(3);
  at_infinity << 0.0, v0, v1;
  const FoliationCenter centre(Decomposable::from_vector(at_infinity), field);
  // Signed coordinate of x along the normal of v.
  const auto across = [&](const Vector& x) { return std::real(-v1 * x[0] + v0 * x[1]); };
  const auto image = [&](const Vector& x) { return proj_radial(centre, affine_chart(x, field)); };

  struct Partial {
    double min_ratio = INFINITY, max_ratio = 0.0, formula_gap = 0.0, order_gap = 0.0;
  };
  std::vector<Partial> parts(chunks);
  std::vector<std::array<double, 3>> audit(pairs);
  parallel_for(chunks, config.threads, [&](std::size_t chunk) {
    Rng rng(config.seed, detail::stream_of("affine pairs", chunk));
    Partial& p = parts[chunk];
    const std::uint64_t end = std::min<std::uint64_t>(pairs, (chunk + 1) * kChunk);
    for (std::uint64_t s = chunk * kChunk; s < end; ++s) {
      const Vector x = disc_point(rng), y = disc_point(rng), z = disc_point(rng);
      const double gap = std::abs(across(x) - across(y));
      const double d = codomain_distance(image(x), image(y));
      if (gap > 1e-6) {
        const double ratio = d / gap;
        p.min_ratio = std::min(p.min_ratio, ratio);
        p.max_ratio = std::max(p.max_ratio, ratio);
        const double ax = across(x), ay = across(y);
        const double closed = 1.0 / std::sqrt((1.0 + ax * ax) * (1.0 + ay * ay));
        p.formula_gap = std::max(p.formula_gap, std::abs(ratio - closed));
        audit[s] = {ratio, closed, d};
      }
      // Leaves through a point at infinity form a pencil, so angles add in order.
      std::array<Vector, 3> pts = {x, y, z};
      std::sort(pts.begin(), pts.end(), [&](const Vector& a, const Vector& b) { return across(a) < across(b); });
      const ProjectedPoint a = image(pts[0]), b = image(pts[1]), c = image(pts[2]);
      const double lhs = std::asin(codomain_distance(a, b)) + std::asin(codomain_distance(b, c));
      p.order_gap = std::max(p.order_gap, std::abs(lhs - std::asin(codomain_distance(a, c))));
    }
  });

  Partial total;
  for (const Partial& p : parts) {
    total.min_ratio = std::min(total.min_ratio, p.min_ratio);
    total.max_ratio = std::max(total.max_ratio, p.max_ratio);
    total.formula_gap = std::max(total.formula_gap, p.formula_gap);
    total.order_gap = std::max(total.order_gap, p.order_gap);
  }
  for (std::uint64_t s = 0; s < pairs; ++s) {
    report.audit(audit[s][0]);
    if (s < 1000) report.raw.push_back({"ratio", s, audit[s][1], audit[s][0], 1, 0});
  }

  const nlohmann::json diag = {{"pairs", pairs}, {"direction", {v0, v1}}, {"domain", "unit disc"}};
  const auto add = [&](std::string name, double predicted, double estimate, double tol, Comparison cmp) {
    ReportRow row;
    row.name = std::move(name);
    row.theorem = "affine-projection-comparison";
    row.predicted = predicted;
    row.estimate = estimate;
    row.tolerance = tol;
    row.comparison = cmp;
    row.diagnostics = diag;
    report.rows.push_back(row);
  };
  add("min distance ratio", 0.25, total.min_ratio, 0.0, Comparison::AtLeast);
  add("max distance ratio", 4.0, total.max_ratio, 0.0, Comparison::AtMost);
  add("closed form ratio gap", 0.0, total.formula_gap, 1e-9, Comparison::AtMost);
  add("pencil angle additivity gap", 0.0, total.order_gap, 1e-9, Comparison::AtMost);
  detail::finish_report(report, config, clock);
  return report;
}

}  // namespace projfol
