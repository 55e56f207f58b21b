#include "common.hpp"
#include "projfol/dimension.hpp"
#include "projfol/parallel.hpp"

namespace projfol {

namespace {

enum class Family { Uniform, Pointed, SphereSecond, ChainThird, ChainPointed };

struct FamilyInfo {
  Family family;
  const char* name;
  const char* theorem;
};

constexpr FamilyInfo kFamilies[] = {
    {Family::Uniform, "uniform", "marstrand-uniform"},
    {Family::Pointed, "pointed", "marstrand-pointed"},
    {Family::SphereSecond, "sphere-second", "small-sphere-pencil"},
    {Family::ChainThird, "chain-third", "one-chain-foliation"},
    {Family::ChainPointed, "chain-pointed", "chain-pointed-one-chain"},
};

const FamilyInfo& info(Family f) {
  for (const FamilyInfo& i : kFamilies) {
    if (i.family == f) return i;
  }
  throw std::logic_error("unknown family");
}

struct Case {
  Family family;
  Field field;
  int n;
  int k;
  std::string fractal;
};

bool on_sphere(Family f) { return f == Family::SphereSecond || f == Family::ChainThird || f == Family::ChainPointed; }

/// Predicted transverse dimension cap of the foliation.
double cap(const Case& c) {
  switch (c.family) {
    case Family::Uniform:
    case Family::Pointed:
    case Family::SphereSecond: return c.field.delta() * (c.n - c.k - 1);
    case Family::ChainThird: return 2 * c.n - 2;
    case Family::ChainPointed: return 2 * c.n - 3;
  }
  return 0.0;
}

std::vector<Case> cases_for(const ExperimentConfig& config) {
  std::vector<Family> families;
  if (config.family) {
    for (const FamilyInfo& i : kFamilies) {
      if (*config.family == i.name) families.push_back(i.family);
    }
    if (families.empty()) throw std::invalid_argument("marstrand: unknown family '" + *config.family + "'");
  } else if (config.experiment == ExperimentKind::SphereChains) {
    families = {Family::SphereSecond, Family::ChainThird, Family::ChainPointed};
  } else {
    families = {Family::Uniform, Family::Pointed};
  }
  const bool custom = config.field || config.n || config.k;
  std::vector<Case> out;
  for (Family f : families) {
    std::vector<Case> defaults;
    switch (f) {
      case Family::Uniform:
      case Family::Pointed:
        if (custom) {
          const int n = config.n.value_or(2);
          defaults = {{f, config.field.value_or(Field::real()), n, config.k.value_or(0), "cantor"}};
        } else {
          defaults = {{f, Field::real(), 2, 0, "cantor"},
                      {f, Field::real(), 2, 0, "cantor-product"},
                      {f, Field::complex(), 2, 0, "cantor-product"}};
        }
        break;
      case Family::SphereSecond:
        defaults = {{f, Field::real(), 3, 1, "cantor"}, {f, Field::real(), 3, 1, "cantor-product"}};
        break;
      case Family::ChainThird:
        defaults = {{f, Field::complex(), 2, 0, "cantor-product"}, {f, Field::complex(), 2, 0, "menger"}};
        break;
      case Family::ChainPointed:
        defaults = {{f, Field::complex(), 2, 0, "cantor-product"}};
        break;
    }
    if (on_sphere(f) && custom) {
      for (Case& c : defaults) {
        if (config.field && *config.field != c.field) throw std::invalid_argument("sphere families fix the field");
        if (config.n) c.n = *config.n;
        if (config.k && f == Family::SphereSecond) c.k = *config.k;
      }
    }
    if (config.fractal) {
      defaults.resize(1);
      defaults.front().fractal = *config.fractal;
    }
    out.insert(out.end(), defaults.begin(), defaults.end());
  }
  return out;
}

/// Random hyperplane V with tau(V, p) > 0.1 for every support point.
Decomposable hyperplane_away_from(Rng& rng, const Case& c, const ProjectiveMeasure& m) {
  const int q = c.n + 1;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Decomposable v(q, detail::random_factors(rng, c.field, q, c.n));
    bool clear = true;
    for (const ProjectivePoint& p : m.points) {
      if (tau(v, p.rep()) <= 0.1) {
        clear = false;
        break;
      }
    }
    if (clear) return v;
  }
  throw GeometryError("no hyperplane stays clear of the support");
}

/// Random hyperplane whose trace on the sphere has chart radius >= 0.3.
Decomposable section_hyperplane(Rng& rng, const Case& c) {
  const int q = c.n + 1;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Vector nu = gaussian_vector(rng, c.field, q);
    const double a2 = nu.tail(c.n).squaredNorm();
    const double centre2 = std::norm(nu[0]) / a2;
    if (1.0 - centre2 < 0.09) continue;
    return Decomposable(q, orthonormal_complement(Decomposable::from_vector(nu)));
  }
  throw GeometryError("no hyperplane section of the sphere found");
}

ExperimentReport run_cases(const ExperimentConfig& config) {
  detail::Stopwatch clock;
  ExperimentReport report = detail::start_report(config);
  FitOptions fit;
  if (config.window) fit.window = *config.window;

  for (const Case& c : cases_for(config)) {
    const IfsSpec spec = detail::load_fractal(c.fractal);
    const double s = similarity_dimension(spec);
    const Chart chart{on_sphere(c.family) ? ChartKind::Stereographic : ChartKind::Affine, c.field, c.n};
    const std::string label = std::string(info(c.family).name) + " " + std::string(c.field.name()) +
                              " n=" + std::to_string(c.n) + " k=" + std::to_string(c.k) + " " + spec.name;
    const ProjectiveMeasure measure =
        push_measure(detail::build_chart_measure(spec, chart.chart_dim(), config.measure_points, config.seed), chart);

    Rng setup(config.seed, detail::stream_of("setup " + label));
    const SphereModel sphere{c.field, c.n};
    std::optional<Decomposable> hyperplane;
    if (c.family == Family::Pointed) hyperplane = hyperplane_away_from(setup, c, measure);
    if (c.family == Family::SphereSecond) hyperplane = section_hyperplane(setup, c);
    if (c.family == Family::ChainPointed) {
      std::vector<Vector> span;
      for (int i = 0; i < c.n; ++i) span.push_back(Vector::Unit(c.n + 1, i));
      hyperplane = Decomposable(c.n + 1, span);
    }

    const auto centers = static_cast<std::size_t>(config.centers);
    std::vector<DimensionEstimate> estimates(centers);
    std::vector<char> charged(centers, 0);
    parallel_for(centers, config.threads, [&](std::size_t i) {
      Rng rng(config.seed, detail::stream_of("centre " + label, i));
      std::optional<FoliationCenter> centre;
      switch (c.family) {
        case Family::Uniform: centre = uniform_center(rng, c.field, c.n, c.k); break;
        case Family::Pointed: centre = pointed_center(rng, *hyperplane, c.field, c.k); break;
        case Family::SphereSecond: {
          std::vector<ProjectivePoint> through;
          for (int j = 0; j <= c.k; ++j) through.push_back(uniform_point_on_section(rng, sphere, *hyperplane));
          centre = chain_through_points(through);
          break;
        }
        case Family::ChainThird: {
          const ProjectivePoint u = uniform_sphere_point(rng, sphere);
          centre = chain_through_points(std::span(&u, 1));
          break;
        }
        case Family::ChainPointed: {
          const ProjectivePoint u = uniform_point_on_section(rng, sphere, *hyperplane);
          centre = chain_through_points(std::span(&u, 1));
          break;
        }
      }
      try {
        estimates[i] = transverse_dimension_estimate(measure, *centre, fit);
      } catch (const GeometryError&) {
        charged[i] = 1;
      }
    });

    std::vector<double> values;
    std::size_t invalid = 0, n_charged = 0;
    nlohmann::json per_centre = nlohmann::json::array();
    for (std::size_t i = 0; i < centers; ++i) {
      if (charged[i]) {
        ++n_charged;
        per_centre.push_back(nullptr);
        report.raw.push_back({label, i, std::nan(""), std::nan(""), 0, -1});
        continue;
      }
      const DimensionEstimate& e = estimates[i];
      per_centre.push_back(e.value);
      report.raw.push_back({label, i, e.value, e.fit_residual, e.pair_count, e.valid ? 1 : 0});
      report.audit(e.value);
      if (e.valid) {
        values.push_back(e.value);
      } else {
        ++invalid;
      }
    }

    ReportRow row;
    row.name = label;
    row.theorem = info(c.family).theorem;
    row.predicted = std::min(s, cap(c));
    row.estimate = detail::median(values);
    row.tolerance = on_sphere(c.family) || !c.field.is_real() ? 0.15 : 0.12;
    row.comparison = c.family == Family::ChainPointed ? Comparison::AtLeast : Comparison::Within;
    row.valid = values.size() * 2 > centers && n_charged * 10 <= centers * 3;
    row.diagnostics = {{"similarity_dimension", s},
                       {"cap", cap(c)},
                       {"centers", centers},
                       {"invalid_fits", invalid},
                       {"charged_centers", n_charged},
                       {"per_center", per_centre},
                       {"r_min", fit.window.r_min},
                       {"r_max", fit.window.r_max},
                       {"chart", chart.name()}};
    if (n_charged * 10 > centers * 3) row.diagnostics["note"] = "measure charges the centre neighbourhood too often";
    else if (!row.valid) row.diagnostics["note"] = "too few valid fits";
    report.rows.push_back(row);
  }
  detail::finish_report(report, config, clock);
  return report;
}

}  // namespace

ExperimentReport run_marstrand(const ExperimentConfig& config) { return run_cases(config); }

}  // namespace projfol
