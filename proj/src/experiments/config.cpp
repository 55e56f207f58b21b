#include <charconv>
#include <fstream>
#include <stdexcept>

#include "common.hpp"

namespace projfol {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Identities: return "identities";
    case ExperimentKind::Tails: return "tails";
    case ExperimentKind::Marstrand: return "marstrand";
    case ExperimentKind::SphereChains: return "sphere_chains";
    case ExperimentKind::Energy: return "energy";
    case ExperimentKind::AffineCheck: return "affine_check";
  }
  return "unknown";
}

ExperimentKind parse_experiment(const std::string& name) {
  std::string key = name;
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  for (ExperimentKind k : {ExperimentKind::Identities, ExperimentKind::Tails, ExperimentKind::Marstrand,
                           ExperimentKind::SphereChains, ExperimentKind::Energy, ExperimentKind::AffineCheck}) {
    if (to_string(k) == key) return k;
  }
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (n && (*n < 2 || *n + 1 > kMaxAmbient)) throw std::invalid_argument("n must lie in [2, 12]");
  if (k && *k < 0) throw std::invalid_argument("k must be nonnegative");
  if (n && k && *k > *n - 2) throw std::invalid_argument("need 0 <= k <= n-2");
  if (samples && *samples < 1000) throw std::invalid_argument("samples must be at least 1000");
  if (window && !(window->r_min > 0.0 && window->r_min < window->r_max)) {
    throw std::invalid_argument("window needs 0 < r_min < r_max");
  }
  if (centers < 1) throw std::invalid_argument("centers must be positive");
  if (measure_points < 1000) throw std::invalid_argument("measure_points must be at least 1000");
  if (experiment == ExperimentKind::AffineCheck && field && !field->is_real()) {
    throw std::invalid_argument("affine-check is defined over R only");
  }
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (j.value("schema", 0) != 1) throw std::invalid_argument("config: unsupported schema (expected schema: 1)");
  static const char* const known[] = {"schema", "experiment", "field",  "n",       "k",       "samples",
                                      "seed",   "window",     "fractal", "family", "centers", "measure_points",
                                      "threads", "out"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* name : known) ok = ok || key == name;
    if (!ok) throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  ExperimentConfig c;
  c.experiment = parse_experiment(j.at("experiment").get<std::string>());
  if (j.contains("field")) c.field = Field::parse(j.at("field").get<std::string>());
  if (j.contains("n")) c.n = j.at("n").get<int>();
  if (j.contains("k")) c.k = j.at("k").get<int>();
  if (j.contains("samples")) c.samples = j.at("samples").get<std::uint64_t>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("window")) {
    const auto& w = j.at("window");
    if (w.is_string()) {
      c.window = parse_window(w.get<std::string>());
    } else {
      const auto v = w.get<std::vector<double>>();
      if (v.size() != 2) throw std::invalid_argument("config: window must have two entries");
      c.window = ScaleWindow{v[0], v[1]};
    }
  }
  if (j.contains("fractal")) c.fractal = j.at("fractal").get<std::string>();
  if (j.contains("family")) c.family = j.at("family").get<std::string>();
  if (j.contains("centers")) c.centers = j.at("centers").get<int>();
  if (j.contains("measure_points")) c.measure_points = j.at("measure_points").get<std::size_t>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  c.validate();
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j = {{"schema", 1},   {"experiment", to_string(experiment)}, {"seed", seed},
                      {"centers", centers}, {"measure_points", measure_points}};
  if (field) j["field"] = std::string(field->name());
  if (n) j["n"] = *n;
  if (k) j["k"] = *k;
  if (samples) j["samples"] = *samples;
  if (window) j["window"] = {window->r_min, window->r_max};
  if (fractal) j["fractal"] = *fractal;
  if (family) j["family"] = *family;
  return j;
}

void apply_seed_override(ExperimentConfig& config, const char* env_value, std::optional<std::uint64_t> flag) {
  if (env_value && *env_value) {
    const std::string text(env_value);
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw std::invalid_argument("GM_SEED must be an unsigned integer");
    }
    config.seed = seed;
  }
  if (flag) config.seed = *flag;
}

namespace detail {

IfsSpec load_fractal(const std::string& name_or_path) {
  if (auto p = preset(name_or_path)) return *p;
  std::ifstream in(name_or_path);
  if (!in) throw std::invalid_argument("fractal '" + name_or_path + "' is neither a preset nor a readable file");
  return ifs_from_json(nlohmann::json::parse(in));
}

ChartMeasure build_chart_measure(const IfsSpec& spec, int chart_dim, std::size_t points, std::uint64_t seed) {
  if (spec.dim > chart_dim) throw std::invalid_argument("fractal does not fit into the chart");
  Rng rng(seed, stream_of("measure"));
  const ChartMeasure raw = ifs_attractor_sample(rng, spec, default_depth(spec), points);
  const double diameter = (spec.box_hi - spec.box_lo).norm();
  const Eigen::MatrixXd linear = generic_frame(chart_dim, spec.dim, seed ^ stream_of("frame")) / diameter;
  const Eigen::VectorXd shift = -linear * (0.5 * (spec.box_lo + spec.box_hi));
  return affine_image(raw, linear, shift);
}

ExperimentReport start_report(const ExperimentConfig& config) {
  ExperimentReport r;
  r.experiment = config.experiment;
  r.config = config.to_json();
  r.threads = resolve_threads(config.threads);
  return r;
}

void finish_report(ExperimentReport& report, const ExperimentConfig&, const Stopwatch& clock) {
  for (ReportRow& row : report.rows) row.judge();
  report.wall_seconds = clock.seconds();
}

}  // namespace detail

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.experiment == ExperimentKind::Identities) return run_identities(config);
  if (!identity_gate_passes()) throw GateFailure("identity gate failed; refusing to run Monte Carlo experiments");
  switch (config.experiment) {
    case ExperimentKind::Tails: return run_tails(config);
    case ExperimentKind::Marstrand:
    case ExperimentKind::SphereChains: return run_marstrand(config);
    case ExperimentKind::Energy: return run_energy(config);
    case ExperimentKind::AffineCheck: return run_affine_check(config);
    case ExperimentKind::Identities: break;
  }
  throw std::logic_error("unreachable experiment kind");
}

}  // namespace projfol
