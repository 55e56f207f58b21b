#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "projfol/experiments.hpp"
#include "projfol/fractal.hpp"
#include "projfol/sampling.hpp"

namespace {

enum ExitCode { kPass = 0, kFail = 1, kUsage = 2, kGate = 3, kError = 4 };

struct Flags {
  std::string config_path;
  std::string field;
  std::optional<int> n, k, centers;
  std::optional<std::uint64_t> samples, seed, points;
  std::string window, fractal, family, out;
  std::optional<int> threads;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "JSON config (schema 1); flags override its fields");
  app->add_option("--field", f.field, "R or C");
  app->add_option("--n", f.n, "projective dimension");
  app->add_option("--k", f.k, "centre dimension");
  app->add_option("--samples", f.samples, "Monte Carlo sample count");
  app->add_option("--seed", f.seed, "RNG seed (overrides GM_SEED and the config)");
  app->add_option("--window", f.window, "fit window RMIN:RMAX");
  app->add_option("--fractal", f.fractal, "preset name or JSON IFS file");
  app->add_option("--family", f.family, "restrict to one case family");
  app->add_option("--centers", f.centers, "foliation centres per case");
  app->add_option("--points", f.points, "support points per measure");
  app->add_option("--threads", f.threads, "worker threads (0 = hardware)");
  app->add_option("--out", f.out, "report path (.json plus .csv), or - for JSON on stdout");
}

projfol::ExperimentConfig build_config(projfol::ExperimentKind kind, const Flags& f) {
  projfol::ExperimentConfig c;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw std::invalid_argument("cannot read config '" + f.config_path + "'");
    c = projfol::ExperimentConfig::from_json(nlohmann::json::parse(in));
    if (c.experiment != kind) throw std::invalid_argument("config is for experiment '" + to_string(c.experiment) + "'");
  }
  c.experiment = kind;
  if (!f.field.empty()) c.field = projfol::Field::parse(f.field);
  if (f.n) c.n = f.n;
  if (f.k) c.k = f.k;
  if (f.samples) c.samples = f.samples;
  if (!f.window.empty()) c.window = projfol::parse_window(f.window);
  if (!f.fractal.empty()) c.fractal = f.fractal;
  if (!f.family.empty()) c.family = f.family;
  if (f.centers) c.centers = *f.centers;
  if (f.points) c.measure_points = *f.points;
  if (f.threads) c.threads = *f.threads;
  if (!f.out.empty()) c.out = f.out;
  projfol::apply_seed_override(c, std::getenv("GM_SEED"), f.seed);
  c.validate();
  return c;
}

int emit(const projfol::ExperimentReport& report, const std::string& out) {
  if (out == "-") {
    std::cout << report.to_json().dump(2) << '\n';
    report.write_summary(std::cerr);
  } else {
    if (!out.empty()) {
      std::filesystem::path json_path(out);
      std::ofstream js(json_path);
      if (!js) throw std::runtime_error("cannot write '" + out + "'");
      js << report.to_json().dump(2) << '\n';
      std::ofstream csv(std::filesystem::path(json_path).replace_extension(".csv"));
      report.write_csv(csv);
    }
    report.write_summary(std::cout);
  }
  return report.all_pass() ? kPass : kFail;
}

int write_cloud(const Flags& f, const std::string& chart_name) {
  using namespace projfol;
  const IfsSpec spec = preset(f.fractal.empty() ? "cantor" : f.fractal).value_or(IfsSpec{});
  if (spec.maps.empty()) throw std::invalid_argument("unknown preset '" + f.fractal + "'");
  Rng rng(f.seed.value_or(1), 0);
  const ChartMeasure m = ifs_attractor_sample(rng, spec, default_depth(spec), f.points.value_or(10000));
  CloudHeader header{chart_name, f.field.empty() ? "R" : f.field, f.n.value_or(spec.dim), f.seed.value_or(1),
                     hex64(spec.content_hash())};
  if (f.out.empty() || f.out == "-") {
    write_point_cloud_csv(std::cout, m, header);
  } else {
    std::ofstream out(f.out);
    write_point_cloud_csv(out, m, header);
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projective foliations: identity checks and dimension experiments"};
  app.set_version_flag("--version", std::string(projfol::kVersion));
  app.require_subcommand(1);

  Flags flags;
  const std::pair<const char*, projfol::ExperimentKind> commands[] = {
      {"identities", projfol::ExperimentKind::Identities},
      {"tails", projfol::ExperimentKind::Tails},
      {"marstrand", projfol::ExperimentKind::Marstrand},
      {"sphere-chains", projfol::ExperimentKind::SphereChains},
      {"energy", projfol::ExperimentKind::Energy},
      {"affine-check", projfol::ExperimentKind::AffineCheck},
  };
  std::vector<std::pair<CLI::App*, projfol::ExperimentKind>> subs;
  for (const auto& [name, kind] : commands) {
    CLI::App* sub = app.add_subcommand(name, "run the " + std::string(name) + " experiment");
    add_common(sub, flags);
    subs.emplace_back(sub, kind);
  }
  CLI::App* cloud = app.add_subcommand("cloud", "sample a preset fractal and write its point cloud as CSV");
  cloud->add_option("--fractal", flags.fractal, "preset name");
  cloud->add_option("--points", flags.points, "number of points");
  cloud->add_option("--seed", flags.seed, "RNG seed");
  cloud->add_option("--out", flags.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (cloud->parsed()) return write_cloud(flags, "none");
    for (const auto& [sub, kind] : subs) {
      if (!sub->parsed()) continue;
      const projfol::ExperimentConfig config = build_config(kind, flags);
      return emit(projfol::run_experiment(config), config.out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const projfol::GateFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kGate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kUsage;
}
