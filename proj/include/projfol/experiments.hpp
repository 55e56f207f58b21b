#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "projfol/dimension.hpp"
#include "projfol/exterior.hpp"

namespace projfol {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { Identities, Tails, Marstrand, SphereChains, Energy, AffineCheck };

std::string to_string(ExperimentKind kind);
/// Accepts the JSON spellings (identities, tails, marstrand, sphere_chains,
/// energy, affine_check) and the CLI spellings with dashes.
ExperimentKind parse_experiment(const std::string& name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Identities;
  /// Unset case parameters select the built-in case matrix of the experiment.
  std::optional<Field> field;
  std::optional<int> n;
  std::optional<int> k;
  std::optional<std::uint64_t> samples;
  std::uint64_t seed = 1;
  std::optional<ScaleWindow> window;
  /// Preset name or path to a JSON IFS spec.
  std::optional<std::string> fractal;
  /// Sub-family of cases (tails: neighbourhood, uniform, pointed, sphere;
  /// marstrand: uniform, pointed, sphere-second, chain-third, chain-pointed).
  std::optional<std::string> family;
  int centers = 20;
  std::size_t measure_points = 10000;
  /// Execution-only settings; they never enter the report hash.
  int threads = 0;
  std::string out;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  /// Reads a `schema: 1` document.
  static ExperimentConfig from_json(const nlohmann::json& j);
  /// Echo of every setting that influences results.
  nlohmann::json to_json() const;
};

/// Seed precedence: config file < GM_SEED environment variable < explicit flag.
void apply_seed_override(ExperimentConfig& config, const char* env_value, std::optional<std::uint64_t> flag);

enum class Comparison { Within, AtLeast, AtMost };

std::string to_string(Comparison c);

struct ReportRow {
  std::string name;
  /// Label of the statement under test.
  std::string theorem;
  double predicted = 0.0;
  double estimate = 0.0;
  double tolerance = 0.0;
  Comparison comparison = Comparison::Within;
  /// An INVALID estimate fails regardless of its value.
  bool valid = true;
  bool pass = false;
  nlohmann::json diagnostics = nlohmann::json::object();

  /// Sets `pass` from the comparison; NaN or INVALID estimates fail.
  void judge();
};

/// Plot-ready raw table: case, index, x, y, count, flag.
struct RawRow {
  std::string case_name;
  std::size_t index = 0;
  double x = 0.0;
  double y = 0.0;
  std::uint64_t count = 0;
  int flag = 0;
};

struct ExperimentReport {
  ExperimentKind experiment = ExperimentKind::Identities;
  nlohmann::json config;
  std::vector<ReportRow> rows;
  std::vector<RawRow> raw;
  std::uint64_t rng_audit = 0xcbf29ce484222325ull;
  double wall_seconds = 0.0;
  int threads = 1;

  bool all_pass() const;
  void audit(double value);
  void audit(std::uint64_t value);
  /// Everything except execution details (threads, wall clock).
  nlohmann::json content() const;
  std::uint64_t content_hash() const;
  nlohmann::json to_json() const;
  void write_csv(std::ostream& out) const;
  void write_summary(std::ostream& out) const;
};

/// Randomized checks of the exterior-algebra and projective identities.
/// config.samples trials per identity and (field, n).
ExperimentReport run_identities(const ExperimentConfig& config);
/// Small-r exponents of the neighbourhood and transversality tails.
ExperimentReport run_tails(const ExperimentConfig& config);
/// Median transverse dimension over sampled foliation centres.
ExperimentReport run_marstrand(const ExperimentConfig& config);
/// Boundedness and growth of the averaged projected sigma-energy.
ExperimentReport run_energy(const ExperimentConfig& config);
/// Radial projection from a point at infinity against orthogonal projection
/// in the affine chart.
ExperimentReport run_affine_check(const ExperimentConfig& config);

/// Reduced identity suite, run once per process; Monte Carlo experiments
/// refuse to run when it fails.
bool identity_gate_passes();

class GateFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dispatches on config.experiment, applying the identity gate first for the
/// Monte Carlo experiments. Throws GateFailure if the gate fails.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace projfol
