#include <doctest.h>

#include <sstream>

#include "projfol/experiments.hpp"

using namespace projfol;

namespace {

nlohmann::json base(const char* experiment) { return {{"schema", 1}, {"experiment", experiment}}; }

ExperimentConfig small(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  c.samples = 1000;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("experiment names parse in both spellings") {
  CHECK(parse_experiment("sphere-chains") == ExperimentKind::SphereChains);
  CHECK(parse_experiment("sphere_chains") == ExperimentKind::SphereChains);
  CHECK(parse_experiment("affine-check") == ExperimentKind::AffineCheck);
  CHECK(to_string(ExperimentKind::Energy) == "energy");
  CHECK_THROWS_AS(parse_experiment("fourier"), std::invalid_argument);
}

TEST_CASE("config JSON is strict") {
  nlohmann::json j = base("tails");
  j["field"] = "C";
  j["n"] = 3;
  j["k"] = 1;
  j["window"] = "0.01:0.1";
  j["seed"] = 99;
  const ExperimentConfig c = ExperimentConfig::from_json(j);
  CHECK(c.experiment == ExperimentKind::Tails);
  CHECK(*c.field == Field::complex());
  CHECK(*c.n == 3);
  CHECK(c.seed == 99);
  CHECK(c.window->r_max == 0.1);
  const ExperimentConfig echo = ExperimentConfig::from_json(c.to_json());
  CHECK(echo.to_json() == c.to_json());

  nlohmann::json bad = base("tails");
  bad["sedd"] = 1;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), std::invalid_argument);
  bad = base("tails");
  bad["schema"] = 2;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), std::invalid_argument);
  bad = base("tails");
  bad["n"] = 2;
  bad["k"] = 1;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), std::invalid_argument);
  bad = base("tails");
  bad["samples"] = 10;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), std::invalid_argument);
  bad = base("tails");
  bad["window"] = {0.2, 0.1};
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), std::invalid_argument);
  bad = base("affine_check");
  bad["field"] = "C";
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), std::invalid_argument);
  CHECK_THROWS(ExperimentConfig::from_json(nlohmann::json::array()));
}

TEST_CASE("seed precedence: config, then environment, then flag") {
  ExperimentConfig c;
  c.seed = 5;
  apply_seed_override(c, nullptr, std::nullopt);
  CHECK(c.seed == 5);
  apply_seed_override(c, "", std::nullopt);
  CHECK(c.seed == 5);
  apply_seed_override(c, "17", std::nullopt);
  CHECK(c.seed == 17);
  apply_seed_override(c, "17", 23);
  CHECK(c.seed == 23);
  CHECK_THROWS_AS(apply_seed_override(c, "12x", std::nullopt), std::invalid_argument);
}

TEST_CASE("row verdicts") {
  ReportRow r;
  r.predicted = 1.0;
  r.tolerance = 0.1;
  r.estimate = 1.05;
  r.judge();
  CHECK(r.pass);
  r.estimate = 1.2;
  r.judge();
  CHECK_FALSE(r.pass);
  r.comparison = Comparison::AtLeast;
  r.judge();
  CHECK(r.pass);
  r.estimate = 0.85;
  r.judge();
  CHECK_FALSE(r.pass);
  r.comparison = Comparison::AtMost;
  r.judge();
  CHECK(r.pass);
  r.estimate = std::nan("");
  r.judge();
  CHECK_FALSE(r.pass);
  r.estimate = 1.0;
  r.valid = false;
  r.judge();
  CHECK_FALSE(r.pass);
}

TEST_CASE("identity suite on a small matrix") {
  ExperimentConfig c = small(ExperimentKind::Identities);
  c.field = Field::complex();
  c.n = 3;
  const ExperimentReport r = run_identities(c);
  bool saw_product = false;
  for (const ReportRow& row : r.rows) {
    CHECK_FALSE(row.theorem.empty());
    saw_product = saw_product || row.name.rfind("product-formula", 0) == 0;
    const bool gated = row.diagnostics.value("gated", true);
    if (gated) CHECK_MESSAGE(row.pass, row.name);
  }
  CHECK(saw_product);
  CHECK(run_identities(c).content_hash() == r.content_hash());
}

TEST_CASE("reports hash content but not execution details") {
  ExperimentConfig c = small(ExperimentKind::AffineCheck);
  const ExperimentReport one = run_experiment(c);
  c.threads = 3;
  c.out = "somewhere.json";
  const ExperimentReport three = run_experiment(c);
  CHECK(one.all_pass());
  CHECK(one.content_hash() == three.content_hash());
  CHECK(one.content().dump() == three.content().dump());
  CHECK(one.to_json().at("execution").contains("wall_clock_seconds"));
  CHECK_FALSE(one.content().contains("execution"));
  c.seed = 2;
  CHECK(run_experiment(c).content_hash() != one.content_hash());

  std::ostringstream csv, summary;
  one.write_csv(csv);
  one.write_summary(summary);
  CHECK(csv.str().rfind("case,index,x,y,count,flag", 0) == 0);
  CHECK(summary.str().find("PASS") != std::string::npos);
}

TEST_CASE("small Monte Carlo runs produce judged rows") {
  ExperimentConfig tails = small(ExperimentKind::Tails);
  tails.samples = 20000;
  tails.family = "neighbourhood";
  tails.field = Field::real();
  tails.n = 2;
  tails.k = 0;
  const ExperimentReport t = run_experiment(tails);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].predicted == 2.0);

  ExperimentConfig m = small(ExperimentKind::Marstrand);
  m.family = "uniform";
  m.fractal = "cantor";
  m.field = Field::real();
  m.n = 2;
  m.centers = 3;
  m.measure_points = 1500;
  const ExperimentReport mr = run_experiment(m);
  REQUIRE(mr.rows.size() == 1);
  CHECK(mr.rows[0].predicted == doctest::Approx(std::log(2.0) / std::log(3.0)));
  CHECK(mr.rows[0].diagnostics.at("per_center").size() == 3);

  ExperimentConfig e = small(ExperimentKind::Energy);
  e.fractal = "cantor";
  e.centers = 3;
  e.measure_points = 1600;
  const ExperimentReport er = run_experiment(e);
  REQUIRE(er.rows.size() == 3);
  CHECK(er.rows[0].pass);  // sigma = 0 energy is exact

  ExperimentConfig bad = small(ExperimentKind::Marstrand);
  bad.family = "no-such-family";
  CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
}
