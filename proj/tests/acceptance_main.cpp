// Acceptance run: one PASS/FAIL line per criterion at full sample sizes.
// Exit status is nonzero when any criterion fails unexpectedly.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "blade_oracle.hpp"
#include "projfol/experiments.hpp"

using namespace projfol;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  /// Failure explained by a stated relation that does not hold.
  bool expected_failure = false;
};

struct Timed {
  ExperimentReport report;
  double seconds = 0.0;
};

Timed timed_run(const ExperimentConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Timed t{run_experiment(c), 0.0};
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

ExperimentConfig config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  c.seed = 1;
  c.threads = 0;
  return c;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

/// Pass iff every row passes and the run finished in time; lists failing rows.
Outcome all_rows(const Timed& t, double budget_seconds) {
  Outcome o{true, "", false};
  int failed = 0;
  std::string names;
  for (const ReportRow& r : t.report.rows) {
    if (r.pass) continue;
    ++failed;
    if (failed <= 4) names += (names.empty() ? "" : "; ") + r.name + " est=" + fmt(r.estimate);
  }
  o.pass = failed == 0 && t.seconds < budget_seconds;
  o.detail = std::to_string(t.report.rows.size() - failed) + "/" + std::to_string(t.report.rows.size()) +
             " rows pass, " + fmt(t.seconds) + " s (budget " + fmt(budget_seconds) + " s)";
  if (failed) o.detail += "; failing: " + names + (failed > 4 ? "; ..." : "");
  return o;
}

Outcome identities() {
  const Timed t = timed_run(config(ExperimentKind::Identities));
  Outcome o = all_rows(t, 30.0);
  double worst = 0.0;
  bool only_intersection = true;
  for (const ReportRow& r : t.report.rows) {
    const bool stated_inequality = r.name.rfind("intersection-transversality ", 0) == 0;
    if (!stated_inequality) worst = std::max(worst, r.estimate);
    if (!r.pass && !stated_inequality) only_intersection = false;
  }
  o.detail += "; max error outside the intersection inequality " + fmt(worst);
  if (!o.pass && only_intersection && t.seconds < 30.0) {
    o.expected_failure = true;
    o.detail += "; the stated intersection inequality fails on random inputs (its upper-bound direction holds, "
                "see the intersection-sandwich rows)";
  }
  return o;
}

Outcome hodge_regressive() {
  ExperimentConfig c = config(ExperimentKind::Identities);
  const Timed t = timed_run(c);
  Outcome o{true, "", false};
  int rows = 0;
  double star_err = 0.0, span_err = 0.0;
  for (const ReportRow& r : t.report.rows) {
    if (r.name.rfind("double-star ", 0) == 0) {
      star_err = std::max(star_err, r.estimate);
      ++rows;
    } else if (r.name.rfind("regressive-span ", 0) == 0) {
      span_err = std::max(span_err, r.estimate);
      ++rows;
    }
  }
  int checked = 0, mismatches = 0;
  for (int dim : {3, 4}) {
    const oracle::Tally tally = oracle::check_all_blades(dim);
    checked += tally.checked;
    mismatches += tally.mismatches;
  }
  o.pass = rows == 12 && star_err == 0.0 && span_err <= 1e-9 && mismatches == 0;
  o.detail = "double star max error " + fmt(star_err) + ", regressive span max error " + fmt(span_err) +
             ", blade oracle " + std::to_string(checked - mismatches) + "/" + std::to_string(checked) + " exact";
  return o;
}

Outcome tails_family(const char* family, double budget) {
  ExperimentConfig c = config(ExperimentKind::Tails);
  c.family = family;
  return all_rows(timed_run(c), budget);
}

Outcome transversality() {
  // Uniform and sphere families carry the criterion; the pointed variant is
  // held to the same bound.
  Outcome total{true, "", false};
  double seconds = 0.0;
  for (const char* family : {"uniform", "pointed", "sphere"}) {
    ExperimentConfig c = config(ExperimentKind::Tails);
    c.family = family;
    const Timed t = timed_run(c);
    seconds += t.seconds;
    const Outcome o = all_rows(t, 300.0);
    total.pass = total.pass && o.pass;
    total.detail += std::string(total.detail.empty() ? "" : " | ") + family + ": " + o.detail;
  }
  total.pass = total.pass && seconds < 300.0;
  total.detail += " | total " + fmt(seconds) + " s (budget 300 s)";
  return total;
}

Outcome marstrand(ExperimentKind kind, const char* family) {
  ExperimentConfig c = config(kind);
  if (family) c.family = family;
  const Timed t = timed_run(c);
  Outcome o = all_rows(t, 300.0);
  std::string medians;
  for (const ReportRow& r : t.report.rows) medians += (medians.empty() ? "" : ", ") + r.name + "=" + fmt(r.estimate);
  o.detail += "; medians: " + medians;
  return o;
}

Outcome determinism() {
  std::vector<ExperimentConfig> configs;
  ExperimentConfig c = config(ExperimentKind::Identities);
  c.samples = 1000;
  configs.push_back(c);
  c = config(ExperimentKind::Tails);
  c.samples = 100000;
  configs.push_back(c);
  c = config(ExperimentKind::Marstrand);
  c.centers = 4;
  c.measure_points = 2000;
  configs.push_back(c);
  c = config(ExperimentKind::SphereChains);
  c.centers = 3;
  c.measure_points = 2000;
  configs.push_back(c);
  c = config(ExperimentKind::Energy);
  c.centers = 4;
  c.measure_points = 1600;
  configs.push_back(c);
  c = config(ExperimentKind::AffineCheck);
  c.samples = 2000;
  configs.push_back(c);

  Outcome o{true, "", false};
  for (ExperimentConfig& cfg : configs) {
    cfg.threads = 1;
    const std::uint64_t one = run_experiment(cfg).content_hash();
    cfg.threads = 4;
    const std::uint64_t four = run_experiment(cfg).content_hash();
    const bool same = one == four;
    o.pass = o.pass && same;
    o.detail += std::string(o.detail.empty() ? "" : ", ") + to_string(cfg.experiment) + (same ? " same" : " DIFFERENT");
  }
  o.detail = "threads 1 vs 4 report hashes: " + o.detail;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"C1 identity suite max relative error < 1e-8 within 30 s", identities},
      {"C2 double star exact, regressive spans, blade oracle", hodge_regressive},
      {"C3 neighbourhood tail exponents within 0.1", [] { return tails_family("neighbourhood", 120.0); }},
      {"C4 transversality tail exponents at least prediction - 0.15", transversality},
      {"C5 transverse dimension, uniform centres", [] { return marstrand(ExperimentKind::Marstrand, "uniform"); }},
      {"C6 transverse dimension, pointed centres", [] { return marstrand(ExperimentKind::Marstrand, "pointed"); }},
      {"C7 sphere and chain foliations", [] { return marstrand(ExperimentKind::SphereChains, nullptr); }},
      {"C8 averaged projected energy brackets the dimension",
       [] { return all_rows(timed_run(config(ExperimentKind::Energy)), 300.0); }},
      {"C9 affine chart comparison on 1e4 pairs", [] {
         ExperimentConfig c = config(ExperimentKind::AffineCheck);
         c.samples = 10000;
         return all_rows(timed_run(c), 300.0);
       }},
      {"C10 report hash independent of thread count", determinism},
  };

  int unexpected = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), false};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " -- " << o.detail
              << (!o.pass && o.expected_failure ? " [expected failure]" : "") << std::endl;
    if (!o.pass && !o.expected_failure) ++unexpected;
  }
  std::cout << (unexpected ? "unexpected failures: " + std::to_string(unexpected) : std::string("no unexpected failures"))
            << std::endl;
  return unexpected ? 1 : 0;
}
