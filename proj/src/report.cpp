#include <cmath>
#include <cstring>
#include <iomanip>
#include <ostream>

#include "projfol/experiments.hpp"

namespace projfol {

std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::Within: return "within";
    case Comparison::AtLeast: return "at_least";
    case Comparison::AtMost: return "at_most";
  }
  return "unknown";
}

void ReportRow::judge() {
  if (!valid || std::isnan(estimate)) {
    pass = false;
    return;
  }
  switch (comparison) {
    case Comparison::Within: pass = std::abs(estimate - predicted) <= tolerance; break;
    case Comparison::AtLeast: pass = estimate >= predicted - tolerance; break;
    case Comparison::AtMost: pass = estimate <= predicted + tolerance; break;
  }
}

bool ExperimentReport::all_pass() const {
  if (rows.empty()) return false;
  for (const ReportRow& r : rows) {
    if (!r.pass) return false;
  }
  return true;
}

void ExperimentReport::audit(std::uint64_t value) {
  unsigned char bytes[sizeof value];
  std::memcpy(bytes, &value, sizeof value);
  rng_audit = fnv1a(bytes, rng_audit);
}

void ExperimentReport::audit(double value) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof bits);
  audit(bits);
}

namespace {

// JSON has no infinities or NaNs; keep them readable as strings.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

nlohmann::json ExperimentReport::content() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const ReportRow& r : rows) {
    rows_json.push_back({{"name", r.name},
                         {"theorem", r.theorem},
                         {"predicted", number(r.predicted)},
                         {"estimate", number(r.estimate)},
                         {"tolerance", number(r.tolerance)},
                         {"comparison", to_string(r.comparison)},
                         {"valid", r.valid},
                         {"pass", r.pass},
                         {"diagnostics", r.diagnostics}});
  }
  return {{"experiment", to_string(experiment)},
          {"version", kVersion},
          {"config", config},
          {"rows", rows_json},
          {"all_pass", all_pass()},
          {"rng_audit", hex64(rng_audit)}};
}

std::uint64_t ExperimentReport::content_hash() const {
  const std::string text = content().dump();
  return fnv1a(std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j = content();
  j["content_hash"] = hex64(content_hash());
  j["execution"] = {{"threads", threads}, {"wall_clock_seconds", wall_seconds}, {"compiler", __VERSION__}};
  return j;
}

void ExperimentReport::write_csv(std::ostream& out) const {
  out << "case,index,x,y,count,flag\n";
  const auto old = out.precision(17);
  for (const RawRow& r : raw) {
    out << r.case_name << ',' << r.index << ',' << r.x << ',' << r.y << ',' << r.count << ',' << r.flag << '\n';
  }
  out.precision(old);
}

void ExperimentReport::write_summary(std::ostream& out) const {
  for (const ReportRow& r : rows) {
    out << (r.pass ? "PASS " : "FAIL ") << r.name << " [" << r.theorem << "] estimate=" << std::setprecision(6)
        << r.estimate << " predicted=" << r.predicted << ' ' << to_string(r.comparison) << " tol=" << r.tolerance
        << '\n';
  }
  out << (all_pass() ? "all rows pass" : "some rows fail") << " (" << rows.size() << " rows, " << std::fixed
      << std::setprecision(2) << wall_seconds << " s, hash " << hex64(content_hash()) << ")\n";
  out << std::defaultfloat;
}

}  // namespace projfol
