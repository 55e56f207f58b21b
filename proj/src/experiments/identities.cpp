#include <functional>

#include <Eigen/SVD>

#include "common.hpp"
#include "projfol/parallel.hpp"

namespace projfol {

namespace {

using detail::random_factors;
using detail::relative_gap;

/// One randomized identity: returns the error of a single trial.
struct Identity {
  std::string name;
  std::string theorem;
  std::function<double(Rng&, Field, int)> trial;
  /// Part of the pre-flight gate; statements known to fail stay out.
  bool gated = true;
};

int pick(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); }

Decomposable random_decomposable(Rng& rng, Field field, int q, int grade) {
  return Decomposable(q, random_factors(rng, field, q, grade)).normalized();
}

std::vector<Vector> projected_factors(Rng& rng, Field field, int q, int count, const Decomposable& v) {
  std::vector<Vector> out;
  for (const Vector& g : random_factors(rng, field, q, count)) out.push_back(project_orthogonal_complement(g, v));
  return out;
}

double orthogonal_block_product(Rng& rng, Field field, int q) {
  const int l = pick(rng, 1, q - 1);
  const int k = pick(rng, 1, q - l);
  const Decomposable v = random_decomposable(rng, field, q, l);
  const KVector u1 = Decomposable(q, projected_factors(rng, field, q, k, v)).blade();
  const KVector u2 = Decomposable(q, projected_factors(rng, field, q, k, v)).blade();
  const Scalar lhs = gram_inner(wedge(u1, v.blade()), wedge(u2, v.blade()));
  const Scalar rhs = gram_inner(u1, u2) * gram_inner(v.blade(), v.blade());
  return std::abs(lhs - rhs) / (norm(u1) * norm(u2) * v.norm() * v.norm());
}

double norm_submultiplicative(Rng& rng, Field field, int q) {
  const int k = pick(rng, 1, q - 1);
  const int l = pick(rng, 1, q - k);
  const KVector u = random_decomposable(rng, field, q, k).blade();
  const KVector v = random_decomposable(rng, field, q, l).blade();
  const double bound = norm(u) * norm(v);
  return std::max(0.0, norm(wedge(u, v)) - bound) / bound;
}

double norm_orthogonal_equality(Rng& rng, Field field, int q) {
  const int l = pick(rng, 1, q - 1);
  const int k = pick(rng, 1, q - l);
  const Decomposable v = random_decomposable(rng, field, q, l);
  const KVector u = Decomposable(q, projected_factors(rng, field, q, k, v)).blade();
  const double bound = norm(u) * v.norm();
  return std::abs(norm(wedge(u, v.blade())) - bound) / bound;
}

double projection_functor(Rng& rng, Field field, int q) {
  const int l = pick(rng, 1, q - 1);
  const int k = pick(rng, 1, q - l);
  const Decomposable v = random_decomposable(rng, field, q, l);
  const Decomposable u = random_decomposable(rng, field, q, k);
  std::vector<Vector> projected;
  for (const Vector& f : u.factors()) projected.push_back(project_orthogonal_complement(f, v));
  const double lhs = norm(wedge(u.blade(), v.blade()));
  const double rhs = wedge_all(q, projected).coeffs().norm() * v.norm();
  return std::abs(lhs - rhs) / (u.norm() * v.norm());
}

double first_distance_formula(Rng& rng, Field field, int q) {
  const int k = pick(rng, 1, q - 1);
  const Decomposable u = random_decomposable(rng, field, q, k);
  const ProjectivePoint w(gaussian_vector(rng, field, q), field);
  // Oracle: residual of w after orthogonal projection onto the column space.
  Eigen::MatrixXcd a(q, k);
  for (int j = 0; j < k; ++j) a.col(j) = u.factors()[static_cast<std::size_t>(j)];
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  const Eigen::MatrixXcd qthin = qr.householderQ() * Eigen::MatrixXcd::Identity(q, k);
  const Eigen::VectorXcd wv = w.rep();
  const double oracle = (wv - qthin * (qthin.adjoint() * wv)).norm();
  return relative_gap(distance_to_subspace(w, u), oracle);
}

double product_formula(Rng& rng, Field field, int q) {
  const int p = pick(rng, 1, q - 2);
  const Decomposable v = random_decomposable(rng, field, q, p);
  const std::vector<Vector> w = random_factors(rng, field, q, 2);
  const KVector a = wedge(v.blade(), KVector::from_vector(w[0]));
  const KVector b = wedge(v.blade(), KVector::from_vector(w[1]));
  const double lhs = pair_wedge_norm(a, b);
  const double rhs = v.norm() * norm(wedge(a, KVector::from_vector(w[1])));
  return std::abs(lhs - rhs) / (norm(a) * norm(b));
}

double two_path_modulus(Rng& rng, Field field, int q) {
  const int n = q - 1;
  const FoliationCenter c = uniform_center(rng, field, n, pick(rng, 0, n - 2));
  const ProjectivePoint w1 = uniform_projective_point(rng, field, n);
  const ProjectivePoint w2 = uniform_projective_point(rng, field, n);
  // Stay clear of the exclusion radius.
  if (tau(c.center(), w1.rep()) <= 1e-2 || tau(c.center(), w2.rep()) <= 1e-2) return 0.0;
  return relative_gap(lipschitz_modulus(c, w1, w2), lipschitz_modulus_by_projection(c, w1, w2));
}

double generalized_distance(Rng& rng, Field field, int q) {
  const int l = pick(rng, 1, q - 1);
  const int k = pick(rng, 1, q - l);
  const DistancePair d =
      generalized_distance_check(random_decomposable(rng, field, q, k), random_decomposable(rng, field, q, l));
  return relative_gap(d.lhs, d.rhs);
}

double intersection_transversality(Rng& rng, Field field, int q) {
  const Decomposable v = random_decomposable(rng, field, q, q - 1);
  const std::vector<Vector> basis = orthonormal_basis(v);
  const int k = pick(rng, 1, q - 2);
  std::vector<Vector> inside;
  for (int i = 0; i < k; ++i) {
    const Vector g = gaussian_vector(rng, field, q - 1);
    Vector x = Vector::Zero(q);
    for (int j = 0; j < q - 1; ++j) x += basis[static_cast<std::size_t>(j)] * g[j];
    inside.push_back(x / x.norm());
  }
  const KVector u = Decomposable(q, inside).blade();
  const Decomposable w = random_decomposable(rng, field, q, 2);
  const DistancePair d = intersection_lower_bound(u, w, v);
  return std::max(0.0, d.rhs - d.lhs);
}

/// The same configuration with the hyperplane factor made explicit:
/// tau(u, m) * d(w1, Span V) <= tau(u, w) <= tau(u, m), where m spans the
/// meet of w and v and w1 is the unit direction of w orthogonal to m.
double intersection_sandwich(Rng& rng, Field field, int q) {
  const Decomposable v = random_decomposable(rng, field, q, q - 1);
  const std::vector<Vector> basis = orthonormal_basis(v);
  const int k = pick(rng, 1, q - 2);
  std::vector<Vector> inside;
  for (int i = 0; i < k; ++i) {
    const Vector g = gaussian_vector(rng, field, q - 1);
    Vector x = Vector::Zero(q);
    for (int j = 0; j < q - 1; ++j) x += basis[static_cast<std::size_t>(j)] * g[j];
    inside.push_back(x / x.norm());
  }
  const KVector u = Decomposable(q, inside).blade();
  const Decomposable w = random_decomposable(rng, field, q, 2);
  const DistancePair d = intersection_lower_bound(u, w, v);
  const Vector m = regressive(w.blade(), v.blade()).coeffs();
  const Vector mu = m / m.norm();
  const Decomposable line = Decomposable::from_vector(mu);
  Vector w1 = project_orthogonal_complement(w.factors()[0], line);
  if (w1.norm() < 1e-6) w1 = project_orthogonal_complement(w.factors()[1], line);
  const double transverse = tau(v, w1);
  return std::max({0.0, d.rhs * transverse - d.lhs, d.lhs - d.rhs});
}

double double_star(Rng& rng, Field field, int q) {
  const int g = pick(rng, 0, q);
  KVector a(q, g);
  for (int i = 0; i < a.size(); ++i) a[i] = gaussian_vector(rng, field, 1)[0];
  const double sign = (g * (q - g)) % 2 ? -1.0 : 1.0;
  return norm(hodge_star(hodge_star(a)) - a * Scalar(sign)) / norm(a);
}

double regressive_span(Rng& rng, Field field, int q) {
  const int k = pick(rng, 2, q - 1);
  const int l = pick(rng, q + 1 - k, q - 1);
  const Decomposable u = random_decomposable(rng, field, q, k);
  const Decomposable v = random_decomposable(rng, field, q, l);
  const KVector r = regressive(u.blade(), v.blade());
  const double rn = norm(r);
  if (rn <= 1e-10) return 1.0;  // generic spans meet in exactly k + l - q dimensions
  // Oracle: null space of [U | -V] gives the intersection of the spans.
  Eigen::MatrixXcd m(q, k + l);
  for (int j = 0; j < k; ++j) m.col(j) = u.factors()[static_cast<std::size_t>(j)];
  for (int j = 0; j < l; ++j) m.col(k + j) = -v.factors()[static_cast<std::size_t>(j)];
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
  const int meet = k + l - q;
  double worst = 0.0;
  for (int c = k + l - meet; c < k + l; ++c) {
    Vector x = Vector::Zero(q);
    for (int j = 0; j < k; ++j) x += u.factors()[static_cast<std::size_t>(j)] * svd.matrixV()(j, c);
    worst = std::max(worst, norm(wedge(KVector::from_vector(x), r)) / (x.norm() * rn));
  }
  return worst;
}

double blade_factor_agreement(Rng& rng, Field field, int q) {
  const int k = pick(rng, 1, q - 1);
  const int l = pick(rng, 1, q - k);
  const Decomposable u = random_decomposable(rng, field, q, k);
  const Decomposable v = random_decomposable(rng, field, q, l);
  return relative_gap(tau(u.blade(), v.blade()), tau(u, v));
}

const std::vector<Identity>& identities() {
  static const std::vector<Identity> all = {
      {"orthogonal-block-product", "orthogonal-block-product", orthogonal_block_product},
      {"norm-submultiplicative", "wedge-norm-bound", norm_submultiplicative},
      {"norm-orthogonal-equality", "wedge-norm-bound", norm_orthogonal_equality},
      {"projection-functor", "orthogonal-projection-functor", projection_functor},
      {"first-distance-formula", "first-distance-formula", first_distance_formula},
      {"product-formula", "product-formula", product_formula},
      {"two-path-modulus", "projection-distance-formula", two_path_modulus},
      {"generalized-distance-formula", "generalized-distance-formula", generalized_distance},
      {"intersection-transversality", "intersection-transversality", intersection_transversality, false},
      {"intersection-sandwich", "intersection-transversality-corrected", intersection_sandwich},
      {"double-star", "hodge-double-star", double_star},
      {"regressive-span", "regressive-span", regressive_span},
      {"blade-factor-tau", "tau-two-routes", blade_factor_agreement},
  };
  return all;
}

struct SuiteCase {
  std::size_t identity;
  Field field;
  int n;
};

ExperimentReport run_suite(const ExperimentConfig& config, std::uint64_t trials) {
  detail::Stopwatch clock;
  ExperimentReport report = detail::start_report(config);
  std::vector<Field> fields = {Field::real(), Field::complex()};
  if (config.field) fields = {*config.field};
  std::vector<int> ns = {2, 3, 4};
  if (config.n) ns = {*config.n};

  std::vector<SuiteCase> cases;
  for (std::size_t id = 0; id < identities().size(); ++id)
    for (Field f : fields)
      for (int n : ns) cases.push_back({id, f, n});

  constexpr std::uint64_t kTrialsPerTask = 500;
  const std::uint64_t tasks_per_case = (trials + kTrialsPerTask - 1) / kTrialsPerTask;
  std::vector<double> worst(cases.size() * tasks_per_case, 0.0);
  std::vector<std::string> failure(cases.size() * tasks_per_case);
  parallel_for(worst.size(), config.threads, [&](std::size_t task) {
    const SuiteCase& c = cases[task / tasks_per_case];
    const Identity& id = identities()[c.identity];
    const std::uint64_t first = (task % tasks_per_case) * kTrialsPerTask;
    const std::uint64_t last = std::min(trials, first + kTrialsPerTask);
    const std::uint64_t stream = detail::stream_of(id.name + std::string(c.field.name()), static_cast<std::uint64_t>(c.n));
    for (std::uint64_t t = first; t < last; ++t) {
      Rng rng(config.seed, stream ^ (t * 0xd1b54a32d192ed03ull));
      try {
        const double e = id.trial(rng, c.field, c.n + 1);
        worst[task] = std::max(worst[task], std::isnan(e) ? INFINITY : e);
      } catch (const std::exception& ex) {
        worst[task] = INFINITY;
        if (failure[task].empty()) failure[task] = ex.what();
      }
    }
  });

  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const SuiteCase& c = cases[ci];
    double max_error = 0.0;
    std::string note;
    for (std::uint64_t t = 0; t < tasks_per_case; ++t) {
      max_error = std::max(max_error, worst[ci * tasks_per_case + t]);
      if (note.empty()) note = failure[ci * tasks_per_case + t];
    }
    const Identity& id = identities()[c.identity];
    ReportRow row;
    row.name = id.name + " " + std::string(c.field.name()) + " n=" + std::to_string(c.n);
    row.theorem = id.theorem;
    row.predicted = 0.0;
    row.estimate = max_error;
    row.tolerance = 1e-8;
    row.comparison = Comparison::AtMost;
    row.diagnostics = {{"trials", trials}, {"field", std::string(c.field.name())}, {"n", c.n}, {"gated", id.gated}};
    if (!note.empty()) row.diagnostics["error"] = note;
    report.rows.push_back(row);
    report.audit(max_error);
    report.raw.push_back({id.name + "/" + std::string(c.field.name()), static_cast<std::size_t>(c.n), static_cast<double>(c.n),
                          max_error, trials, max_error <= 1e-8 ? 1 : 0});
  }
  detail::finish_report(report, config, clock);
  return report;
}

}  // namespace

ExperimentReport run_identities(const ExperimentConfig& config) {
  return run_suite(config, config.samples.value_or(10000));
}

bool identity_gate_passes() {
  static const bool ok = [] {
    ExperimentConfig gate;
    gate.experiment = ExperimentKind::Identities;
    gate.seed = 0x6761746555ull;
    gate.threads = 1;
    const ExperimentReport r = run_suite(gate, 200);
    return std::all_of(r.rows.begin(), r.rows.end(),
                       [](const ReportRow& row) { return row.pass || !row.diagnostics.value("gated", true); });
  }();
  return ok;
}

}  // namespace projfol
