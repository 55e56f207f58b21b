#include "projfol/projective.hpp"

#include <array>
#include <cmath>

namespace projfol {

namespace {

bool has_imaginary_part(const Vector& v) {
  for (int i = 0; i < v.size(); ++i) {
    if (v[i].imag() != 0.0) return true;
  }
  return false;
}

KVector normalized(KVector v) {
  const double n = norm(v);
  if (n == 0.0) throw GeometryError("cannot normalize a zero k-vector");
  v *= Scalar(1.0 / n);
  return v;
}

}  // namespace

ProjectivePoint::ProjectivePoint(const Vector& v, Field field) : rep_(v), field_(field) {
  if (v.size() < 1) throw GeometryError("projective point needs a nonempty representative");
  if (field.is_real() && has_imaginary_part(v)) {
    throw GeometryError("real projective point with a complex representative");
  }
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw GeometryError("projective point of a zero or non-finite vector");
  rep_ /= n;
}

FoliationCenter::FoliationCenter(const Decomposable& center, Field field)
    : center_(center.normalized()), field_(field) {
  const int k = center_.grade() - 1;
  const int n = center_.ambient_dim() - 1;
  if (k < 0 || k > n - 2) throw GeometryError("foliation centre must have 0 <= k <= n-2");
}

double angular_distance(const ProjectivePoint& a, const ProjectivePoint& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw GeometryError("angular_distance: dimension mismatch");
  const std::array<Vector, 2> f{a.rep(), b.rep()};
  return std::min(1.0, wedge_norm(f));
}

double tau(const KVector& u, const KVector& v) {
  if (u.ambient_dim() != v.ambient_dim()) throw GeometryError("tau: dimension mismatch");
  if (u.grade() + v.grade() > u.ambient_dim()) throw GeometryError("tau: grades exceed the ambient dimension");
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) throw GeometryError("tau: zero argument");
  return norm(wedge(u, v)) / (nu * nv);
}

double tau(const Decomposable& u, const Decomposable& v) {
  if (u.ambient_dim() != v.ambient_dim()) throw GeometryError("tau: dimension mismatch");
  if (u.grade() + v.grade() > u.ambient_dim()) throw GeometryError("tau: grades exceed the ambient dimension");
  const double nu = wedge_norm(u.factors());
  const double nv = wedge_norm(v.factors());
  if (nu == 0.0 || nv == 0.0) throw GeometryError("tau: zero argument");
  std::vector<Vector> all = u.factors();
  all.insert(all.end(), v.factors().begin(), v.factors().end());
  return wedge_norm(all) / (nu * nv);
}

double tau(const Decomposable& u, const Vector& w) {
  if (u.ambient_dim() != w.size()) throw GeometryError("tau: dimension mismatch");
  if (u.grade() + 1 > u.ambient_dim()) throw GeometryError("tau: grades exceed the ambient dimension");
  const double nu = wedge_norm(u.factors());
  const double nw = w.norm();
  if (nu == 0.0 || nw == 0.0) throw GeometryError("tau: zero argument");
  std::vector<Vector> all = u.factors();
  all.push_back(w);
  return wedge_norm(all) / (nu * nw);
}

double distance_to_subspace(const ProjectivePoint& w, const Decomposable& u) { return tau(u, w.rep()); }

std::optional<ProjectedPoint> try_proj_radial(const FoliationCenter& center, const ProjectivePoint& w,
                                              double exclusion) {
  if (tau(center.center(), w.rep()) <= exclusion) return std::nullopt;
  return ProjectedPoint{normalized(wedge(center.center().blade(), KVector::from_vector(w.rep())))};
}

ProjectedPoint proj_radial(const FoliationCenter& center, const ProjectivePoint& w, double exclusion) {
  auto p = try_proj_radial(center, w, exclusion);
  if (!p) throw RejectedSample("point too close to the centre subspace");
  return *std::move(p);
}

double pair_wedge_norm(const KVector& a, const KVector& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.grade() != b.grade()) {
    throw GeometryError("pair_wedge_norm: shape mismatch");
  }
  const Eigen::VectorXcd& x = a.coeffs();
  const Eigen::VectorXcd& y = b.coeffs();
  const double scale = x.squaredNorm() * y.squaredNorm();
  const double d2 = scale - std::norm(x.dot(y));
  if (d2 > 1e-4 * scale) return std::sqrt(d2);
  // Close to parallel: sum the 2x2 minors directly instead of cancelling.
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    for (Eigen::Index j = i + 1; j < x.size(); ++j) s += std::norm(x[i] * y[j] - x[j] * y[i]);
  return std::sqrt(s);
}

double codomain_distance(const ProjectedPoint& a, const ProjectedPoint& b) {
  const double na = norm(a.rep);
  const double nb = norm(b.rep);
  return std::min(1.0, pair_wedge_norm(a.rep, b.rep) / (na * nb));
}

double lipschitz_modulus(const FoliationCenter& center, const ProjectivePoint& w1, const ProjectivePoint& w2,
                         double exclusion) {
  if (angular_distance(w1, w2) <= 1e-10) throw GeometryError("lipschitz_modulus: coincident points");
  const double t1 = tau(center.center(), w1.rep());
  const double t2 = tau(center.center(), w2.rep());
  if (t1 <= exclusion || t2 <= exclusion) throw RejectedSample("point too close to the centre subspace");
  const Decomposable pair(w1.ambient_dim(), {w1.rep(), w2.rep()});
  return tau(center.center(), pair) / (t1 * t2);
}

double lipschitz_modulus_by_projection(const FoliationCenter& center, const ProjectivePoint& w1,
                                       const ProjectivePoint& w2, double exclusion) {
  const double d = angular_distance(w1, w2);
  if (d <= 1e-10) throw GeometryError("lipschitz_modulus: coincident points");
  return codomain_distance(proj_radial(center, w1, exclusion), proj_radial(center, w2, exclusion)) / d;
}

DistancePair generalized_distance_check(const Decomposable& u, const Decomposable& v) {
  const int ambient = u.ambient_dim();
  if (v.ambient_dim() != ambient) throw GeometryError("generalized_distance_check: dimension mismatch");
  if (v.grade() < 1 || u.grade() < 1 || u.grade() + v.grade() > ambient) {
    throw GeometryError("generalized_distance_check: need k, l >= 1 and k + l <= q");
  }
  DistancePair out;
  out.lhs = tau(u.blade(), v.blade());
  const KVector& ub = u.blade();
  KVector projection(ambient, u.grade());
  for (const KVector& b : annihilator_basis(v, u.grade())) projection += b * gram_inner(b, ub);
  out.rhs = norm(ub - projection) / norm(ub);
  return out;
}

DistancePair intersection_lower_bound(const KVector& u, const Decomposable& w, const Decomposable& v) {
  const int ambient = u.ambient_dim();
  if (w.ambient_dim() != ambient || v.ambient_dim() != ambient) {
    throw GeometryError("intersection_lower_bound: dimension mismatch");
  }
  if (v.grade() != ambient - 1 || w.grade() != 2) {
    throw GeometryError("intersection_lower_bound: need a hyperplane v and a 2-vector w");
  }
  const std::vector<Vector> hyper = orthonormal_basis(v);
  auto distance_to_hyperplane_power = [&](const KVector& x) {
    KVector p(ambient, x.grade());
    for (const KVector& b : exterior_power_basis(ambient, hyper, x.grade())) p += b * gram_inner(b, x);
    return norm(x - p) / norm(x);
  };
  if (norm(u) == 0.0 || w.norm() == 0.0) throw GeometryError("intersection_lower_bound: zero argument");
  if (distance_to_hyperplane_power(u) > 1e-9) {
    throw GeometryError("intersection_lower_bound: Span(u) is not inside Span(v)");
  }
  if (distance_to_hyperplane_power(w.blade()) <= 1e-9) {
    throw GeometryError("intersection_lower_bound: Span(w) is inside Span(v)");
  }
  const KVector meet = regressive(w.blade(), v.blade());
  DistancePair out;
  out.lhs = tau(u, w.blade());
  out.rhs = norm(wedge(u, meet)) / (norm(u) * norm(meet));
  return out;
}

ProjectivePoint affine_chart(const Vector& x, Field field) {
  Vector rep(x.size() + 1);
  rep[0] = 1.0;
  rep.tail(x.size()) = x;
  return ProjectivePoint(rep, field);
}

Vector affine_chart_inverse(const ProjectivePoint& p) {
  const Scalar head = p.rep()[0];
  if (std::abs(head) <= 1e-12) throw GeometryError("affine chart: point at infinity");
  return p.rep().tail(p.ambient_dim() - 1) / head;
}

Eigen::VectorXd inverse_stereographic(const Eigen::VectorXd& x) {
  const double s = x.squaredNorm();
  if (!std::isfinite(s)) throw GeometryError("stereographic chart: non-finite point");
  Eigen::VectorXd y(x.size() + 1);
  y.head(x.size()) = 2.0 * x / (1.0 + s);
  y[x.size()] = (s - 1.0) / (1.0 + s);
  return y;
}

Eigen::VectorXd stereographic(const Eigen::VectorXd& y) {
  const Eigen::Index m = y.size() - 1;
  const double denom = 1.0 - y[m];
  if (denom <= 1e-15) throw GeometryError("stereographic chart: north pole");
  return y.head(m) / denom;
}

ProjectivePoint sphere_point(const Eigen::VectorXd& y, Field field) {
  if (field.is_real()) {
    Vector rep(y.size() + 1);
    rep[0] = 1.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) rep[i + 1] = y[i];
    return ProjectivePoint(rep, field);
  }
  if (y.size() % 2 != 0) throw GeometryError("complex sphere needs an even number of real coordinates");
  const Eigen::Index n = y.size() / 2;
  Vector rep(n + 1);
  rep[0] = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) rep[j + 1] = Scalar(y[2 * j], y[2 * j + 1]);
  return ProjectivePoint(rep, field);
}

Eigen::VectorXd sphere_coordinates(const ProjectivePoint& p) {
  const Vector x = affine_chart_inverse(p);
  if (p.field().is_real()) {
    Eigen::VectorXd y(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = x[i].real();
    return y;
  }
  Eigen::VectorXd y(2 * x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    y[2 * j] = x[j].real();
    y[2 * j + 1] = x[j].imag();
  }
  return y;
}

ProjectivePoint stereographic_to_sphere(const Eigen::VectorXd& x, Field field) {
  return sphere_point(inverse_stereographic(x), field);
}

}  // namespace projfol
