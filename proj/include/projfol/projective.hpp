#pragma once

#include <optional>

#include "projfol/exterior.hpp"

namespace projfol {

/// Samples closer than this (in tau) to the centre subspace are rejected.
inline constexpr double kDefaultExclusion = 1e-3;

class RejectedSample : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// A point of P^n_K, stored as a unit representative. The phase of the
/// representative is not canonicalized; compare points with angular_distance.
class ProjectivePoint {
 public:
  ProjectivePoint(const Vector& v, Field field);

  const Vector& rep() const { return rep_; }
  Field field() const { return field_; }
  int ambient_dim() const { return static_cast<int>(rep_.size()); }
  /// Projective dimension n of P^n_K.
  int dim() const { return ambient_dim() - 1; }

 private:
  Vector rep_;
  Field field_;
};

/// k-dimensional projective subspace L_U given by a unit decomposable
/// (k+1)-vector; it parametrizes the foliation by (k+1)-planes through L_U.
class FoliationCenter {
 public:
  FoliationCenter(const Decomposable& center, Field field);

  const Decomposable& center() const { return center_; }
  Field field() const { return field_; }
  int k() const { return center_.grade() - 1; }
  int ambient_dim() const { return center_.ambient_dim(); }

 private:
  Decomposable center_;
  Field field_;
};

/// Image of Proj_U: a unit (k+2)-vector center v w.
struct ProjectedPoint {
  KVector rep;
};

double angular_distance(const ProjectivePoint& a, const ProjectivePoint& b);

/// |u v v| / (|u| |v|) from the blade expansions.
double tau(const KVector& u, const KVector& v);
/// Same quantity from the factors, without expanding blades.
double tau(const Decomposable& u, const Decomposable& v);
double tau(const Decomposable& u, const Vector& w);

/// Angular distance from w to the projective subspace P(Span(U)).
double distance_to_subspace(const ProjectivePoint& w, const Decomposable& u);

ProjectedPoint proj_radial(const FoliationCenter& center, const ProjectivePoint& w,
                           double exclusion = kDefaultExclusion);
std::optional<ProjectedPoint> try_proj_radial(const FoliationCenter& center, const ProjectivePoint& w,
                                              double exclusion = kDefaultExclusion);

/// Norm of a v b inside G^2(G^k), i.e. sqrt(|a|^2 |b|^2 - |<a, b>|^2).
double pair_wedge_norm(const KVector& a, const KVector& b);

/// Angular metric on P G^{k+2}, from two norms and one inner product.
double codomain_distance(const ProjectedPoint& a, const ProjectedPoint& b);

/// phi_U(w1, w2) = tau(U, w1 v w2) / (tau(U, w1) tau(U, w2)).
double lipschitz_modulus(const FoliationCenter& center, const ProjectivePoint& w1, const ProjectivePoint& w2,
                         double exclusion = kDefaultExclusion);
/// phi_U(w1, w2) as the ratio of codomain to domain distances.
double lipschitz_modulus_by_projection(const FoliationCenter& center, const ProjectivePoint& w1,
                                       const ProjectivePoint& w2, double exclusion = kDefaultExclusion);

struct DistancePair {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = tau(u, v); rhs = distance in P G^k from u to the annihilator of v.
DistancePair generalized_distance_check(const Decomposable& u, const Decomposable& v);

/// For Span(u) inside the hyperplane Span(v) and Span(w) not inside it:
/// lhs = tau(u, w), rhs = |u v (w ^ v)| / (|u| |w ^ v|), with lhs >= rhs.
DistancePair intersection_lower_bound(const KVector& u, const Decomposable& w, const Decomposable& v);

/// x -> [1 : x_1 : ... : x_n]. The hyperplane at infinity is {first coordinate = 0}.
ProjectivePoint affine_chart(const Vector& x, Field field);
/// Inverse of affine_chart; throws for points at infinity.
Vector affine_chart_inverse(const ProjectivePoint& p);

/// Inverse stereographic projection R^{m-1} -> S^{m-1} from the north pole
/// (last coordinate +1). The result is a plain unit vector of R^m.
Eigen::VectorXd inverse_stereographic(const Eigen::VectorXd& x);
Eigen::VectorXd stereographic(const Eigen::VectorXd& y);

/// Places y in S^{m-1} into P^n_K as [1 : y], pairing real coordinates into
/// complex ones when K = C (m = 2n), or directly when K = R (m = n).
ProjectivePoint sphere_point(const Eigen::VectorXd& y, Field field);
/// Sphere coordinates of a point [1 : y] of S; throws if p is at infinity.
Eigen::VectorXd sphere_coordinates(const ProjectivePoint& p);

/// inverse_stereographic followed by sphere_point: R^{m-1} -> S subset P^n_K.
ProjectivePoint stereographic_to_sphere(const Eigen::VectorXd& x, Field field);

}  // namespace projfol
