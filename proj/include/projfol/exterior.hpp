#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace projfol {

// Dense Grassmann algebra of K^N, K = R or C, with N <= kMaxAmbient.
// Coefficients are always stored as complex numbers; a real computation keeps
// every imaginary part at exactly zero.

inline constexpr int kMaxAmbient = 13;

using Scalar = std::complex<double>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxAmbient, 1>;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FieldKind { Real, Complex };

class Field {
 public:
  constexpr Field() = default;
  constexpr explicit Field(FieldKind kind) : kind_(kind) {}

  static constexpr Field real() { return Field(FieldKind::Real); }
  static constexpr Field complex() { return Field(FieldKind::Complex); }
  /// Accepts "R"/"real" and "C"/"complex".
  static Field parse(std::string_view name);

  constexpr FieldKind kind() const { return kind_; }
  constexpr bool is_real() const { return kind_ == FieldKind::Real; }
  /// Real dimension of the scalar field: 1 for R, 2 for C.
  constexpr int delta() const { return is_real() ? 1 : 2; }
  constexpr std::string_view name() const { return is_real() ? "R" : "C"; }

  friend constexpr bool operator==(Field, Field) = default;

 private:
  FieldKind kind_ = FieldKind::Real;
};

/// Sorted index set {i_1 < ... < i_k} encoded as a bitmask.
using BladeMask = std::uint16_t;

int binomial(int n, int k);
int popcount(BladeMask mask);
std::vector<int> blade_indices(BladeMask mask);
BladeMask blade_mask(std::span<const int> sorted_indices);

/// Sign of the permutation that sorts the concatenation (S, T), both sorted.
/// Zero when S and T overlap.
int merge_sign(BladeMask s, BladeMask t);

/// Rank <-> mask tables for the blades of one grade, in lexicographic order
/// of the sorted index lists.
class BladeBasis {
 public:
  static const BladeBasis& get(int ambient, int grade);

  int ambient() const { return ambient_; }
  int grade() const { return grade_; }
  int size() const { return static_cast<int>(masks_.size()); }
  BladeMask mask(int rank) const { return masks_[rank]; }
  int rank(BladeMask mask) const { return ranks_[mask]; }

 private:
  BladeBasis(int ambient, int grade);

  int ambient_;
  int grade_;
  std::vector<BladeMask> masks_;
  std::vector<int> ranks_;
};

class KVector {
 public:
  /// Zero k-vector of K^ambient.
  KVector(int ambient, int grade);

  static KVector scalar(int ambient, Scalar value);
  static KVector from_vector(const Vector& v);
  /// Basis blade e_{i_1} v ... v e_{i_k}; indices must be strictly increasing.
  static KVector basis(int ambient, std::initializer_list<int> indices);
  static KVector basis(int ambient, BladeMask mask);

  int ambient_dim() const { return ambient_; }
  int grade() const { return grade_; }
  int size() const { return static_cast<int>(coeffs_.size()); }

  const Eigen::VectorXcd& coeffs() const { return coeffs_; }
  Eigen::VectorXcd& coeffs() { return coeffs_; }
  Scalar operator[](int rank) const { return coeffs_[rank]; }
  Scalar& operator[](int rank) { return coeffs_[rank]; }
  Scalar coefficient(BladeMask mask) const;
  Scalar coefficient(std::initializer_list<int> indices) const;

  KVector& operator+=(const KVector& other);
  KVector& operator-=(const KVector& other);
  KVector& operator*=(Scalar s);

  friend KVector operator+(KVector a, const KVector& b) { return a += b; }
  friend KVector operator-(KVector a, const KVector& b) { return a -= b; }
  friend KVector operator*(KVector a, Scalar s) { return a *= s; }
  friend KVector operator*(Scalar s, KVector a) { return a *= s; }
  friend KVector operator-(KVector a) { return a *= Scalar(-1.0); }

 private:
  void require_same_shape(const KVector& other) const;

  int ambient_;
  int grade_;
  Eigen::VectorXcd coeffs_;
};

/// Progressive (exterior) product. If the grades add up past the ambient
/// dimension the result is the zero vector of top grade.
KVector wedge(const KVector& a, const KVector& b);

/// Hodge star for the determinant volume form of the canonical basis:
/// e_S -> sgn(S, S^c) e_{S^c}, extended linearly.
KVector hodge_star(const KVector& a);

/// Regressive product a ^ b = *( *a v *b ).
KVector regressive(const KVector& a, const KVector& b);

/// Grassmann extension of the Hermitian inner product, conjugate-linear in
/// the first argument.
Scalar gram_inner(const KVector& a, const KVector& b);
double norm(const KVector& a);

/// A pure k-vector that remembers its factors.
class Decomposable {
 public:
  /// Grade-0 unit (empty product).
  explicit Decomposable(int ambient);
  Decomposable(int ambient, std::vector<Vector> factors);
  static Decomposable from_vector(const Vector& v);
  static Decomposable basis(int ambient, std::initializer_list<int> indices);

  int ambient_dim() const { return ambient_; }
  int grade() const { return static_cast<int>(factors_.size()); }
  const std::vector<Vector>& factors() const { return factors_; }
  const KVector& blade() const { return blade_; }
  double norm() const { return projfol::norm(blade_); }

  /// this v w, appending w as the last factor.
  Decomposable wedge(const Vector& w) const;
  Decomposable wedge(const Decomposable& other) const;
  /// Rescales the first factor so that the blade has unit norm.
  Decomposable normalized() const;

 private:
  int ambient_;
  std::vector<Vector> factors_;
  KVector blade_;
};

/// Norm of u_1 v ... v u_m computed from the factors by modified Gram-Schmidt
/// (product of the successive residual norms).
double wedge_norm(std::span<const Vector> factors);
KVector wedge_all(int ambient, std::span<const Vector> factors);

/// Orthonormal basis of Span(V). Throws on linearly dependent factors.
std::vector<Vector> orthonormal_basis(const Decomposable& v);
/// Orthonormal basis of Span(V)^perp.
std::vector<Vector> orthonormal_complement(const Decomposable& v);

/// Orthogonal projection of u onto Span(V)^perp.
Vector project_orthogonal_complement(const Vector& u, const Decomposable& v);

/// Orthonormal basis of { U in G^k : U v V = 0 }.
std::vector<KVector> annihilator_basis(const Decomposable& v, int k);

/// Orthonormal blade basis of G^k(W) for W spanned by the given orthonormal
/// vectors.
std::vector<KVector> exterior_power_basis(int ambient, std::span<const Vector> orthonormal, int k);

}  // namespace projfol
