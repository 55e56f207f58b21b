#include "projfol/exterior.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <mutex>
#include <string>

namespace projfol {

Field Field::parse(std::string_view name) {
  if (name == "R" || name == "r" || name == "real") return Field::real();
  if (name == "C" || name == "c" || name == "complex") return Field::complex();
  throw std::invalid_argument("unknown field '" + std::string(name) + "' (expected R or C)");
}

int binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

int popcount(BladeMask mask) { return std::popcount(static_cast<unsigned>(mask)); }

std::vector<int> blade_indices(BladeMask mask) {
  std::vector<int> out;
  for (int i = 0; i < 16; ++i) {
    if (mask & (1u << i)) out.push_back(i);
  }
  return out;
}

BladeMask blade_mask(std::span<const int> sorted_indices) {
  BladeMask mask = 0;
  int previous = -1;
  for (int i : sorted_indices) {
    if (i <= previous || i >= kMaxAmbient) {
      throw std::invalid_argument("blade indices must be strictly increasing and below the ambient limit");
    }
    mask |= static_cast<BladeMask>(1u << i);
    previous = i;
  }
  return mask;
}

int merge_sign(BladeMask s, BladeMask t) {
  if (s & t) return 0;
  int inversions = 0;
  for (unsigned rest = t; rest != 0; rest &= rest - 1) {
    const int y = std::countr_zero(rest);
    const unsigned above = ~((2u << y) - 1u);
    inversions += std::popcount(static_cast<unsigned>(s) & above);
  }
  return (inversions & 1) ? -1 : 1;
}

BladeBasis::BladeBasis(int ambient, int grade)
    : ambient_(ambient), grade_(grade), ranks_(std::size_t{1} << ambient, -1) {
  // Lexicographic enumeration of k-subsets of {0, ..., ambient-1}.
  std::vector<int> idx(grade);
  for (int i = 0; i < grade; ++i) idx[i] = i;
  while (true) {
    BladeMask m = 0;
    for (int i : idx) m |= static_cast<BladeMask>(1u << i);
    ranks_[m] = static_cast<int>(masks_.size());
    masks_.push_back(m);
    int pos = grade - 1;
    while (pos >= 0 && idx[pos] == ambient - grade + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < grade; ++i) idx[i] = idx[i - 1] + 1;
  }
}

const BladeBasis& BladeBasis::get(int ambient, int grade) {
  if (ambient < 0 || ambient > kMaxAmbient || grade < 0 || grade > ambient) {
    throw std::invalid_argument("blade basis out of range");
  }
  static std::once_flag once;
  static std::vector<BladeBasis> table;
  std::call_once(once, [] {
    for (int a = 0; a <= kMaxAmbient; ++a) {
      for (int g = 0; g <= a; ++g) table.push_back(BladeBasis(a, g));
    }
  });
  // Row a starts after sum_{b<a} (b+1) entries.
  return table[static_cast<std::size_t>(ambient * (ambient + 1) / 2 + grade)];
}

KVector::KVector(int ambient, int grade)
    : ambient_(ambient), grade_(grade), coeffs_(Eigen::VectorXcd::Zero(BladeBasis::get(ambient, grade).size())) {}

KVector KVector::scalar(int ambient, Scalar value) {
  KVector out(ambient, 0);
  out.coeffs_[0] = value;
  return out;
}

KVector KVector::from_vector(const Vector& v) {
  KVector out(static_cast<int>(v.size()), 1);
  for (int i = 0; i < v.size(); ++i) out.coeffs_[i] = v[i];
  return out;
}

KVector KVector::basis(int ambient, std::initializer_list<int> indices) {
  const BladeMask m = blade_mask(std::span<const int>(indices.begin(), indices.size()));
  return basis(ambient, m);
}

KVector KVector::basis(int ambient, BladeMask mask) {
  if (ambient < kMaxAmbient + 1 && (mask >> ambient) != 0) {
    throw std::invalid_argument("blade index outside the ambient space");
  }
  KVector out(ambient, popcount(mask));
  out.coeffs_[BladeBasis::get(ambient, out.grade_).rank(mask)] = 1.0;
  return out;
}

Scalar KVector::coefficient(BladeMask mask) const {
  if (popcount(mask) != grade_ || (mask >> ambient_) != 0) return 0.0;
  return coeffs_[BladeBasis::get(ambient_, grade_).rank(mask)];
}

Scalar KVector::coefficient(std::initializer_list<int> indices) const {
  return coefficient(blade_mask(std::span<const int>(indices.begin(), indices.size())));
}

void KVector::require_same_shape(const KVector& other) const {
  if (ambient_ != other.ambient_ || grade_ != other.grade_) {
    throw GeometryError("k-vector shape mismatch");
  }
}

KVector& KVector::operator+=(const KVector& other) {
  require_same_shape(other);
  coeffs_ += other.coeffs_;
  return *this;
}

KVector& KVector::operator-=(const KVector& other) {
  require_same_shape(other);
  coeffs_ -= other.coeffs_;
  return *this;
}

KVector& KVector::operator*=(Scalar s) {
  coeffs_ *= s;
  return *this;
}

KVector wedge(const KVector& a, const KVector& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw GeometryError("wedge: ambient dimension mismatch");
  const int ambient = a.ambient_dim();
  const int grade = a.grade() + b.grade();
  if (grade > ambient) return KVector(ambient, ambient);

  const BladeBasis& ba = BladeBasis::get(ambient, a.grade());
  const BladeBasis& bb = BladeBasis::get(ambient, b.grade());
  const BladeBasis& bo = BladeBasis::get(ambient, grade);
  KVector out(ambient, grade);
  for (int i = 0; i < ba.size(); ++i) {
    const Scalar ai = a[i];
    if (ai == Scalar(0.0)) continue;
    const BladeMask s = ba.mask(i);
    for (int j = 0; j < bb.size(); ++j) {
      const BladeMask t = bb.mask(j);
      if (s & t) continue;
      const Scalar bj = b[j];
      if (bj == Scalar(0.0)) continue;
      const int sign = merge_sign(s, t);
      out[bo.rank(s | t)] += (sign > 0 ? ai * bj : -(ai * bj));
    }
  }
  return out;
}

KVector hodge_star(const KVector& a) {
  const int ambient = a.ambient_dim();
  const BladeMask full = static_cast<BladeMask>((1u << ambient) - 1u);
  const BladeBasis& bin = BladeBasis::get(ambient, a.grade());
  const BladeBasis& bout = BladeBasis::get(ambient, ambient - a.grade());
  KVector out(ambient, ambient - a.grade());
  for (int i = 0; i < bin.size(); ++i) {
    const BladeMask s = bin.mask(i);
    const BladeMask c = static_cast<BladeMask>(full ^ s);
    out[bout.rank(c)] = merge_sign(s, c) > 0 ? a[i] : -a[i];
  }
  return out;
}

KVector regressive(const KVector& a, const KVector& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw GeometryError("regressive: ambient dimension mismatch");
  const int ambient = a.ambient_dim();
  if (a.grade() + b.grade() < ambient) return KVector(ambient, 0);
  return hodge_star(wedge(hodge_star(a), hodge_star(b)));
}

Scalar gram_inner(const KVector& a, const KVector& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.grade() != b.grade()) {
    throw GeometryError("gram_inner: grade or dimension mismatch");
  }
  // Distinct blades of an orthonormal basis are orthonormal.
  return a.coeffs().dot(b.coeffs());
}

double norm(const KVector& a) { return a.coeffs().norm(); }

Decomposable::Decomposable(int ambient) : ambient_(ambient), blade_(KVector::scalar(ambient, 1.0)) {}

Decomposable::Decomposable(int ambient, std::vector<Vector> factors)
    : ambient_(ambient), factors_(std::move(factors)), blade_(KVector(ambient, 0)) {
  for (const Vector& f : factors_) {
    if (f.size() != ambient) throw GeometryError("decomposable: factor dimension mismatch");
  }
  blade_ = wedge_all(ambient_, factors_);
}

Decomposable Decomposable::from_vector(const Vector& v) {
  return Decomposable(static_cast<int>(v.size()), {v});
}

Decomposable Decomposable::basis(int ambient, std::initializer_list<int> indices) {
  std::vector<Vector> factors;
  for (int i : indices) {
    Vector e = Vector::Zero(ambient);
    e[i] = 1.0;
    factors.push_back(e);
  }
  return Decomposable(ambient, std::move(factors));
}

Decomposable Decomposable::wedge(const Vector& w) const {
  std::vector<Vector> f = factors_;
  f.push_back(w);
  return Decomposable(ambient_, std::move(f));
}

Decomposable Decomposable::wedge(const Decomposable& other) const {
  std::vector<Vector> f = factors_;
  f.insert(f.end(), other.factors_.begin(), other.factors_.end());
  return Decomposable(ambient_, std::move(f));
}

Decomposable Decomposable::normalized() const {
  const double n = norm();
  if (n == 0.0) throw GeometryError("cannot normalize a zero decomposable");
  if (factors_.empty()) return *this;
  std::vector<Vector> f = factors_;
  f.front() /= n;
  return Decomposable(ambient_, std::move(f));
}

namespace {

// Modified Gram-Schmidt with one reorthogonalization pass. Returns the residual
// norms; q receives the orthonormal vectors for nonzero residuals.
double mgs_step(std::vector<Vector>& q, Vector v) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vector& e : q) v -= e * e.dot(v);
  }
  const double r = v.norm();
  if (r > 0.0) q.push_back(v / r);
  return r;
}

}  // namespace

double wedge_norm(std::span<const Vector> factors) {
  std::vector<Vector> q;
  q.reserve(factors.size());
  double product = 1.0;
  for (const Vector& f : factors) {
    const double r = mgs_step(q, f);
    if (r == 0.0) return 0.0;
    product *= r;
  }
  return product;
}

KVector wedge_all(int ambient, std::span<const Vector> factors) {
  KVector out = KVector::scalar(ambient, 1.0);
  for (const Vector& f : factors) out = wedge(out, KVector::from_vector(f));
  return out;
}

std::vector<Vector> orthonormal_basis(const Decomposable& v) {
  std::vector<Vector> q;
  for (const Vector& f : v.factors()) {
    const double scale = f.norm();
    const double r = mgs_step(q, f);
    if (scale == 0.0 || r <= 1e-10 * scale) {
      throw GeometryError("linearly dependent factors");
    }
  }
  return q;
}

std::vector<Vector> orthonormal_complement(const Decomposable& v) {
  const int ambient = v.ambient_dim();
  const std::vector<Vector> basis = orthonormal_basis(v);
  const int dim = static_cast<int>(basis.size());
  if (dim == 0) {
    std::vector<Vector> all;
    for (int i = 0; i < ambient; ++i) {
      Vector e = Vector::Zero(ambient);
      e[i] = 1.0;
      all.push_back(e);
    }
    return all;
  }
  Eigen::MatrixXcd m(ambient, dim);
  for (int j = 0; j < dim; ++j) m.col(j) = basis[j];
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  const Eigen::MatrixXcd full = qr.householderQ() * Eigen::MatrixXcd::Identity(ambient, ambient);
  std::vector<Vector> out;
  for (int j = dim; j < ambient; ++j) out.push_back(full.col(j));
  return out;
}

Vector project_orthogonal_complement(const Vector& u, const Decomposable& v) {
  if (u.size() != v.ambient_dim()) throw GeometryError("projection: dimension mismatch");
  const std::vector<Vector> basis = orthonormal_basis(v);
  Vector out = u;
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vector& e : basis) out -= e * e.dot(out);
  }
  return out;
}

std::vector<KVector> exterior_power_basis(int ambient, std::span<const Vector> orthonormal, int k) {
  const int m = static_cast<int>(orthonormal.size());
  std::vector<KVector> out;
  if (k < 0 || k > m) return out;
  const BladeBasis& combos = BladeBasis::get(m, k);
  for (int r = 0; r < combos.size(); ++r) {
    std::vector<Vector> pick;
    for (int i : blade_indices(combos.mask(r))) pick.push_back(orthonormal[i]);
    out.push_back(wedge_all(ambient, pick));
  }
  return out;
}

std::vector<KVector> annihilator_basis(const Decomposable& v, int k) {
  const int ambient = v.ambient_dim();
  if (k < 0 || k > ambient) throw std::invalid_argument("annihilator_basis: grade out of range");
  if (v.norm() == 0.0) throw GeometryError("annihilator_basis: zero decomposable");

  // The annihilator is the orthogonal complement of G^k(Span(V)^perp).
  const std::vector<Vector> perp = orthonormal_complement(v);
  const std::vector<KVector> inner = exterior_power_basis(ambient, perp, k);
  const int total = binomial(ambient, k);
  std::vector<KVector> out;
  if (inner.empty()) {
    const BladeBasis& b = BladeBasis::get(ambient, k);
    for (int r = 0; r < b.size(); ++r) out.push_back(KVector::basis(ambient, b.mask(r)));
    return out;
  }
  const int m = static_cast<int>(inner.size());
  Eigen::MatrixXcd mat(total, m);
  for (int j = 0; j < m; ++j) mat.col(j) = inner[j].coeffs();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(mat);
  const Eigen::MatrixXcd full = qr.householderQ() * Eigen::MatrixXcd::Identity(total, total);
  for (int j = m; j < total; ++j) {
    KVector b(ambient, k);
    b.coeffs() = full.col(j);
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace projfol
