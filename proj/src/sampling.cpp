#include "projfol/sampling.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

namespace projfol {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

constexpr std::uint64_t fmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_(stream_id), key_(fmix64(seed + kGolden) ^ fmix64(stream_id * kGolden + 0x632be59bd9b4e019ull)) {}

Rng::result_type Rng::operator()() {
  const std::uint64_t c = counter_++;
  return fmix64(fmix64(c * kGolden + key_) ^ (key_ >> 17 | key_ << 47));
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: empty range");
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t x = (*this)();
    if (x >= threshold) return x % bound;
  }
}

Rng Rng::derive(std::uint64_t sub) const { return Rng(seed_, fmix64(stream_ ^ fmix64(sub + kGolden))); }

double SphereModel::sphere_residual(const ProjectivePoint& p) const {
  const Scalar head = p.rep()[0];
  if (std::abs(head) <= 1e-12) return std::numeric_limits<double>::infinity();
  return (p.rep().tail(p.ambient_dim() - 1) / head).squaredNorm() - 1.0;
}

bool SphereModel::on_sphere(const ProjectivePoint& p, double tol) const {
  return std::abs(sphere_residual(p)) <= tol;
}

bool SphereModel::in_ball(const ProjectivePoint& p) const { return sphere_residual(p) < 0.0; }

Vector gaussian_vector(Rng& rng, Field field, int dim) {
  Vector v(dim);
  if (field.is_real()) {
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  } else {
    for (int i = 0; i < dim; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      v[i] = Scalar(re, im) * std::numbers::sqrt2 * 0.5;
    }
  }
  return v;
}

ProjectivePoint uniform_projective_point(Rng& rng, Field field, int n) {
  if (n < 1 || n + 1 > kMaxAmbient) throw std::invalid_argument("projective dimension out of range");
  while (true) {
    Vector v = gaussian_vector(rng, field, n + 1);
    if (v.norm() > 0.0) return ProjectivePoint(v, field);
  }
}

FoliationCenter uniform_center(Rng& rng, Field field, int n, int k) {
  if (k < 0 || k > n - 2) throw std::invalid_argument("uniform_center: need 0 <= k <= n-2");
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<Vector> factors;
    factors.reserve(k + 1);
    for (int i = 0; i <= k; ++i) factors.push_back(uniform_projective_point(rng, field, n).rep());
    if (wedge_norm(factors) >= 1e-8) return FoliationCenter(Decomposable(n + 1, std::move(factors)), field);
  }
  throw GeometryError("uniform_center: degenerate draws exhausted the retry budget");
}

ProjectivePoint uniform_point_in_span(Rng& rng, const Decomposable& v, Field field) {
  const std::vector<Vector> basis = orthonormal_basis(v);
  while (true) {
    const Vector g = gaussian_vector(rng, field, static_cast<int>(basis.size()));
    Vector p = Vector::Zero(v.ambient_dim());
    for (std::size_t i = 0; i < basis.size(); ++i) p += basis[i] * g[static_cast<Eigen::Index>(i)];
    if (p.norm() > 0.0) return ProjectivePoint(p, field);
  }
}

FoliationCenter pointed_center(Rng& rng, const Decomposable& hyperplane, Field field, int k) {
  const int ambient = hyperplane.ambient_dim();
  const int n = ambient - 1;
  if (hyperplane.grade() != n) throw std::invalid_argument("pointed_center: V must have grade n");
  if (k < 0 || k > n - 2) throw std::invalid_argument("pointed_center: need 0 <= k <= n-2");
  const std::vector<Vector> basis = orthonormal_basis(hyperplane);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<Vector> factors;
    for (int i = 0; i <= k; ++i) {
      const Vector g = gaussian_vector(rng, field, n);
      Vector p = Vector::Zero(ambient);
      for (int j = 0; j < n; ++j) p += basis[j] * g[j];
      factors.push_back(p / p.norm());
    }
    if (wedge_norm(factors) >= 1e-8) return FoliationCenter(Decomposable(ambient, std::move(factors)), field);
  }
  throw GeometryError("pointed_center: degenerate draws exhausted the retry budget");
}

ProjectivePoint uniform_sphere_point(Rng& rng, const SphereModel& model) {
  const int m = model.sphere_dim() + 1;
  Eigen::VectorXd y(m);
  double n2 = 0.0;
  while (n2 == 0.0) {
    for (int i = 0; i < m; ++i) y[i] = rng.normal();
    n2 = y.squaredNorm();
  }
  return sphere_point(y / std::sqrt(n2), model.field);
}

FoliationCenter chain_through_points(std::span<const ProjectivePoint> points) {
  if (points.empty()) throw GeometryError("chain_through_points: no points");
  std::vector<Vector> factors;
  for (const ProjectivePoint& p : points) {
    if (p.ambient_dim() != points.front().ambient_dim()) throw GeometryError("chain_through_points: dimension mismatch");
    factors.push_back(p.rep());
  }
  if (wedge_norm(factors) < 1e-8) throw GeometryError("chain_through_points: degenerate configuration");
  return FoliationCenter(Decomposable(points.front().ambient_dim(), std::move(factors)), points.front().field());
}

ProjectivePoint uniform_point_on_section(Rng& rng, const SphereModel& model, const Decomposable& hyperplane) {
  const int ambient = model.n + 1;
  if (hyperplane.ambient_dim() != ambient || hyperplane.grade() != model.n) {
    throw std::invalid_argument("uniform_point_on_section: V must be a hyperplane of K^{n+1}");
  }
  const std::vector<Vector> normal_space = orthonormal_complement(hyperplane);
  const Vector& nu = normal_space.front();
  // Points (1, z) of Span(V) satisfy <a, z> = -conj(nu_0) with a = nu_{1..n}.
  const Vector a = nu.tail(model.n);
  const double a2 = a.squaredNorm();
  if (a2 <= 1e-24) throw GeometryError("section: hyperplane is the hyperplane at infinity");
  const Vector centre = -std::conj(nu[0]) * a / a2;
  const double rho2 = 1.0 - centre.squaredNorm();
  if (rho2 <= 0.0) throw GeometryError("section: hyperplane does not meet the ball");
  while (true) {
    Vector g = gaussian_vector(rng, model.field, model.n);
    g -= a * (a.dot(g) / a2);
    const double gn = g.norm();
    if (gn == 0.0) continue;
    Vector rep(ambient);
    rep[0] = 1.0;
    rep.tail(model.n) = centre + g * (std::sqrt(rho2) / gn);
    return ProjectivePoint(rep, model.field);
  }
}

std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t hash_vector(const Vector& v) {
  std::vector<unsigned char> bytes(static_cast<std::size_t>(v.size()) * sizeof(Scalar));
  std::memcpy(bytes.data(), v.data(), bytes.size());
  return fnv1a(bytes);
}

std::string hex64(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

void SampleLog::record(const Rng& rng, std::uint64_t index, std::uint64_t payload_hash) {
  if (!out_) return;
  *out_ << rng.seed() << ',' << rng.stream_id() << ',' << index << ',' << hex64(payload_hash) << '\n';
}

}  // namespace projfol
