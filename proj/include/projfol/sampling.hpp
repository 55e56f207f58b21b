#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>

#include "projfol/projective.hpp"

namespace projfol {

/// Counter-based generator: output i of stream (seed, stream_id) is a fixed
/// function of (seed, stream_id, i), so parallel workers that derive their
/// streams from task indices reproduce the same samples for any thread count.
/// Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform on [0, 1).
  double uniform();
  /// Standard normal (Box-Muller; the second variate is cached).
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  /// Independent stream keyed by (seed, stream_id, sub).
  Rng derive(std::uint64_t sub) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// Sphere S and open ball B inside P^n_K: points [1 : x] with |x| = 1,
/// resp. |x| < 1. S is S^{n-1} for K = R and S^{2n-1} for K = C.
struct SphereModel {
  Field field;
  int n = 2;

  /// Real dimension of the sphere S.
  int sphere_dim() const { return field.is_real() ? n - 1 : 2 * n - 1; }
  /// |x|^2 - 1 for p = [1 : x]; +inf at infinity.
  double sphere_residual(const ProjectivePoint& p) const;
  bool on_sphere(const ProjectivePoint& p, double tol = 1e-10) const;
  bool in_ball(const ProjectivePoint& p) const;
};

/// Standard Gaussian vector of K^dim (complex entries have unit total variance).
Vector gaussian_vector(Rng& rng, Field field, int dim);

ProjectivePoint uniform_projective_point(Rng& rng, Field field, int n);

/// Wedge of k+1 independent uniform points; degenerate draws (wedge norm
/// below 1e-8) are resampled up to 100 times.
FoliationCenter uniform_center(Rng& rng, Field field, int n, int k);

/// Wedge of k+1 uniform points of the projective hyperplane P(Span(V)),
/// V of grade n.
FoliationCenter pointed_center(Rng& rng, const Decomposable& hyperplane, Field field, int k);

/// Uniform point of P(Span(V)).
ProjectivePoint uniform_point_in_span(Rng& rng, const Decomposable& v, Field field);

ProjectivePoint uniform_sphere_point(Rng& rng, const SphereModel& model);

/// The k-dimensional projective subspace through k+1 points (k = points - 1).
FoliationCenter chain_through_points(std::span<const ProjectivePoint> points);

/// Uniform point on the trace S intersect P(Span(V)) for a hyperplane V that
/// meets the ball B (a small sphere for K = R, a chain for K = C).
ProjectivePoint uniform_point_on_section(Rng& rng, const SphereModel& model, const Decomposable& hyperplane);

/// FNV-1a over raw bytes; stable across platforms with the same endianness.
std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t hash_vector(const Vector& v);
std::string hex64(std::uint64_t value);

/// Optional audit log, one CSV row per sample: seed,stream,index,payload_hash.
class SampleLog {
 public:
  explicit SampleLog(std::ostream* out) : out_(out) {
    if (out_) *out_ << "seed,stream,index,payload_hash\n";
  }
  void record(const Rng& rng, std::uint64_t index, std::uint64_t payload_hash);
  bool enabled() const { return out_ != nullptr; }

 private:
  std::ostream* out_;
};

}  // namespace projfol
