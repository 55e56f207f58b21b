#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "generators.hpp"
#include "projfol/dimension.hpp"
#include "projfol/sampling.hpp"

using namespace projfol;

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    firsts.insert(x);
    CHECK(x != c());
    CHECK(x != d());
  }
  CHECK(firsts.size() == 100);
  // Usable with standard distributions.
  Rng e(1);
  std::uniform_int_distribution<int> dist(0, 9);
  for (int i = 0; i < 100; ++i) {
    const int v = dist(e);
    CHECK(v >= 0);
    CHECK(v <= 9);
  }
  Rng f(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = f.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(f.below(17) < 17u);
  }
  CHECK(Rng(5).derive(1)() == Rng(5).derive(1)());
  CHECK(Rng(5).derive(1)() != Rng(5).derive(2)());
}

TEST_CASE("uniform and normal variates have the right moments") {
  Rng rng(31);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    su += rng.uniform();
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("uniform projective points satisfy the second moment identity") {
  for (Field f : {Field::real(), Field::complex()}) {
    const int n = 3;
    Rng rng(32, f.is_real() ? 0 : 1);
    const Vector a = gen::vec(rng, f, n + 1), b = gen::vec(rng, f, n + 1);
    const int samples = 100000;
    Scalar mean(0.0);
    double var = 0.0;
    for (int i = 0; i < samples; ++i) {
      const ProjectivePoint x = uniform_projective_point(rng, f, n);
      CHECK(std::abs(x.rep().norm() - 1.0) <= 1e-12);
      const Scalar v = x.rep().dot(a) * b.dot(x.rep());
      mean += v;
      var += std::norm(v);
    }
    mean /= static_cast<double>(samples);
    const double sigma = std::sqrt(var / samples / samples);
    CHECK(std::abs(mean - b.dot(a) / static_cast<double>(n + 1)) <= 3 * sigma + 1e-12);
  }
}

TEST_CASE("distance to a fixed point has CDF exponent delta n") {
  for (Field f : {Field::real(), Field::complex()}) {
    Rng rng(33, f.is_real() ? 0 : 1);
    const int n = 2;
    const ProjectivePoint p = uniform_projective_point(rng, f, n);
    std::vector<double> d(300000);
    for (double& x : d) x = angular_distance(uniform_projective_point(rng, f, n), p);
    FitOptions fit;
    if (!f.is_real()) fit.window = {0x1p-5, 0x1p-2};
    fit.residual_bound = INFINITY;
    const DimensionEstimate e = tail_exponent(d, fit);
    CHECK(e.valid);
    CHECK(e.value == doctest::Approx(f.delta() * n).epsilon(0.1 / (f.delta() * n)));
  }
}

TEST_CASE("uniform centres are unit and k=0 reduces to a point") {
  Rng a(34), b(34);
  const FoliationCenter c = uniform_center(a, Field::complex(), 2, 0);
  const ProjectivePoint p = uniform_projective_point(b, Field::complex(), 2);
  CHECK(c.k() == 0);
  CHECK(angular_distance(ProjectivePoint(c.center().factors()[0], Field::complex()), p) <= 1e-12);
  Rng rng(35);
  for (int i = 0; i < 100; ++i) {
    const FoliationCenter u = uniform_center(rng, Field::real(), 4, i % 3);
    CHECK(u.k() == i % 3);
    CHECK(u.center().norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pointed centres lie inside the hyperplane") {
  Rng rng(36);
  for (int trial = 0; trial < 200; ++trial) {
    const Field f = trial % 2 ? Field::complex() : Field::real();
    const int n = 2 + trial % 3;
    const Decomposable v = gen::blade(rng, f, n + 1, n);
    const FoliationCenter c = pointed_center(rng, v, f, trial % (n - 1));
    for (const Vector& u : c.center().factors())
      CHECK(norm(wedge(KVector::from_vector(u), v.blade())) <= 1e-10 * u.norm() * v.norm());
    const ProjectivePoint p = uniform_point_in_span(rng, v, f);
    CHECK(distance_to_subspace(p, v) <= 1e-10);
  }
}

TEST_CASE("sphere samples are on the sphere") {
  Rng rng(37);
  for (Field f : {Field::real(), Field::complex()})
    for (int n = 2; n <= 4; ++n) {
      const SphereModel s{f, n};
      CHECK(s.sphere_dim() == (f.is_real() ? n - 1 : 2 * n - 1));
      for (int i = 0; i < 200; ++i) {
        const ProjectivePoint p = uniform_sphere_point(rng, s);
        CHECK(std::abs(s.sphere_residual(p)) <= 1e-12);
        CHECK(s.on_sphere(p));
      }
    }
  const SphereModel s{Field::real(), 2};
  Vector c(3);
  c << 1, 0.2, 0.1;
  CHECK(s.in_ball(ProjectivePoint(c, Field::real())));
  c << 0, 1, 0;
  CHECK(std::isinf(s.sphere_residual(ProjectivePoint(c, Field::real()))));
}

TEST_CASE("chains through points") {
  // Antipodal chart points (+-1, 0, 0) of S^5 give the chain spanned by e0, e1.
  Vector a(4), b(4);
  a << 1, 1, 0, 0;
  b << 1, -1, 0, 0;
  const ProjectivePoint pts[] = {ProjectivePoint(a, Field::complex()), ProjectivePoint(b, Field::complex())};
  const FoliationCenter c = chain_through_points(pts);
  CHECK(c.k() == 1);
  CHECK(std::abs(gram_inner(c.center().blade(), KVector::basis(4, {0, 1}))) == doctest::Approx(1.0));
  CHECK_THROWS(chain_through_points(std::vector<ProjectivePoint>{pts[0], pts[0]}));

  Rng rng(38);
  const SphereModel s{Field::complex(), 3};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ProjectivePoint> through;
    for (int j = 0; j <= trial % 2; ++j) through.push_back(uniform_sphere_point(rng, s));
    const FoliationCenter chain = chain_through_points(through);
    CHECK(chain.k() == trial % 2);
    for (const ProjectivePoint& p : through) CHECK(tau(chain.center(), p.rep()) <= 1e-9);
  }
}

TEST_CASE("points on a hyperplane section lie on both") {
  Rng rng(39);
  for (Field f : {Field::real(), Field::complex()}) {
    const SphereModel s{f, 3};
    const Decomposable v = Decomposable::basis(4, {0, 1, 2});
    for (int i = 0; i < 100; ++i) {
      const ProjectivePoint p = uniform_point_on_section(rng, s, v);
      CHECK(s.on_sphere(p));
      CHECK(distance_to_subspace(p, v) <= 1e-10);
    }
  }
}

TEST_CASE("hashing and sample log") {
  const unsigned char bytes[] = {'a'};
  CHECK(fnv1a(bytes) == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a({}) == 0xcbf29ce484222325ull);
  CHECK(hex64(0xabcull) == "0000000000000abc");
  std::ostringstream out;
  SampleLog log(&out);
  log.record(Rng(3, 4), 5, 6);
  CHECK(out.str().rfind("seed,stream,index,payload_hash\n", 0) == 0);
  CHECK(out.str().find("3,4,5,") != std::string::npos);
  CHECK_FALSE(SampleLog(nullptr).enabled());
}
