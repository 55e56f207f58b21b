#include <doctest.h>

#include <algorithm>
#include <map>

#include "blade_oracle.hpp"
#include "generators.hpp"
#include "projfol/exterior.hpp"

using namespace projfol;

namespace {

using oracle::Blade;
using oracle::all_blades;

double max_abs_diff(const KVector& a, const KVector& b) { return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff(); }

Vector v3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST_CASE("binomial coefficients") {
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(13, 6) == 1716);
  CHECK(binomial(3, 4) == 0);
}

TEST_CASE("blade basis ranks are lexicographic and invertible") {
  const BladeBasis& b = BladeBasis::get(4, 2);
  REQUIRE(b.size() == 6);
  CHECK(blade_indices(b.mask(0)) == Blade{0, 1});
  CHECK(blade_indices(b.mask(5)) == Blade{2, 3});
  for (int r = 0; r < b.size(); ++r) CHECK(b.rank(b.mask(r)) == r);
}

TEST_CASE("wedge, star and regressive agree with the blade oracle on all blades of K^3 and K^4") {
  for (int dim : {3, 4}) {
    const oracle::Tally t = oracle::check_all_blades(dim);
    CHECK(t.checked > 0);
    CHECK(t.mismatches == 0);
  }
}

TEST_CASE("merge sign agrees with the oracle") {
  for (int s = 0; s < 16; ++s)
    for (int t = 0; t < 16; ++t) {
      const auto [sign, _] = oracle::wedge(blade_indices(static_cast<BladeMask>(s)), blade_indices(static_cast<BladeMask>(t)));
      CHECK(merge_sign(static_cast<BladeMask>(s), static_cast<BladeMask>(t)) == sign);
    }
}

TEST_CASE("worked wedge examples") {
  const KVector e0 = KVector::basis(3, {0}), e1 = KVector::basis(3, {1});
  CHECK(wedge(e0, e1).coefficient({0, 1}) == Scalar(1.0));
  CHECK(max_abs_diff(wedge(e1, e0), -wedge(e0, e1)) == 0.0);
  CHECK(max_abs_diff(wedge(e0 + e1, e0 - e1), Scalar(-2.0) * wedge(e0, e1)) == 0.0);
  // Grades past the ambient dimension give the zero top-grade vector.
  const KVector big = wedge(KVector::basis(3, {0, 1}), KVector::basis(3, {1, 2}));
  CHECK(big.grade() == 3);
  CHECK(norm(big) == 0.0);
}

TEST_CASE("worked Hodge star examples in K^3") {
  CHECK(hodge_star(KVector::basis(3, {0})).coefficient({1, 2}) == Scalar(1.0));
  CHECK(hodge_star(KVector::basis(3, {1})).coefficient({0, 2}) == Scalar(-1.0));
  const KVector top = hodge_star(KVector::basis(3, {0, 1, 2}));
  CHECK(top.grade() == 0);
  CHECK(top[0] == Scalar(1.0));
}

TEST_CASE("worked regressive examples in K^3") {
  const KVector r = regressive(KVector::basis(3, {0, 1}), KVector::basis(3, {1, 2}));
  CHECK(r.grade() == 1);
  CHECK(r.coefficient({1}) == Scalar(1.0));
  CHECK(norm(r - KVector::basis(3, {1})) == 0.0);
  CHECK(norm(regressive(KVector::basis(3, {0, 1}), KVector::basis(3, {0, 1}))) == 0.0);
  const KVector s = regressive(KVector::basis(3, {0}), KVector::basis(3, {0, 1, 2}));
  CHECK(std::abs(s.coefficient({0})) == doctest::Approx(1.0));
  CHECK(norm(s) == doctest::Approx(1.0));
}

TEST_CASE("gram inner product and norm examples") {
  const KVector e01 = KVector::basis(3, {0, 1});
  CHECK(gram_inner(e01, e01) == Scalar(1.0));
  CHECK(gram_inner(e01, KVector::basis(3, {0, 2})) == Scalar(0.0));
  const KVector uv = wedge(KVector::from_vector(v3(1, 1, 0)), KVector::from_vector(v3(0, 1, 1)));
  CHECK(gram_inner(uv, uv).real() == doctest::Approx(3.0));
  CHECK(norm(uv) == doctest::Approx(std::sqrt(3.0)));
  CHECK(norm(KVector(3, 2)) == 0.0);
  CHECK(norm(e01) == 1.0);
}

TEST_CASE("gram inner product equals the determinant of factor inner products") {
  for (Field f : {Field::real(), Field::complex()}) {
    Rng rng(11, f.is_real() ? 0 : 1);
    for (int trial = 0; trial < 300; ++trial) {
      const int dim = 3 + trial % 3;
      const int k = 1 + trial % dim;
      const auto u = gen::vecs(rng, f, dim, k), v = gen::vecs(rng, f, dim, k);
      Eigen::MatrixXcd g(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) g(i, j) = u[i].dot(v[j]);  // dot conjugates the left factor
      const Scalar got = gram_inner(wedge_all(dim, u), wedge_all(dim, v));
      CHECK(std::abs(got - g.determinant()) <= 1e-9 * std::max(1.0, std::abs(got)));
      // Hermitian symmetry
      CHECK(std::abs(gram_inner(wedge_all(dim, v), wedge_all(dim, u)) - std::conj(got)) <= 1e-9 * std::max(1.0, std::abs(got)));
    }
  }
}

TEST_CASE("wedge is anticommutative, associative and bilinear on random inputs") {
  for (Field f : {Field::real(), Field::complex()}) {
    Rng rng(12, f.is_real() ? 0 : 1);
    for (int trial = 0; trial < 200; ++trial) {
      const int dim = 3 + trial % 3;
      const int k = trial % 3, l = (trial / 3) % 2 + 1, m = 1;
      const KVector a = gen::kvec(rng, f, dim, k), b = gen::kvec(rng, f, dim, l), c = gen::kvec(rng, f, dim, m);
      const double scale = std::max(1.0, norm(a) * norm(b) * norm(c));
      if (k + l <= dim) {
        const double sign = (k * l) % 2 ? -1.0 : 1.0;
        CHECK(max_abs_diff(wedge(b, a), Scalar(sign) * wedge(a, b)) <= 1e-12 * scale);
      }
      if (k + l + m <= dim) {
        CHECK(max_abs_diff(wedge(wedge(a, b), c), wedge(a, wedge(b, c))) <= 1e-12 * scale);
      }
      if (k + l <= dim) {
        const Scalar s = gen::scalar(rng, f);
        const KVector a2 = gen::kvec(rng, f, dim, k);
        const KVector lhs = wedge(a + s * a2, b), rhs = wedge(a, b) + s * wedge(a2, b);
        CHECK(max_abs_diff(lhs, rhs) <= 1e-12 * std::max(1.0, norm(lhs)) * 10);
      }
    }
  }
}

TEST_CASE("double star is an exact sign") {
  for (Field f : {Field::real(), Field::complex()}) {
    Rng rng(13, f.is_real() ? 0 : 1);
    for (int dim = 3; dim <= 5; ++dim)
      for (int k = 0; k <= dim; ++k) {
        const KVector a = gen::kvec(rng, f, dim, k);
        const double sign = (k * (dim - k)) % 2 ? -1.0 : 1.0;
        CHECK(max_abs_diff(hodge_star(hodge_star(a)), Scalar(sign) * a) == 0.0);
      }
  }
}

namespace {

/// Norm of the component of r inside G^g(Span of the columns of q), q with
/// orthonormal columns; blades of q's columns form an orthonormal basis.
double norm_inside(const KVector& r, const Eigen::MatrixXcd& q) {
  const int g = r.grade();
  const int cols = static_cast<int>(q.cols());
  double sum = 0.0;
  for (const Blade& pick : all_blades(cols, g)) {
    std::vector<Vector> factors;
    for (int c : pick) factors.push_back(Vector(q.col(c)));
    sum += std::norm(gram_inner(wedge_all(r.ambient_dim(), factors), r));
  }
  return std::sqrt(sum);
}

Eigen::MatrixXcd orthonormal_columns(const std::vector<Vector>& factors) {
  Eigen::MatrixXcd a(factors.front().size(), factors.size());
  for (std::size_t j = 0; j < factors.size(); ++j) a.col(static_cast<Eigen::Index>(j)) = factors[j];
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(a.rows(), a.cols());
}

}  // namespace

TEST_CASE("regressive product lies in both spans") {
  for (Field f : {Field::real(), Field::complex()}) {
    Rng rng(14, f.is_real() ? 0 : 1);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const int dim = 3 + trial % 3;
      const int k = 1 + static_cast<int>(rng.below(dim));
      const int l = 1 + static_cast<int>(rng.below(dim));
      if (k + l <= dim) continue;
      const Decomposable u = gen::blade(rng, f, dim, k), v = gen::blade(rng, f, dim, l);
      const KVector r = regressive(u.blade(), v.blade());
      REQUIRE(r.grade() == k + l - dim);
      REQUIRE(norm(r) > 1e-8);
      const double scale = norm(r);
      CHECK(std::abs(norm_inside(r, orthonormal_columns(u.factors())) - scale) <= 1e-9 * scale);
      CHECK(std::abs(norm_inside(r, orthonormal_columns(v.factors())) - scale) <= 1e-9 * scale);
      ++checked;
    }
    CHECK(checked > 50);
  }
}

TEST_CASE("wedge norm from factors matches the blade norm and the Gram determinant") {
  for (Field f : {Field::real(), Field::complex()}) {
    Rng rng(15, f.is_real() ? 0 : 1);
    for (int trial = 0; trial < 200; ++trial) {
      const int dim = 3 + trial % 3;
      const int k = 1 + trial % dim;
      const auto u = gen::vecs(rng, f, dim, k);
      Eigen::MatrixXcd g(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) g(i, j) = u[i].dot(u[j]);
      const double oracle = std::sqrt(std::abs(g.determinant()));
      CHECK(gen::rel(wedge_norm(u), oracle) <= 1e-9);
      CHECK(gen::rel(norm(wedge_all(dim, u)), oracle) <= 1e-9);
    }
  }
}

TEST_CASE("orthogonal projection examples and property") {
  const Decomposable e0 = Decomposable::basis(3, {0});
  Vector p = project_orthogonal_complement(v3(1, 1, 0), e0);
  CHECK((p - v3(0, 1, 0)).norm() < 1e-15);
  p = project_orthogonal_complement(v3(0, 0, 1), Decomposable::basis(3, {0, 1}));
  CHECK((p - v3(0, 0, 1)).norm() < 1e-15);
  p = project_orthogonal_complement(v3(1, 1, 1), e0);
  CHECK((p - v3(0, 1, 1)).norm() < 1e-15);

  Rng rng(16);
  for (int trial = 0; trial < 100; ++trial) {
    const Field f = trial % 2 ? Field::complex() : Field::real();
    const Decomposable v = gen::blade(rng, f, 5, 1 + trial % 4);
    const Vector u = gen::vec(rng, f, 5);
    const Vector q = project_orthogonal_complement(u, v);
    for (const Vector& x : v.factors()) CHECK(std::abs(x.dot(q)) <= 1e-10 * x.norm() * u.norm());
    // u - q lies in Span(V)
    CHECK(norm(wedge(KVector::from_vector(Vector(u - q)), v.blade())) <= 1e-9 * u.norm() * v.norm());
  }
  CHECK_THROWS(project_orthogonal_complement(v3(1, 0, 0), Decomposable(3, {v3(1, 0, 0), v3(2, 0, 0)})));
}

TEST_CASE("annihilator basis matches the null space of U -> U v V") {
  CHECK(annihilator_basis(Decomposable::basis(3, {0}), 1).size() == 1);
  CHECK(annihilator_basis(Decomposable::basis(3, {0}), 2).size() == 2);
  CHECK(annihilator_basis(Decomposable::basis(4, {0, 1}), 2).size() == 5);
  const auto e0_basis = annihilator_basis(Decomposable::basis(3, {0}), 1);
  CHECK(std::abs(e0_basis.front().coefficient({0})) == doctest::Approx(1.0));

  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const Field f = trial % 2 ? Field::complex() : Field::real();
    const int dim = 3 + trial % 3;
    const int l = 1 + trial % (dim - 1);
    const int k = 1 + (trial / 3) % dim;
    const Decomposable v = gen::blade(rng, f, dim, l).normalized();
    // Matrix of U -> U v V on the blade basis.
    const int rows = binomial(dim, std::min(k + l, dim)), cols = binomial(dim, k);
    Eigen::MatrixXcd m(rows, cols);
    for (int c = 0; c < cols; ++c) {
      const KVector img = wedge(KVector::basis(dim, BladeBasis::get(dim, k).mask(c)), v.blade());
      m.col(c) = img.coeffs();
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
    lu.setThreshold(1e-10);
    const int nullity = cols - static_cast<int>(lu.rank());
    const auto basis = annihilator_basis(v, k);
    CHECK(static_cast<int>(basis.size()) == nullity);
    CHECK(nullity == binomial(dim, k) - binomial(dim - l, k));
    for (std::size_t i = 0; i < basis.size(); ++i) {
      CHECK(norm(wedge(basis[i], v.blade())) <= 1e-10);
      for (std::size_t j = 0; j < basis.size(); ++j)
        CHECK(std::abs(gram_inner(basis[i], basis[j]) - Scalar(i == j ? 1.0 : 0.0)) <= 1e-10);
    }
  }
}

TEST_CASE("decomposable keeps factors and normalizes") {
  Rng rng(18);
  const Decomposable d = gen::blade(rng, Field::complex(), 4, 2);
  CHECK(d.grade() == 2);
  CHECK(d.normalized().norm() == doctest::Approx(1.0).epsilon(1e-12));
  const Decomposable e = d.wedge(gen::vec(rng, Field::complex(), 4));
  CHECK(e.grade() == 3);
  CHECK(gen::rel(e.norm(), norm(wedge_all(4, e.factors()))) <= 1e-12);
  CHECK(Field::parse("C") == Field::complex());
  CHECK(Field::parse("real") == Field::real());
  CHECK_THROWS(Field::parse("H"));
}
