#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "levi/mkh.hpp"

using namespace levi;

namespace {

// Random polynomial of low degree times the bump of `window`.
ScalarField random_bump_field(CounterRng& rng, int n, const Window& window) {
  ScalarField poly = ScalarField::constant(n, Complex(rng.normal(), rng.normal()));
  for (int k = 0; k < n; ++k) {
    std::vector<int> a(n, 0), b(n, 0);
    a[k] = 1;
    poly += ScalarField::monomial(n, Complex(rng.normal(), rng.normal()), a, b);
    poly += ScalarField::monomial(n, Complex(rng.normal(), rng.normal()), b, a);
  }
  return poly * ScalarField::bump(n, window);
}

Window random_window(CounterRng& rng, int n) {
  Window w{Point(n), rng.uniform(0.35, 0.55)};
  for (int k = 0; k < n; ++k) w.center[k] = Complex(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));
  return w;
}

FormField random_form(CounterRng& rng, int n, int q, const Window& w) {
  FormField f(n, q);
  for (std::size_t i = 0; i < f.components().size(); ++i) f[i] = random_bump_field(rng, n, w);
  return f;
}

double max_abs_on_samples(const FormField& f, CounterRng& rng, int count) {
  double m = 0.0;
  for (int i = 0; i < count; ++i) {
    const CVector v = f.eval(testutil::random_point(rng, f.n(), 0.8));
    if (v.size()) m = std::max(m, v.cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace

TEST_CASE("dbar squares to zero") {
  CounterRng rng(1, 0);
  FormField f(2, 1);
  f.component({1}) = ScalarField::monomial(2, 1.0, {0, 0}, {1, 0});  // zbar1 dzbar2
  const FormField df = dbar(f);
  CHECK(df.q() == 2);
  for (int i = 0; i < 5; ++i) CHECK(std::abs(df.eval(testutil::random_point(rng, 2))[0] - 1.0) < 1e-15);
  CHECK(max_abs_on_samples(dbar(df), rng, 10) == 0.0);

  for (int n = 2; n <= 3; ++n) {
    for (int q = 0; q < n; ++q) {
      const FormField g = random_form(rng, n, q, random_window(rng, n));
      CHECK(max_abs_on_samples(dbar(dbar(g)), rng, 200) <= 1e-12);
    }
  }
  const FormField b = bump_form(2, Window{Point::Zero(2), 0.7});
  CHECK(max_abs_on_samples(dbar(dbar(b)), rng, 200) <= 1e-12);
}

TEST_CASE("dbar of holomorphic coefficients only sees the window") {
  CounterRng rng(2, 0);
  const Window w{Point::Zero(2), 0.7};
  const ScalarField bump = ScalarField::bump(2, w);
  FormField f(2, 1);
  f[0] = ScalarField::monomial(2, 1.0, {1, 0}, {0, 0}) * bump;  // z1 b dzbar1
  const FormField df = dbar(f);
  for (int i = 0; i < 50; ++i) {
    const Point p = testutil::random_point(rng, 2, 0.5);
    // dbar(z1 b dzbar1) = z1 db/dzbar2 dzbar2 ^ dzbar1 = -z1 db/dzbar2 dzbar1 ^ dzbar2
    CHECK(std::abs(df.eval(p)[0] + p[0] * bump.dzbar(1).eval(p)) <= 1e-14);
  }
}

TEST_CASE("weighted adjoint") {
  CounterRng rng(3, 0);
  const Window w{Point::Zero(2), 0.7};
  const ScalarField bump = ScalarField::bump(2, w);
  FormField f(2, 1);
  f[0] = ScalarField::monomial(2, 1.0, {1, 0}, {0, 0}) * bump;
  const FormField s0 = dbar_star_t(f, WeightConfig{0.0});
  const FormField s3 = dbar_star_t(f, WeightConfig{3.0});
  for (int i = 0; i < 50; ++i) {
    const Point p = testutil::random_point(rng, 2, 0.5);
    const Complex expected = -bump.eval(p) - p[0] * bump.dz(0).eval(p);
    CHECK(std::abs(s0.eval(p)[0] - expected) <= 1e-13);
    // Linear in t: the difference is t * zbar_k f_k.
    CHECK(std::abs(s3.eval(p)[0] - s0.eval(p)[0] - 3.0 * std::conj(p[0]) * f.eval(p)[0]) <= 1e-13);
  }
  CHECK_THROWS_AS(dbar_star_t(FormField(2, 0), WeightConfig{}), InvalidArgument);

  // (dbar u, f)_t = (u, dbar*_t f)_t for compactly supported pairs.
  const auto grid = QuadratureGrid::cube(2, 1.0, 12);
  const auto fine = grid.refined();
  for (int i = 0; i < 20; ++i) {
    const int q = 1 + i % 2;
    const FormField u = random_form(rng, 2, q - 1, random_window(rng, 2));
    const FormField g = random_form(rng, 2, q, random_window(rng, 2));
    for (double t : {0.0, 1.0, 5.0}) {
      const WeightConfig wt{t};
      const Complex lhs = weighted_inner(dbar(u), g, wt, grid);
      const Complex rhs = weighted_inner(u, dbar_star_t(g, wt), wt, grid);
      // Quadrature tolerance: change of either side under refinement.
      const double tol = std::abs(weighted_inner(dbar(u), g, wt, fine) - lhs) +
                         std::abs(weighted_inner(u, dbar_star_t(g, wt), wt, fine) - rhs) + 1e-12 * std::abs(lhs);
      CHECK(std::abs(lhs - rhs) <= 10 * tol);
    }
  }
}

TEST_CASE("weighted norms") {
  // ||b||^2 over C^2 is radial: 2 pi^2 int_0^w b(r^2/w^2)^2 r^3 dr.
  const double width = 0.7;
  auto b = [&](double r) {
    const double s = r * r / (width * width);
    return s < 1 ? std::exp(-1.0 / (1.0 - s)) : 0.0;
  };
  double radial = 0.0;
  const int steps = 200000;  // composite Simpson
  const double h = width / steps;
  for (int i = 0; i <= steps; ++i) {
    const double r = i * h;
    const double wgt = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    radial += wgt * b(r) * b(r) * r * r * r;
  }
  radial *= h / 3.0 * 2.0 * std::numbers::pi * std::numbers::pi;

  const FormField f = bump_form(2, Window{Point::Zero(2), width});
  const double quad = weighted_inner(f, f, WeightConfig{0.0}, QuadratureGrid::cube(2, 1.0, 32)).real();
  CHECK(quad == doctest::Approx(radial).epsilon(1e-6));
  const double gauss =
      weighted_inner(f, f, WeightConfig{0.0}, QuadratureGrid::cube(2, 1.0, 24, QuadratureRule::GaussLegendre)).real();
  CHECK(gauss == doctest::Approx(radial).epsilon(1e-5));

  // Strictly decreasing in t.
  const auto grid = QuadratureGrid::cube(2, 1.0, 16);
  double prev = std::numeric_limits<double>::infinity();
  for (double t : {0.0, 0.5, 1.0, 2.0, 5.0}) {
    const double v = weighted_inner(f, f, WeightConfig{t}, grid).real();
    CHECK(v < prev);
    prev = v;
  }

  const FormField zero(2, 1);
  CHECK(weighted_inner(zero, zero, WeightConfig{1.0}, grid) == Complex(0.0));
  CHECK(mkh_residual(zero, WeightConfig{1.0}, grid) == 0.0);
}

TEST_CASE("hessian_action_phi in the flat metric") {
  CounterRng rng(4, 0);
  for (int q = 1; q <= 2; ++q) {
    const FormField f = random_form(rng, 3, q, random_window(rng, 3));
    for (int i = 0; i < 10; ++i) {
      const Point p = testutil::random_point(rng, 3, 0.3);
      CHECK(hessian_action_phi(f, p) == doctest::Approx(q * f.eval(p).squaredNorm()).epsilon(1e-13));
    }
  }
  CHECK(hessian_action_phi(FormField(3, 1), Point::Zero(3)) == 0.0);
}

TEST_CASE("MKH identity on the bump form") {
  const FormField f = bump_form(2, Window{Point::Zero(2), 0.7});
  for (double t : {0.0, 1.0, 5.0}) {
    double prev = -1.0;
    for (int N : {6, 12, 24}) {
      const MkhTerms m = mkh_terms(f, WeightConfig{t}, QuadratureGrid::cube(2, 1.0, N));
      CHECK(m.lhs > 0);
      if (t > 0) CHECK(m.hessian_term > 0);
      if (prev >= 0 && prev > 1e-9) CHECK(m.residual <= prev / 4.0);
      prev = m.residual;
    }
  }
  const auto grid = QuadratureGrid::cube(2, 1.0, 12);
  CHECK(mkh_terms(f, WeightConfig{5.0}, grid).hessian_term > mkh_terms(f, WeightConfig{1.0}, grid).hessian_term);

  // Relabelling z1 <-> z2 leaves the residual unchanged.
  const FormField g = f.relabel({1, 0});
  CHECK(g.component({1}).terms().size() == f.component({0}).terms().size());
  for (double t : {0.0, 1.0, 5.0}) {
    CHECK(std::abs(mkh_residual(f, WeightConfig{t}, grid) - mkh_residual(g, WeightConfig{t}, grid)) <= 1e-12);
  }

  // A (0,2)-form in C^3 satisfies the identity as well.
  CounterRng rng(5, 0);
  const FormField h = random_form(rng, 3, 2, Window{Point::Zero(3), 0.6});
  CHECK(mkh_residual(h, WeightConfig{1.0}, QuadratureGrid::cube(3, 1.0, 10)) <= 1e-2);
}

TEST_CASE("support checks") {
  const auto grid = QuadratureGrid::cube(2, 1.0, 8);
  CHECK_THROWS_AS(mkh_residual(bump_form(2, Window{Point::Zero(2), 1.2}), WeightConfig{}, grid), SupportOverflow);
  FormField poly(2, 1);
  poly[0] = ScalarField::monomial(2, 1.0, {1, 0}, {0, 0});
  CHECK_THROWS_AS(mkh_residual(poly, WeightConfig{}, grid), SupportOverflow);
  const auto r = grid.refined();
  CHECK(r.points_per_axis == 16);
}
