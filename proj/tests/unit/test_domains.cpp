#include <doctest.h>

#include "helpers.hpp"
#include "levi/domains.hpp"
#include "levi/geometry.hpp"
#include "levi/smooth_abs.hpp"

using namespace levi;

TEST_CASE("builtin domains") {
  const DomainSpec ball = builtin_domain("ball", {{"R", 1.0}, {"n", 3.0}});
  CHECK(ball.n == 3);
  CHECK(ball.components.size() == 1);
  CounterRng rng(1, 0);
  for (int i = 0; i < 10; ++i) {
    const Point p = testutil::random_point(rng, 3);
    CHECK(ball.rho.eval_real(p) == doctest::Approx(p.squaredNorm() - 1.0).epsilon(1e-14));
    CHECK(ball.phi.eval_real(p) == doctest::Approx(p.squaredNorm()).epsilon(1e-14));
  }

  const DomainSpec d51 = builtin_domain("prop51");
  const DomainSpec d52 = builtin_domain("prop52", {{"t", 6.0}});
  for (int i = 0; i < 10; ++i) {
    const Point p = testutil::random_point(rng, 3);
    const double x = p[0].real(), y = p[0].imag();
    CHECK(d51.rho.eval_real(p) ==
          doctest::Approx(-p[2].imag() + 2 * x * std::norm(p[1]) - x * std::pow(y, 4)).epsilon(1e-13));
    const Point q = testutil::random_point(rng, 4);
    const double a1 = std::norm(q[0]), a2 = std::norm(q[1]), a3 = std::norm(q[2]);
    const double xq = q[0].real(), yq = q[0].imag();
    const double P = -9 * a1 * a1 + 6 * (xq * xq * a2 + yq * yq * a3) + a2 * a3 + 0.25 * (a2 * a2 + a3 * a3);
    CHECK(d52.rho.eval_real(q) == doctest::Approx(-q[3].imag() + P).epsilon(1e-12));
    CHECK(d52.phi.eval_real(q) == doctest::Approx(6 * a1 + a2 + a3 + std::norm(q[3])).epsilon(1e-13));
  }

  for (const auto& name : builtin_domain_names()) CHECK_NOTHROW(builtin_domain(name).validate());
  CHECK_THROWS_AS(builtin_domain("torus"), InvalidArgument);
  CHECK_THROWS_AS(builtin_domain("annulus", {{"R_in", 1.0}, {"R_out", 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(builtin_domain("prop52", {{"t", 0.0}}), InvalidArgument);
}

TEST_CASE("psi: coefficients solve the C3 matching system") {
  // p(x) = a + b x^2 + c x^4 + d x^6 with p(1) = 1, p'(1) = 1, p''(1) = 0, p'''(1) = 0.
  Eigen::Matrix4d A;
  A << 1, 1, 1, 1,   //
      0, 2, 4, 6,    //
      0, 2, 12, 30,  //
      0, 0, 24, 120;
  const Eigen::Vector4d rhs(1, 1, 0, 0);
  const Eigen::Vector4d sol = A.fullPivLu().solve(rhs);
  const SmoothMaxConfig cfg;
  for (int k = 0; k < 4; ++k) CHECK(std::abs(cfg.coeffs[k] - sol[k]) <= 1e-15);
  CHECK(psi_eval(0.0).value == doctest::Approx(5.0 / 16.0).epsilon(1e-15));
  CHECK(psi_eval(1.5).value == 1.5);
  CHECK(psi_eval(-2.0).value == 2.0);

  // C3 matching at +-1.
  for (double s : {1.0, -1.0}) {
    const PsiValue in = psi_eval(s * (1 - 1e-12)), out = psi_eval(s * (1 + 1e-12));
    CHECK(std::abs(in.value - out.value) <= 1e-11);
    CHECK(std::abs(in.d1 - out.d1) <= 1e-10);
    CHECK(std::abs(in.d2 - out.d2) <= 1e-10);
    CHECK(std::abs(in.d3 - out.d3) <= 1e-10);
  }
  // Convexity on a grid.
  for (int i = 0; i <= 1000; ++i) CHECK(psi_eval(-1.0 + 2.0 * i / 1000).d2 >= 0.0);
}

TEST_CASE("smooth_max") {
  const DefiningExpr r1 = DefiningExpr::parse("re(z1)-1", 2);
  const DefiningExpr r2 = DefiningExpr::parse("-re(z1)-1", 2);
  const DefiningExpr s = smooth_max(r1, r2, 0.5);
  Point p = Point::Zero(2);
  p[0] = 0.6;
  CHECK(s.eval_real(p) == -0.4);
  p[0] = -0.6;
  CHECK(s.eval_real(p) == -0.4);
  p[0] = 0.0;
  CHECK(s.eval_real(p) == doctest::Approx(5.0 / 64.0 - 1.0).epsilon(1e-15));
  CHECK(smooth_max_expr(r1, r2, 0.5).to_string() == s.to_string());

  // Outside the band the composite equals the larger function exactly.
  CounterRng rng(2, 0);
  for (int i = 0; i < 200; ++i) {
    p[0] = Complex(rng.uniform(-3, 3), rng.uniform(-1, 1));
    const double a = r1.eval_real(p), b = r2.eval_real(p);
    if (std::abs(a - b) >= 0.5) CHECK(s.eval_real(p) == std::max(a, b));
  }

  // Second derivatives are continuous across the band edge 2x = r, third
  // derivatives of psi_r match there.
  const double xb = 0.25;
  for (double eps : {1e-7, 1e-9}) {
    Point a = Point::Zero(2), b = Point::Zero(2);
    a[0] = xb - eps;
    b[0] = xb + eps;
    CHECK((s.jet(a).dzdzbar - s.jet(b).dzdzbar).cwiseAbs().maxCoeff() <= 1e-4);
    CHECK(std::abs(psi_r_eval(0.5 - eps, 0.5).d3 - psi_r_eval(0.5 + eps, 0.5).d3) <= 1e-4);
  }

  CHECK_THROWS_AS(smooth_max(r1, r2, 0.0), InvalidArgument);
}

TEST_CASE("sample_boundary") {
  const DomainSpec ball = builtin_domain("ball", {{"R", 1.0}, {"n", 3.0}});
  const SampleSet s = sample_boundary(ball, 0, 100, 42);
  CHECK(s.points.size() == 100);
  for (const auto& p : s.points) CHECK(std::abs(p.squaredNorm() - 1.0) <= 1e-10);

  const SampleSet again = sample_boundary(ball, 0, 100, 42);
  bool identical = true;
  for (std::size_t i = 0; i < s.points.size(); ++i) identical = identical && (s.points[i].array() == again.points[i].array()).all();
  CHECK(identical);
  const SampleSet other = sample_boundary(ball, 0, 100, 43);
  CHECK((other.points[0] - s.points[0]).norm() > 0);

  const DomainSpec d51 = builtin_domain("prop51");
  for (const auto& p : sample_boundary(d51, 0, 100, 1, SampleRegion{Point::Zero(3), 0.3}).points) {
    const double x = p[0].real(), y = p[0].imag();
    // Im z3 is set to the height function itself, not found by iteration.
    CHECK(p[2].imag() == d51.graph_height->eval_real(p));
    CHECK(std::abs(p[2].imag() - (2 * x * std::norm(p[1]) - x * std::pow(y, 4))) <= 1e-15);
    CHECK(std::abs(d51.rho.eval_real(p)) <= 1e-10);
  }

  for (const auto& name : builtin_domain_names()) {
    const DomainSpec d = builtin_domain(name);
    for (std::size_t c = 0; c < d.components.size(); ++c) {
      for (const auto& p : sample_boundary(d, c, 30, 5).points) {
        CHECK(std::abs(d.rho.eval_real(p)) <= 1e-10);
        CHECK(d.rho.jet(p).dz.norm() > 1e-8);
      }
    }
  }

  // A "boundary" where d rho vanishes identically cannot be sampled.
  const DomainSpec flat = load_domain_json(R"js({"n": 2, "rho": "0*re(z1)", "phi": "abs2(z1)+abs2(z2)",
      "components": [{"label": "all", "seed": [0, 0, 0, 0]}], "box": [1, 1, 1, 1]})js");
  try {
    sample_boundary(flat, 0, 5, 1);
    FAIL("expected SamplingFailure");
  } catch (const SamplingFailure& e) {
    CHECK(e.successes() == 0);
  }
}

TEST_CASE("domain documents round-trip") {
  for (const auto& name : builtin_domain_names()) {
    const DomainSpec d = builtin_domain(name);
    const DomainSpec back = load_domain_json(domain_to_json(d));
    CHECK(back.n == d.n);
    CHECK(back.rho.to_string() == d.rho.to_string());
    CHECK(back.phi.to_string() == d.phi.to_string());
    CHECK(back.components.size() == d.components.size());
    CHECK(back.box == d.box);
    CHECK(bool(back.graph_height) == bool(d.graph_height));
  }
  CHECK_THROWS_AS(load_domain_json("{"), InvalidArgument);
  CHECK_THROWS_AS(load_domain_json(R"({"n": 2})"), InvalidArgument);
  // phi must be strictly plurisubharmonic.
  CHECK_THROWS_AS(load_domain_json(R"js({"n": 2, "rho": "abs2(z1)+abs2(z2)-1", "phi": "abs2(z1)",
      "components": [{"label": "b", "seed": [1, 0, 0, 0]}], "box": [1, 1, 1, 1]})js"),
                  InvalidArgument);
}

TEST_CASE("gluing keeps positive Levi eigenvalues positive") {
  const DomainSpec bounded = builtin_domain("prop51_bounded");
  const DomainSpec graph = builtin_domain("prop51");
  const double r = 0.05, R = 0.5;
  const DefiningExpr rho2 = DefiningExpr::parse("abs2(z1)+abs2(z2)+abs2(z3)", 3) - DefiningExpr::constant(3, R * R);
  Point center = Point::Zero(3);
  center[2] = R;
  int band = 0, violations = 0;
  for (const auto& p : sample_boundary(bounded, 0, 2000, 9, SampleRegion{center, 0.15}).points) {
    const double diff = graph.rho.eval_real(p) - rho2.eval_real(p);
    if (std::abs(diff) >= r || psi_r_eval(diff, r).d1 >= 1 - 1e-6) continue;
    const auto q = project_to_boundary(graph.rho, p);
    if (!q) continue;
    ++band;
    const RVector mu = levi_form_at(bounded.rho, bounded.phi, p).mu;
    const RVector mu1 = levi_form_at(graph.rho, graph.phi, *q).mu;
    const long pos = (mu.array() > 0).count();
    const long nonneg1 = (mu1.array() >= 0).count();
    if (pos < nonneg1) ++violations;
    if (band == 200) break;
  }
  CHECK(band == 200);
  CHECK(violations == 0);
}
