#include <doctest.h>

#include "helpers.hpp"
#include "levi/domains.hpp"
#include "levi/expr.hpp"

using namespace levi;

namespace {

// Real-coordinate finite differences turned into Wirtinger derivatives.
struct FdJet {
  CVector dz;
  CMatrix dzdzbar, dzdz;
};

FdJet finite_difference_jet(const DefiningExpr& e, const Point& p, double h1, double h2) {
  const int n = static_cast<int>(p.size());
  auto f = [&](const RVector& xy) {
    Point q(n);
    for (int j = 0; j < n; ++j) q[j] = Complex(xy[2 * j], xy[2 * j + 1]);
    return e.eval(q).real();
  };
  RVector x0(2 * n);
  for (int j = 0; j < n; ++j) {
    x0[2 * j] = p[j].real();
    x0[2 * j + 1] = p[j].imag();
  }
  RVector grad(2 * n);
  for (int a = 0; a < 2 * n; ++a) {
    RVector xp = x0, xm = x0;
    xp[a] += h1;
    xm[a] -= h1;
    grad[a] = (f(xp) - f(xm)) / (2 * h1);
  }
  Eigen::MatrixXd hr(2 * n, 2 * n);
  for (int a = 0; a < 2 * n; ++a) {
    for (int b = 0; b < 2 * n; ++b) {
      RVector pp = x0, pm = x0, mp = x0, mm = x0;
      pp[a] += h2, pp[b] += h2;
      pm[a] += h2, pm[b] -= h2;
      mp[a] -= h2, mp[b] += h2;
      mm[a] -= h2, mm[b] -= h2;
      hr(a, b) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h2 * h2);
    }
  }
  const Complex I(0, 1);
  FdJet out;
  out.dz.resize(n);
  out.dzdzbar.resize(n, n);
  out.dzdz.resize(n, n);
  for (int j = 0; j < n; ++j) {
    out.dz[j] = 0.5 * (grad[2 * j] - I * grad[2 * j + 1]);
    for (int k = 0; k < n; ++k) {
      const double xx = hr(2 * j, 2 * k), xy = hr(2 * j, 2 * k + 1), yx = hr(2 * j + 1, 2 * k),
                   yy = hr(2 * j + 1, 2 * k + 1);
      out.dzdzbar(j, k) = 0.25 * (xx + I * xy - I * yx + yy);
      out.dzdz(j, k) = 0.25 * (xx - I * xy - I * yx - yy);
    }
  }
  return out;
}

double rel_err(const CMatrix& a, const CMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("parse: grammar smoke cases") {
  const DefiningExpr e = DefiningExpr::parse("abs2(z1)+abs2(z2)-1", 2);
  Point p(2);
  p << Complex(0.3, 0.4), Complex(-0.5, 0.1);
  CHECK(e.eval_real(p) == doctest::Approx(0.25 + 0.26 - 1.0).epsilon(1e-15));

  const DefiningExpr rho = parse_expr("-im(z3)+2*re(z1)*abs2(z2)-re(z1)*im(z1)^4", 3);
  CHECK(rho.nvars() == 3);
  CHECK(DefiningExpr::parse("  abs2 ( z1 ) * 2 ", 1).eval_real(Point::Ones(1)) == doctest::Approx(2.0));
}

TEST_CASE("parse: errors carry positions") {
  try {
    DefiningExpr::parse("re(z1", 1);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 6);
  }
  CHECK_THROWS_AS(DefiningExpr::parse("foo(z1)", 1), ParseError);
  CHECK_THROWS_AS(DefiningExpr::parse("z3", 2), ParseError);
  CHECK_THROWS_AS(DefiningExpr::parse("z1^-2", 1), ParseError);
  CHECK_THROWS_AS(DefiningExpr::parse("1 +", 1), ParseError);
  CHECK_THROWS_AS(DefiningExpr::parse("abs2(z1))", 1), ParseError);
}

TEST_CASE("parse: aliases map to 1-based variables") {
  const DefiningExpr e = DefiningExpr::parse("re(s)*2", 1, {{"s", 1}});
  Point p(1);
  p << Complex(0.25, 3.0);
  CHECK(e.eval_real(p) == doctest::Approx(0.5));
  CHECK_THROWS_AS(DefiningExpr::parse("s", 1, {{"s", 2}}), ParseError);
}

TEST_CASE("eval_real: examples") {
  const DefiningExpr ball = DefiningExpr::parse("abs2(z1)+abs2(z2)-1", 2);
  Point p(2);
  p << 1.0, 0.0;
  CHECK(ball.eval_real(p) == 0.0);

  // P(0.1+0.2i, 0.3) = 2*0.1*0.09 - 0.1*0.2^4 = 0.018 - 0.00016, worked by hand.
  const double P = 0.01784;
  const DefiningExpr rho1 = DefiningExpr::parse("-im(z3)+2*re(z1)*abs2(z2)-re(z1)*im(z1)^4", 3);
  Point q(3);
  q << Complex(0.1, 0.2), Complex(0.3, 0.0), Complex(0.0, P);
  CHECK(std::abs(rho1.eval_real(q)) < 1e-15);

  const DomainSpec d = builtin_domain("prop52", {{"t", 6.0}});
  Point e1 = Point::Zero(4);
  e1[0] = 1.0;
  CHECK(d.phi.eval_real(e1) == doctest::Approx(6.0).epsilon(1e-15));

  CHECK_THROWS_AS(DefiningExpr::parse("z1", 1).eval_real(Point::Constant(1, Complex(0, 1))), NonRealValue);
}

TEST_CASE("round trip through the canonical printer") {
  CounterRng rng(11, 0);
  const char* texts[] = {"-im(z3)+2*re(z1)*abs2(z2)-re(z1)*im(z1)^4",
                         "abs2(z1)^2-3*re(conj(z2)*z3)+0.25*(abs2(z2)-abs2(z3))^2",
                         "smoothmax(re(z1)-1, -re(z1)-1, 0.5)", "-(-z1*conj(z1))+1e-3"};
  for (const char* t : texts) {
    const DefiningExpr e = DefiningExpr::parse(t, 3);
    const DefiningExpr back = DefiningExpr::parse(e.to_string(), 3);
    CHECK(back.to_string() == e.to_string());
    for (int i = 0; i < 20; ++i) {
      const Point p = testutil::random_point(rng, 3);
      CHECK(std::abs(e.eval(p) - back.eval(p)) <= 1e-12);
    }
  }
}

TEST_CASE("jet: analytic case |z|^2") {
  CounterRng rng(3, 0);
  const DefiningExpr e = DefiningExpr::parse("abs2(z1)+abs2(z2)+abs2(z3)", 3);
  for (int i = 0; i < 10; ++i) {
    const Point p = testutil::random_point(rng, 3);
    const Jet2 j = e.jet(p);
    CHECK((j.dz - p.conjugate()).norm() < 1e-15);
    CHECK((j.dzdzbar - CMatrix::Identity(3, 3)).norm() < 1e-15);
    CHECK(j.dzdz.norm() < 1e-15);
  }
}

TEST_CASE("jet: displayed complex Hessians of the graph examples") {
  CounterRng rng(5, 0);
  const DefiningExpr rho1 = builtin_domain("prop51").rho;
  for (int i = 0; i < 20; ++i) {
    const Point p = testutil::random_point(rng, 3, 0.5);
    const Jet2 j = rho1.jet(p);
    const double x = p[0].real(), y = p[0].imag();
    CHECK(std::abs(j.dzdzbar(0, 0) - Complex(-3 * x * y * y, 0)) < 1e-12);
    CHECK(std::abs(j.dzdzbar(0, 1) - p[1]) < 1e-12);
    CHECK(std::abs(j.dzdzbar(1, 0) - std::conj(p[1])) < 1e-12);
    CHECK(std::abs(j.dzdzbar(1, 1) - Complex(2 * x, 0)) < 1e-12);
  }

  const DefiningExpr rho = builtin_domain("prop52", {{"t", 1.0}}).rho;
  Point p(4);
  p << 0.01, 0.02, 0.03, 0.0;
  const Complex z1 = p[0], z2 = p[1], z3 = p[2];
  const double x = z1.real(), y = z1.imag();
  const double a1 = std::norm(z1), a2 = std::norm(z2), a3 = std::norm(z3);
  const Complex I(0, 1);
  CMatrix H = CMatrix::Zero(4, 4);
  H(0, 0) = -36 * a1 + 3 * a2 + 3 * a3;
  H(1, 1) = 6 * x * x + a2 + a3;
  H(2, 2) = 6 * y * y + a2 + a3;
  H(0, 1) = 6 * x * z2;
  H(1, 0) = 6 * x * std::conj(z2);
  H(0, 2) = -6.0 * I * y * z3;
  H(2, 0) = 6.0 * I * y * std::conj(z3);
  H(1, 2) = std::conj(z2) * z3;
  H(2, 1) = z2 * std::conj(z3);
  CHECK((rho.jet(p).dzdzbar - H).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("jet: agrees with finite differences on builtin expressions") {
  CounterRng rng(17, 0);
  for (const auto& name : builtin_domain_names()) {
    const DomainSpec d = builtin_domain(name);
    for (const DefiningExpr* e : {&d.rho, &d.phi}) {
      for (int i = 0; i < 100; ++i) {
        const Point p = testutil::random_point(rng, d.n, 0.6);
        const Jet2 j = e->jet(p);
        const FdJet fd = finite_difference_jet(*e, p, 1e-5, 1e-4);
        CHECK(rel_err(j.dz, fd.dz) <= 1e-6);
        CHECK(rel_err(j.dzdzbar, fd.dzdzbar) <= 1e-4);
        CHECK(rel_err(j.dzdz, fd.dzdz) <= 1e-4);
        // Structural invariants of real expressions.
        CHECK((j.dzbar - j.dz.conjugate()).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((j.dzdzbar - j.dzdzbar.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((j.dzdz - j.dzdz.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
}

TEST_CASE("jet: Leibniz rule") {
  CounterRng rng(23, 0);
  const DefiningExpr a = DefiningExpr::parse("abs2(z1)*re(z2)-im(z1)^3", 2);
  const DefiningExpr b = DefiningExpr::parse("re(z1*conj(z2))+abs2(z2)^2+2", 2);
  const DefiningExpr ab = a * b;
  for (int i = 0; i < 20; ++i) {
    const Point p = testutil::random_point(rng, 2);
    const Jet2 ja = a.jet(p), jb = b.jet(p), jab = ab.jet(p);
    CHECK(jab.value == doctest::Approx(ja.value * jb.value).epsilon(1e-13));
    const CVector dz = ja.value * jb.dz + jb.value * ja.dz;
    CHECK((jab.dz - dz).norm() <= 1e-12);
    const CMatrix h = ja.value * jb.dzdzbar + jb.value * ja.dzdzbar + ja.dz * jb.dzbar.transpose() +
                      jb.dz * ja.dzbar.transpose();
    CHECK((jab.dzdzbar - h).norm() <= 1e-12);
  }
}
