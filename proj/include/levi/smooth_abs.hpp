#pragma once

#include <array>

namespace levi {

/// Coefficients (a, b, c, d) of the even sextic a + b x^2 + c x^4 + d x^6 that
/// replaces |x| on [-1, 1]. Defaults are the unique sextic whose value and first
/// three derivatives agree with |x| at x = +-1.
struct SmoothMaxConfig {
  double r = 0.05;
  std::array<double, 4> coeffs{5.0 / 16.0, 15.0 / 16.0, -5.0 / 16.0, 1.0 / 16.0};
};

/// psi and its first three derivatives at one abscissa.
struct PsiValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

/// Convex C^3 surrogate for |x|: exactly |x| for |x| >= 1.
PsiValue psi_eval(double x, const SmoothMaxConfig& cfg = {});

/// psi_r(x) = r psi(x / r), exactly |x| for |x| >= r.
PsiValue psi_r_eval(double x, double r, const SmoothMaxConfig& cfg = {});

}  // namespace levi
