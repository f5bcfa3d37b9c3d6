#include "levi/smooth_abs.hpp"

#include <cmath>

namespace levi {

PsiValue psi_eval(double x, const SmoothMaxConfig& cfg) {
  if (std::abs(x) >= 1.0) return {std::abs(x), x > 0.0 ? 1.0 : -1.0, 0.0, 0.0};
  const auto [a, b, c, d] = cfg.coeffs;
  const double x2 = x * x;
  PsiValue out;
  out.value = a + x2 * (b + x2 * (c + x2 * d));
  out.d1 = x * (2.0 * b + x2 * (4.0 * c + x2 * 6.0 * d));
  out.d2 = 2.0 * b + x2 * (12.0 * c + x2 * 30.0 * d);
  out.d3 = x * (24.0 * c + x2 * 120.0 * d);
  return out;
}

PsiValue psi_r_eval(double x, double r, const SmoothMaxConfig& cfg) {
  const PsiValue p = psi_eval(x / r, cfg);
  return {r * p.value, p.d1, p.d2 / r, p.d3 / (r * r)};
}

}  // namespace levi
