#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "levi/random.hpp"
#include "levi/types.hpp"

namespace testutil {

inline levi::Point random_point(levi::CounterRng& rng, int n, double scale = 1.0) {
  levi::Point p(n);
  for (int j = 0; j < n; ++j) p[j] = levi::Complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale));
  return p;
}

inline levi::CMatrix random_hermitian(levi::CounterRng& rng, int m, double scale = 1.0) {
  levi::CMatrix A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = levi::Complex(rng.normal(), rng.normal()) * scale;
  return 0.5 * (A + A.adjoint());
}

inline levi::CMatrix random_unitary(levi::CounterRng& rng, int n) {
  levi::CMatrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = levi::Complex(rng.normal(), rng.normal());
  Eigen::HouseholderQR<levi::CMatrix> qr(A);
  return qr.householderQ() * levi::CMatrix::Identity(n, n);
}

/// Ascending random spectrum in [-1, 1]^m.
inline levi::RVector random_spectrum(levi::CounterRng& rng, int m) {
  levi::RVector mu(m);
  for (int j = 0; j < m; ++j) mu[j] = rng.uniform(-1.0, 1.0);
  std::sort(mu.data(), mu.data() + m);
  return mu;
}

/// Roots of det(H - x I) by sign changes of the characteristic polynomial on
/// a fine grid followed by bisection. Independent of any eigensolver.
inline std::vector<double> charpoly_roots(const levi::CMatrix& H) {
  const int m = static_cast<int>(H.rows());
  auto det = [&](double x) {
    levi::CMatrix A = H - x * levi::CMatrix::Identity(m, m);
    return A.partialPivLu().determinant().real();
  };
  const double bound = H.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  const int steps = 20000;
  std::vector<double> roots;
  double x0 = -bound, f0 = det(x0);
  for (int i = 1; i <= steps; ++i) {
    const double x1 = -bound + 2.0 * bound * i / steps;
    const double f1 = det(x1);
    if (f0 == 0.0) {
      roots.push_back(x0);
    } else if ((f0 < 0) != (f1 < 0) && f1 != 0.0) {
      double a = x0, b = x1, fa = f0;
      for (int it = 0; it < 200; ++it) {
        const double c = 0.5 * (a + b);
        const double fc = det(c);
        if ((fc < 0) == (fa < 0)) {
          a = c;
          fa = fc;
        } else {
          b = c;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

}  // namespace testutil
