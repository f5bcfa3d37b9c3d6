#include "levi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "levi/multi_index.hpp"

namespace levi {

double hermitian_defect(const CMatrix& H) {
  if (H.size() == 0) return 0.0;
  return (H - H.adjoint()).cwiseAbs().maxCoeff();
}

EigenDecomposition eigen_ascending(const CMatrix& H) {
  if (H.rows() != H.cols()) throw NotHermitian("matrix is not square");
  const Eigen::Index m = H.rows();
  const double scale = m == 0 ? 0.0 : H.cwiseAbs().maxCoeff();
  if (hermitian_defect(H) > 1e-10 * std::max(1.0, scale)) throw NotHermitian("matrix is not Hermitian");

  CMatrix A = 0.5 * (H + H.adjoint());
  CMatrix V = CMatrix::Identity(m, m);
  const double tol = 1e-14 * std::max(scale, 1e-300);

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index p = 0; p < m; ++p)
      for (Eigen::Index q = p + 1; q < m; ++q) s += std::norm(A(p, q));
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
    for (Eigen::Index p = 0; p < m; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) {
        const Complex apq = A(p, q);
        const double g = std::abs(apq);
        if (g == 0.0) continue;
        const Complex phase = apq / g;
        const double app = A(p, p).real();
        const double aqq = A(q, q).real();
        const double tau = (aqq - app) / (2.0 * g);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // G = diag(1, conj(phase)) * [[c, s], [-s, c]] acting on columns p, q.
        const Complex g00 = c, g01 = s;
        const Complex g10 = -s * std::conj(phase), g11 = c * std::conj(phase);
        for (Eigen::Index k = 0; k < m; ++k) {
          const Complex akp = A(k, p), akq = A(k, q);
          A(k, p) = akp * g00 + akq * g10;
          A(k, q) = akp * g01 + akq * g11;
        }
        for (Eigen::Index k = 0; k < m; ++k) {
          const Complex apk = A(p, k), aqk = A(q, k);
          A(p, k) = std::conj(g00) * apk + std::conj(g10) * aqk;
          A(q, k) = std::conj(g01) * apk + std::conj(g11) * aqk;
        }
        for (Eigen::Index k = 0; k < m; ++k) {
          const Complex vkp = V(k, p), vkq = V(k, q);
          V(k, p) = vkp * g00 + vkq * g10;
          V(k, q) = vkp * g01 + vkq * g11;
        }
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        A(p, p) = A(p, p).real();
        A(q, q) = A(q, q).real();
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return A(a, a).real() < A(b, b).real(); });
  EigenDecomposition out;
  out.values.resize(m);
  out.vectors.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.values[i] = A(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]).real();
    out.vectors.col(i) = V.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

MetricData metric_at(const DefiningExpr& phi, const Point& p) {
  const Jet2 jet = phi.jet(p);
  MetricData out;
  out.g = 0.5 * (jet.dzdzbar + jet.dzdzbar.adjoint());
  const EigenDecomposition eig = eigen_ascending(out.g);
  const double largest = eig.values.size() ? eig.values.cwiseAbs().maxCoeff() : 0.0;
  if (eig.values.size() == 0 || !(eig.values[0] > 1e-14 * std::max(largest, 1.0))) {
    throw NotPositiveDefinite("metric weight is not strictly plurisubharmonic",
                              eig.values.size() ? eig.values[0] : 0.0);
  }
  Eigen::LLT<CMatrix> llt(out.g);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("Cholesky factorisation failed", eig.values[0]);
  out.chol = llt.matrixL();
  out.ginv = llt.solve(CMatrix::Identity(out.g.rows(), out.g.cols()));
  return out;
}

FrameData tangential_basis(const Jet2& rho_jet, const Point& p, std::optional<int> pivot) {
  const Eigen::Index n = p.size();
  FrameData out;
  out.basepoint = p;
  out.drho = rho_jet.dz;
  if (!(out.drho.norm() > kDegenerateGradient)) {
    throw DegenerateBoundaryPoint("|d rho| <= 1e-8 at the requested point");
  }
  int pv = 0;
  if (pivot) {
    pv = *pivot;
    if (pv < 0 || pv >= n) throw InvalidArgument("pivot index out of range");
    if (!(std::abs(out.drho[pv]) > kDegenerateGradient)) {
      throw DegenerateBoundaryPoint("pivot coordinate has vanishing d rho");
    }
  } else {
    out.drho.cwiseAbs().maxCoeff(&pv);
  }
  out.pivot = pv;
  out.L = CMatrix::Zero(n, n - 1);
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == pv) continue;
    out.L(j, col) = 1.0;
    out.L(pv, col) = -out.drho[j] / out.drho[pv];
    ++col;
  }
  return out;
}

FrameData tangential_basis(const DefiningExpr& rho, const Point& p, std::optional<int> pivot) {
  return tangential_basis(rho.jet(p), p, pivot);
}

LeviData levi_form_at(const DefiningExpr& rho, const DefiningExpr& phi, const Point& p, const LeviOptions& options) {
  const Jet2 jet = rho.jet(p);
  LeviData out;
  out.rho_value = jet.value;
  if (options.boundary_tolerance >= 0.0 && std::abs(jet.value) > options.boundary_tolerance) {
    throw InvalidArgument("point is not on the boundary: |rho| = " + std::to_string(std::abs(jet.value)));
  }
  out.frame = tangential_basis(jet, p, options.pivot);
  out.metric = metric_at(phi, p);

  const CMatrix& L = out.frame.L;
  const CMatrix hess = 0.5 * (jet.dzdzbar + jet.dzdzbar.adjoint());
  out.c_raw = L.transpose() * hess * L.conjugate();
  out.c_raw = 0.5 * (out.c_raw + out.c_raw.adjoint()).eval();
  out.g_restricted = L.transpose() * out.metric.g * L.conjugate();
  out.g_restricted = 0.5 * (out.g_restricted + out.g_restricted.adjoint()).eval();

  Eigen::LLT<CMatrix> llt(out.g_restricted);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("restricted metric is not positive definite", 0.0);
  out.frame_chol = llt.matrixL();
  const CMatrix Sinv = out.frame_chol.triangularView<Eigen::Lower>().solve(
      CMatrix::Identity(out.g_restricted.rows(), out.g_restricted.cols()));

  const double drho2 = (out.frame.drho.adjoint() * out.metric.ginv * out.frame.drho)(0, 0).real();
  out.drho_norm = std::sqrt(std::max(drho2, 0.0));
  out.scale = options.normalize ? 1.0 / out.drho_norm : 1.0;

  out.c_on = out.scale * (Sinv * out.c_raw * Sinv.adjoint());
  out.c_on = 0.5 * (out.c_on + out.c_on.adjoint()).eval();
  EigenDecomposition eig = eigen_ascending(out.c_on);
  out.mu = std::move(eig.values);
  out.eigvecs = std::move(eig.vectors);
  return out;
}

CMatrix form_action_matrix(const CMatrix& H, int q) {
  const int m = static_cast<int>(H.rows());
  if (H.cols() != m) throw InvalidArgument("form action needs a square matrix");
  if (q < 0 || q > m) throw InvalidArgument("form degree out of range");
  const int N = binomial(m, q);
  CMatrix A = CMatrix::Zero(N, N);
  if (q == 0) return A;
  for (const MultiIndex& J : increasing_multi_indices(m, q - 1)) {
    for (int j = 0; j < m; ++j) {
      const Insertion ij = insert_index(j, J);
      if (ij.sign == 0) continue;
      const int Kp = multi_index_rank(ij.index, m);
      for (int k = 0; k < m; ++k) {
        const Insertion ik = insert_index(k, J);
        if (ik.sign == 0) continue;
        const int K = multi_index_rank(ik.index, m);
        A(Kp, K) += H(j, k) * static_cast<double>(ij.sign * ik.sign);
      }
    }
  }
  return A;
}

double form_action(const CMatrix& H, int q, const CVector& f) {
  const int m = static_cast<int>(H.rows());
  if (f.size() != binomial(m, q)) {
    throw InvalidArgument("form coefficient count does not match degree " + std::to_string(q));
  }
  double total = 0.0;
  if (q == 0) return total;
  for (const MultiIndex& J : increasing_multi_indices(m, q - 1)) {
    for (int j = 0; j < m; ++j) {
      const Insertion ij = insert_index(j, J);
      if (ij.sign == 0) continue;
      const Complex fj = static_cast<double>(ij.sign) * f[multi_index_rank(ij.index, m)];
      for (int k = 0; k < m; ++k) {
        const Insertion ik = insert_index(k, J);
        if (ik.sign == 0) continue;
        const Complex fk = static_cast<double>(ik.sign) * f[multi_index_rank(ik.index, m)];
        total += (H(j, k) * fk * std::conj(fj)).real();
      }
    }
  }
  return total;
}

}  // namespace levi
