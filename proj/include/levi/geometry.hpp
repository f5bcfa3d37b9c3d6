#pragma once

#include <optional>

#include "levi/expr.hpp"

namespace levi {

/// Kaehler metric g_{j kbar} = d^2 phi / dz_j dzbar_k at a point.
struct MetricData {
  CMatrix g;     ///< row j, column k holds g_{j kbar}
  CMatrix ginv;  ///< inverse of g
  CMatrix chol;  ///< lower triangular S with g = S S^*
};

/// Tangential (1,0)-frame obtained by eliminating the pivot coordinate.
struct FrameData {
  Point basepoint;
  CVector drho;  ///< d rho / dz_j
  CMatrix L;     ///< n x (n-1); column j is a tangential vector
  int pivot = 0; ///< 0-based eliminated coordinate
};

struct LeviData {
  FrameData frame;
  MetricData metric;
  double rho_value = 0.0;
  CMatrix c_raw;         ///< c_{j kbar} in the frame L
  CMatrix g_restricted;  ///< Gram matrix <L_j, L_k>_g
  CMatrix frame_chol;    ///< S with g_restricted = S S^*
  CMatrix c_on;          ///< Levi matrix in a g-orthonormal frame, times `scale`
  RVector mu;            ///< ascending eigenvalues of c_on
  CMatrix eigvecs;       ///< c_on = eigvecs * diag(mu) * eigvecs^*
  double drho_norm = 0.0;  ///< |d rho|_g
  double scale = 1.0;      ///< 1 / |d rho|_g when normalised, else 1
};

struct LeviOptions {
  bool normalize = true;
  /// Forces the eliminated coordinate (0-based); otherwise argmax |d rho/dz_j|.
  std::optional<int> pivot;
  /// Largest |rho(p)| accepted as a boundary point; negative disables the check.
  double boundary_tolerance = 1e-10;
};

inline constexpr double kDegenerateGradient = 1e-8;

MetricData metric_at(const DefiningExpr& phi, const Point& p);

FrameData tangential_basis(const DefiningExpr& rho, const Point& p, std::optional<int> pivot = std::nullopt);
FrameData tangential_basis(const Jet2& rho_jet, const Point& p, std::optional<int> pivot = std::nullopt);

LeviData levi_form_at(const DefiningExpr& rho, const DefiningExpr& phi, const Point& p,
                      const LeviOptions& options = {});

struct EigenDecomposition {
  RVector values;   ///< ascending
  CMatrix vectors;  ///< unitary, columns are eigenvectors
};

/// Cyclic complex Jacobi eigensolver for small Hermitian matrices.
EigenDecomposition eigen_ascending(const CMatrix& H);

/// Matrix A on the increasing-multi-index basis of (0,q)-forms such that
/// form_action(H, q, f) = f^* A f.
CMatrix form_action_matrix(const CMatrix& H, int q);

/// sum_J sum_{j,k} H[j][k] f_{kJ} conj(f_{jJ}) for a (0,q)-form whose
/// coefficients are listed in increasing_multi_indices order.
double form_action(const CMatrix& H, int q, const CVector& f);

/// Max-abs deviation from Hermitian symmetry.
double hermitian_defect(const CMatrix& H);

}  // namespace levi
