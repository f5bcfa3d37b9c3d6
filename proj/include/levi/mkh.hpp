#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levi/multi_index.hpp"
#include "levi/types.hpp"

namespace levi {

/// Radial window b(s) = exp(-1/(1-s)) for s < 1, else 0, with
/// s = |z - center|^2 / width^2.
struct Window {
  Point center;
  double width = 1.0;
};

/// c z^a zbar^b u^m, times b(s) when `windowed`, with u = 1/(1-s).
struct Monomial {
  Complex coeff;
  std::vector<int> zpow;
  std::vector<int> zbarpow;
  int upow = 0;
  bool windowed = false;
};

/// Per-point powers shared by every field evaluated at that point.
struct PointPowers {
  Point z;
  bool inside = true;  ///< s < 1 (always true without a window)
  double s = 0.0;
  double bump = 1.0;
  std::vector<std::vector<Complex>> zp, zbp;  ///< [k][e] = z_k^e, zbar_k^e
  std::vector<double> up;                     ///< u^m
  PointPowers(const Point& p, const std::optional<Window>& window, int max_degree, int max_upow);
};

/// Finite sums of monomials, closed under d/dz_k and d/dzbar_k.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(int n, std::optional<Window> window = std::nullopt) : n_(n), window_(std::move(window)) {}

  static ScalarField constant(int n, Complex c);
  static ScalarField monomial(int n, Complex c, std::vector<int> zpow, std::vector<int> zbarpow);
  static ScalarField bump(int n, const Window& window);

  int n() const { return n_; }
  const std::optional<Window>& window() const { return window_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// True when every term carries the window, so the support is compact.
  bool compactly_supported() const;
  int max_degree() const;
  int max_upow() const;

  Complex eval(const Point& p) const;
  Complex eval(const PointPowers& pp) const;

  ScalarField dz(int k) const;     ///< 0-based
  ScalarField dzbar(int k) const;  ///< 0-based

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator*=(Complex c);
  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a += -1.0 * b; }
  friend ScalarField operator*(Complex c, ScalarField a) { return a *= c; }
  /// Product; at most one factor may carry the window.
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);

  /// Renames variable k to perm[k] (exponents and window center move with it).
  ScalarField relabel(const std::vector<int>& perm) const;

 private:
  void add_term(Monomial m);
  ScalarField derivative(int k, bool bar) const;

  int n_ = 0;
  std::optional<Window> window_;
  std::vector<Monomial> terms_;
};

/// A (0,q)-form on C^n: one scalar field per increasing multi-index, listed in
/// increasing_multi_indices(n, q) order.
class FormField {
 public:
  FormField() = default;
  FormField(int n, int q);

  int n() const { return n_; }
  int q() const { return q_; }
  const std::vector<ScalarField>& components() const { return comps_; }
  ScalarField& component(const MultiIndex& J);
  const ScalarField& component(const MultiIndex& J) const;
  ScalarField& operator[](std::size_t i) { return comps_[i]; }
  const ScalarField& operator[](std::size_t i) const { return comps_[i]; }

  CVector eval(const Point& p) const;
  CVector eval(const PointPowers& pp) const;

  /// Window shared by the nonzero components, if any.
  std::optional<Window> window() const;
  bool compactly_supported() const;
  int max_degree() const;
  int max_upow() const;

  /// Variables renamed by perm (see ScalarField::relabel), components
  /// re-indexed with the sign of the sorting permutation.
  FormField relabel(const std::vector<int>& perm) const;

 private:
  int n_ = 0;
  int q_ = 0;
  std::vector<ScalarField> comps_;
};

/// Flat weight e^{-t |z|^2}.
struct WeightConfig {
  double t = 0.0;
};

FormField dbar(const FormField& f);
/// Adjoint of dbar for the inner product with density e^{-t|z|^2}:
/// (dbar*_t f)_J = -sum_k (d f_{kJ}/dz_k - t zbar_k f_{kJ}).
FormField dbar_star_t(const FormField& f, const WeightConfig& w);

enum class QuadratureRule { Midpoint, GaussLegendre };

/// Tensor grid over a product of 2n real intervals.
struct QuadratureGrid {
  RVector lo, hi;  ///< per real axis (x1, y1, x2, y2, ...)
  int points_per_axis = 16;
  QuadratureRule rule = QuadratureRule::Midpoint;

  static QuadratureGrid cube(int n, double half_width, int points_per_axis,
                             QuadratureRule rule = QuadratureRule::Midpoint);
  /// Same box, twice the points per axis (half the midpoint step).
  QuadratureGrid refined() const;
};

/// Nodes and weights of one axis on [lo, hi].
void axis_rule(const QuadratureGrid& grid, int axis, std::vector<double>& nodes, std::vector<double>& weights);

/// Throws SupportOverflow unless every component is windowed and the window
/// ball lies strictly inside the grid box.
void check_support(const FormField& f, const QuadratureGrid& grid);

/// (f, h)_t = integral of e^{-t|z|^2} sum_J f_J conj(h_J).
Complex weighted_inner(const FormField& f, const FormField& h, const WeightConfig& w, const QuadratureGrid& grid);

/// i ddbar phi (f, f)(p) for phi = |z|^2, i.e. q |f(p)|^2.
double hessian_action_phi(const FormField& f, const Point& p);

struct MkhTerms {
  double dbar_norm2 = 0.0;       ///< ||dbar f||_t^2
  double dbar_star_norm2 = 0.0;  ///< ||dbar*_t f||_t^2
  double gradient_norm2 = 0.0;   ///< sum_{J,k} ||d f_J / dzbar_k||_t^2
  double hessian_term = 0.0;     ///< t * integral of i ddbar phi(f,f) e^{-t phi}
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;         ///< |lhs - rhs| / max(lhs, rhs, 1e-300)
};

MkhTerms mkh_terms(const FormField& f, const WeightConfig& w, const QuadratureGrid& grid);
double mkh_residual(const FormField& f, const WeightConfig& w, const QuadratureGrid& grid);

/// b(z; center, width) dzbar_1 on C^n.
FormField bump_form(int n, const Window& window);

}  // namespace levi
