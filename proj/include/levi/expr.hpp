#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "levi/types.hpp"

namespace levi {

/// Value, first Wirtinger derivatives and both second-order Wirtinger blocks of
/// a real-valued function of z in C^n at one point.
struct Jet2 {
  double value = 0.0;
  CVector dz;        ///< d/dz_j
  CVector dzbar;     ///< d/dzbar_j
  CMatrix dzdzbar;   ///< d^2/dz_j dzbar_k
  CMatrix dzdz;      ///< d^2/dz_j dz_k
};

/// Second-order forward-mode scalar. The 2n formal variables are ordered
/// (z_1..z_n, zbar_1..zbar_n) and differentiated independently.
class ComplexJet {
 public:
  ComplexJet() = default;
  explicit ComplexJet(int nvars);

  static ComplexJet constant(int nvars, Complex c);
  /// The coordinate z_j (0-based j) at value zj.
  static ComplexJet variable(int nvars, int j, Complex zj);

  int nvars() const { return nvars_; }

  Complex value{};
  CVector grad;  ///< length 2n
  CMatrix hess;  ///< 2n x 2n, symmetric

  ComplexJet& operator+=(const ComplexJet& o);
  ComplexJet& operator-=(const ComplexJet& o);
  ComplexJet& operator*=(Complex s);

  friend ComplexJet operator+(ComplexJet a, const ComplexJet& b) { return a += b; }
  friend ComplexJet operator-(ComplexJet a, const ComplexJet& b) { return a -= b; }
  friend ComplexJet operator*(const ComplexJet& a, const ComplexJet& b);
  friend ComplexJet operator*(ComplexJet a, Complex s) { return a *= s; }
  friend ComplexJet operator*(Complex s, ComplexJet a) { return a *= s; }
  friend ComplexJet operator-(ComplexJet a) { return a *= -1.0; }

  /// Chain rule through a scalar function with derivatives f1, f2 at value.
  ComplexJet apply(Complex f0, Complex f1, Complex f2) const;

 private:
  int nvars_ = 0;
};

/// Conjugate function: swaps the z and zbar slots and conjugates.
ComplexJet conj(const ComplexJet& a);
ComplexJet real_part(const ComplexJet& a);
ComplexJet imag_part(const ComplexJet& a);
ComplexJet pow(const ComplexJet& a, unsigned k);

/// Identifier aliases accepted by the parser in addition to z1..zn, mapped to
/// 1-based variable indices.
using VariableAliases = std::map<std::string, int, std::less<>>;

/// Immutable expression tree over z_1..z_n. Copies share nodes.
class DefiningExpr {
 public:
  struct Node;

  DefiningExpr() = default;

  static DefiningExpr parse(std::string_view text, int nvars, const VariableAliases& aliases = {});
  static DefiningExpr constant(int nvars, double c);
  /// z_j, 1-based like the text grammar.
  static DefiningExpr var(int nvars, int j);

  int nvars() const { return nvars_; }
  bool empty() const { return root_ == nullptr; }

  /// Canonical fully parenthesised text that parses back to an equal tree.
  std::string to_string() const;

  Complex eval(const Point& p) const;
  double eval_real(const Point& p) const;
  ComplexJet complex_jet(const Point& p) const;
  Jet2 jet(const Point& p) const;

  friend DefiningExpr operator+(const DefiningExpr& a, const DefiningExpr& b);
  friend DefiningExpr operator-(const DefiningExpr& a, const DefiningExpr& b);
  friend DefiningExpr operator*(const DefiningExpr& a, const DefiningExpr& b);
  friend DefiningExpr operator*(double s, const DefiningExpr& a);
  friend DefiningExpr operator-(const DefiningExpr& a);
  friend DefiningExpr re(const DefiningExpr& a);
  friend DefiningExpr im(const DefiningExpr& a);
  friend DefiningExpr abs2(const DefiningExpr& a);
  friend DefiningExpr conj(const DefiningExpr& a);
  friend DefiningExpr pow(const DefiningExpr& a, unsigned k);
  /// Smooth maximum 1/2 psi_r(a - b) + 1/2 (a + b); exactly max(a, b) when |a - b| >= r.
  friend DefiningExpr smooth_max(const DefiningExpr& a, const DefiningExpr& b, double r);

  const Node& root() const { return *root_; }

 private:
  DefiningExpr(std::shared_ptr<const Node> root, int nvars) : root_(std::move(root)), nvars_(nvars) {}
  static DefiningExpr make(std::shared_ptr<const Node> node, int nvars);

  std::shared_ptr<const Node> root_;
  int nvars_ = 0;
};

DefiningExpr parse_expr(std::string_view text, int nvars);
double eval_real(const DefiningExpr& e, const Point& p);
Jet2 wirtinger_jet2(const DefiningExpr& e, const Point& p);

/// Imaginary residue allowed before a value counts as non-real.
inline constexpr double kRealTolerance = 1e-12;

}  // namespace levi
