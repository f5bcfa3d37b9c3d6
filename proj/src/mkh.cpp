#include "levi/mkh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "levi/geometry.hpp"
#include "levi/parallel.hpp"

namespace levi {

PointPowers::PointPowers(const Point& p, const std::optional<Window>& window, int max_degree, int max_upow) : z(p) {
  const Eigen::Index n = p.size();
  if (window) {
    s = (p - window->center).squaredNorm() / (window->width * window->width);
    inside = s < 1.0;
    if (!inside) return;
    const double u = 1.0 / (1.0 - s);
    bump = std::exp(-u);
    up.assign(static_cast<std::size_t>(max_upow) + 1, 1.0);
    for (int m = 1; m <= max_upow; ++m) up[static_cast<std::size_t>(m)] = up[static_cast<std::size_t>(m) - 1] * u;
  } else {
    up.assign(1, 1.0);
  }
  zp.assign(static_cast<std::size_t>(n), std::vector<Complex>(static_cast<std::size_t>(max_degree) + 1, 1.0));
  zbp = zp;
  for (Eigen::Index k = 0; k < n; ++k) {
    auto& a = zp[static_cast<std::size_t>(k)];
    auto& b = zbp[static_cast<std::size_t>(k)];
    for (int e = 1; e <= max_degree; ++e) {
      a[static_cast<std::size_t>(e)] = a[static_cast<std::size_t>(e) - 1] * p[k];
      b[static_cast<std::size_t>(e)] = b[static_cast<std::size_t>(e) - 1] * std::conj(p[k]);
    }
  }
}

// ---------------------------------------------------------------------------
// ScalarField

ScalarField ScalarField::constant(int n, Complex c) {
  return monomial(n, c, std::vector<int>(static_cast<std::size_t>(n), 0), std::vector<int>(static_cast<std::size_t>(n), 0));
}

ScalarField ScalarField::monomial(int n, Complex c, std::vector<int> zpow, std::vector<int> zbarpow) {
  if (static_cast<int>(zpow.size()) != n || static_cast<int>(zbarpow.size()) != n)
    throw InvalidArgument("monomial exponents need one entry per variable");
  for (int e : zpow)
    if (e < 0) throw InvalidArgument("negative exponent");
  for (int e : zbarpow)
    if (e < 0) throw InvalidArgument("negative exponent");
  ScalarField f(n);
  f.add_term({c, std::move(zpow), std::move(zbarpow), 0, false});
  return f;
}

ScalarField ScalarField::bump(int n, const Window& window) {
  if (window.center.size() != n) throw InvalidArgument("window center has the wrong dimension");
  if (!(window.width > 0.0)) throw InvalidArgument("window width must be positive");
  ScalarField f(n, window);
  f.add_term({1.0, std::vector<int>(static_cast<std::size_t>(n), 0), std::vector<int>(static_cast<std::size_t>(n), 0), 0,
              true});
  return f;
}

bool ScalarField::compactly_supported() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Monomial& m) { return m.windowed; });
}

int ScalarField::max_degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    for (int e : t.zpow) d = std::max(d, e);
    for (int e : t.zbarpow) d = std::max(d, e);
  }
  return d;
}

int ScalarField::max_upow() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.upow);
  return d;
}

Complex ScalarField::eval(const Point& p) const {
  return eval(PointPowers(p, window_, max_degree(), max_upow()));
}

Complex ScalarField::eval(const PointPowers& pp) const {
  Complex total = 0.0;
  for (const auto& t : terms_) {
    if (t.windowed && !pp.inside) continue;
    Complex v = t.coeff;
    for (int k = 0; k < n_; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      if (t.zpow[kk]) v *= pp.zp[kk][static_cast<std::size_t>(t.zpow[kk])];
      if (t.zbarpow[kk]) v *= pp.zbp[kk][static_cast<std::size_t>(t.zbarpow[kk])];
    }
    if (t.windowed) v *= pp.up[static_cast<std::size_t>(t.upow)] * pp.bump;
    total += v;
  }
  return total;
}

void ScalarField::add_term(Monomial m) {
  if (m.coeff == Complex(0.0)) return;
  for (auto it = terms_.begin(); it != terms_.end(); ++it) {
    if (it->windowed == m.windowed && it->upow == m.upow && it->zpow == m.zpow && it->zbarpow == m.zbarpow) {
      it->coeff += m.coeff;
      if (it->coeff == Complex(0.0)) terms_.erase(it);
      return;
    }
  }
  terms_.push_back(std::move(m));
}

ScalarField ScalarField::derivative(int k, bool bar) const {
  if (k < 0 || k >= n_) throw InvalidArgument("derivative index out of range");
  const auto kk = static_cast<std::size_t>(k);
  ScalarField out(n_, window_);
  for (const auto& t : terms_) {
    const int e = bar ? t.zbarpow[kk] : t.zpow[kk];
    if (e > 0) {
      Monomial d = t;
      d.coeff *= static_cast<double>(e);
      (bar ? d.zbarpow : d.zpow)[kk] -= 1;
      out.add_term(std::move(d));
    }
    if (!t.windowed) continue;
    // d(u^m b) = (m u^{m+1} - u^{m+2}) b ds, with ds/dz_k = (zbar_k - conj c_k)/w^2
    // and ds/dzbar_k = (z_k - c_k)/w^2.
    const double w2 = window_->width * window_->width;
    const Complex ck = bar ? window_->center[k] : std::conj(window_->center[k]);
    auto push = [&](Complex factor, int du, bool with_var) {
      Monomial d = t;
      d.coeff *= factor / w2;
      d.upow += du;
      if (with_var) (bar ? d.zpow : d.zbarpow)[kk] += 1;
      out.add_term(std::move(d));
    };
    if (t.upow > 0) {
      push(static_cast<double>(t.upow), 1, true);
      push(-static_cast<double>(t.upow) * ck, 1, false);
    }
    push(-1.0, 2, true);
    push(ck, 2, false);
  }
  return out;
}

ScalarField ScalarField::dz(int k) const { return derivative(k, false); }
ScalarField ScalarField::dzbar(int k) const { return derivative(k, true); }

namespace {

std::optional<Window> merge_window(const ScalarField& a, const ScalarField& b) {
  if (!a.window()) return b.window();
  if (!b.window()) return a.window();
  if (a.window()->width != b.window()->width || a.window()->center != b.window()->center)
    throw InvalidArgument("cannot combine fields with different windows");
  return a.window();
}

}  // namespace

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  if (n_ == 0) n_ = o.n_;
  if (o.n_ != 0 && o.n_ != n_) throw InvalidArgument("fields on different dimensions");
  window_ = merge_window(*this, o);
  for (const auto& t : o.terms_) add_term(t);
  return *this;
}

ScalarField& ScalarField::operator*=(Complex c) {
  if (c == Complex(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.coeff *= c;
  return *this;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  if (a.n_ != b.n_) throw InvalidArgument("fields on different dimensions");
  const bool aw = std::any_of(a.terms_.begin(), a.terms_.end(), [](const Monomial& m) { return m.windowed; });
  const bool bw = std::any_of(b.terms_.begin(), b.terms_.end(), [](const Monomial& m) { return m.windowed; });
  if (aw && bw) throw InvalidArgument("product of two windowed fields is not representable");
  ScalarField out(a.n_, merge_window(a, b));
  for (const auto& x : a.terms_) {
    for (const auto& y : b.terms_) {
      Monomial m = x;
      m.coeff *= y.coeff;
      for (std::size_t k = 0; k < m.zpow.size(); ++k) {
        m.zpow[k] += y.zpow[k];
        m.zbarpow[k] += y.zbarpow[k];
      }
      m.upow += y.upow;
      m.windowed = x.windowed || y.windowed;
      out.add_term(std::move(m));
    }
  }
  return out;
}

ScalarField ScalarField::relabel(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != n_) throw InvalidArgument("permutation has the wrong length");
  std::optional<Window> w;
  if (window_) {
    w = Window{Point(n_), window_->width};
    for (int k = 0; k < n_; ++k) w->center[perm[static_cast<std::size_t>(k)]] = window_->center[k];
  }
  ScalarField out(n_, w);
  for (const auto& t : terms_) {
    Monomial m = t;
    for (int k = 0; k < n_; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      m.zpow[static_cast<std::size_t>(perm[kk])] = t.zpow[kk];
      m.zbarpow[static_cast<std::size_t>(perm[kk])] = t.zbarpow[kk];
    }
    out.add_term(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// FormField

FormField::FormField(int n, int q) : n_(n), q_(q) {
  if (n < 1) throw InvalidArgument("form dimension must be positive");
  if (q < 0 || q > n) throw InvalidArgument("form degree out of range");
  comps_.assign(static_cast<std::size_t>(binomial(n, q)), ScalarField(n));
}

ScalarField& FormField::component(const MultiIndex& J) {
  if (static_cast<int>(J.size()) != q_) throw InvalidArgument("multi-index length differs from the form degree");
  return comps_[static_cast<std::size_t>(multi_index_rank(J, n_))];
}

const ScalarField& FormField::component(const MultiIndex& J) const {
  if (static_cast<int>(J.size()) != q_) throw InvalidArgument("multi-index length differs from the form degree");
  return comps_[static_cast<std::size_t>(multi_index_rank(J, n_))];
}

CVector FormField::eval(const Point& p) const {
  return eval(PointPowers(p, window(), max_degree(), max_upow()));
}

CVector FormField::eval(const PointPowers& pp) const {
  CVector v(static_cast<Eigen::Index>(comps_.size()));
  for (std::size_t i = 0; i < comps_.size(); ++i) v[static_cast<Eigen::Index>(i)] = comps_[i].eval(pp);
  return v;
}

std::optional<Window> FormField::window() const {
  std::optional<Window> w;
  for (const auto& c : comps_) {
    if (!c.window() || c.is_zero()) continue;
    if (!w) {
      w = c.window();
    } else if (w->width != c.window()->width || w->center != c.window()->center) {
      throw InvalidArgument("form components use different windows");
    }
  }
  return w;
}

bool FormField::compactly_supported() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const ScalarField& c) { return c.compactly_supported(); });
}

int FormField::max_degree() const {
  int d = 0;
  for (const auto& c : comps_) d = std::max(d, c.max_degree());
  return d;
}

int FormField::max_upow() const {
  int d = 0;
  for (const auto& c : comps_) d = std::max(d, c.max_upow());
  return d;
}

FormField FormField::relabel(const std::vector<int>& perm) const {
  FormField out(n_, q_);
  const auto indices = increasing_multi_indices(n_, q_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    MultiIndex K;
    for (int j : indices[i]) K.push_back(perm.at(static_cast<std::size_t>(j)));
    // Sign of the permutation sorting K.
    int sign = 1;
    for (std::size_t a = 0; a < K.size(); ++a)
      for (std::size_t b = a + 1; b < K.size(); ++b)
        if (K[a] > K[b]) sign = -sign;
    std::sort(K.begin(), K.end());
    out.component(K) += static_cast<double>(sign) * comps_[i].relabel(perm);
  }
  return out;
}

FormField dbar(const FormField& f) {
  const int n = f.n();
  if (f.q() >= n) return FormField(n, n);
  FormField out(n, f.q() + 1);
  const auto indices = increasing_multi_indices(n, f.q());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (f[i].is_zero()) continue;
    for (int k = 0; k < n; ++k) {
      const Insertion ins = insert_index(k, indices[i]);
      if (ins.sign == 0) continue;
      out.component(ins.index) += static_cast<double>(ins.sign) * f[i].dzbar(k);
    }
  }
  return out;
}

FormField dbar_star_t(const FormField& f, const WeightConfig& w) {
  const int n = f.n();
  if (f.q() < 1) throw InvalidArgument("the adjoint needs a form of degree at least 1");
  FormField out(n, f.q() - 1);
  const auto indices = increasing_multi_indices(n, f.q() - 1);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    for (int k = 0; k < n; ++k) {
      const Insertion ins = insert_index(k, indices[i]);
      if (ins.sign == 0) continue;
      const ScalarField& fk = f.component(ins.index);
      if (fk.is_zero()) continue;
      std::vector<int> e(static_cast<std::size_t>(n), 0);
      e[static_cast<std::size_t>(k)] = 1;
      const ScalarField zbar_k = ScalarField::monomial(n, 1.0, std::vector<int>(static_cast<std::size_t>(n), 0), e);
      ScalarField term = fk.dz(k) - w.t * (zbar_k * fk);
      out[i] += static_cast<double>(-ins.sign) * term;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature

QuadratureGrid QuadratureGrid::cube(int n, double half_width, int points_per_axis, QuadratureRule rule) {
  if (!(half_width > 0.0)) throw InvalidArgument("box half-width must be positive");
  if (points_per_axis < 1) throw InvalidArgument("need at least one point per axis");
  QuadratureGrid g;
  g.lo = RVector::Constant(2 * n, -half_width);
  g.hi = RVector::Constant(2 * n, half_width);
  g.points_per_axis = points_per_axis;
  g.rule = rule;
  return g;
}

QuadratureGrid QuadratureGrid::refined() const {
  QuadratureGrid g = *this;
  g.points_per_axis *= 2;
  return g;
}

namespace {

void gauss_legendre(int N, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(N), 0.0);
  w.assign(static_cast<std::size_t>(N), 0.0);
  for (int i = 0; i < (N + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= N; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = N * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= N; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = N * (z * p1 - p0) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(N - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(N - 1 - i)] = wi;
  }
}

/// Sums `accumulate(pp_list, weight, sums)` over the grid. The first real axis
/// indexes tiles; tiles are reduced in order so the result does not depend on
/// the worker count.
template <class Accumulate>
std::vector<double> integrate(const QuadratureGrid& grid, const std::vector<std::optional<Window>>& windows,
                              int max_degree, int max_upow, bool compact, std::size_t nsums, Accumulate&& accumulate) {
  const int dims = static_cast<int>(grid.lo.size());
  const int N = grid.points_per_axis;
  std::vector<std::vector<double>> nodes(static_cast<std::size_t>(dims)), weights(static_cast<std::size_t>(dims));
  for (int a = 0; a < dims; ++a) axis_rule(grid, a, nodes[static_cast<std::size_t>(a)], weights[static_cast<std::size_t>(a)]);

  std::vector<std::vector<double>> tiles(static_cast<std::size_t>(N), std::vector<double>(nsums, 0.0));
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t tile) {
    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    idx[0] = static_cast<int>(tile);
    std::vector<double> xy(static_cast<std::size_t>(dims));
    std::vector<double>& sums = tiles[tile];
    std::vector<double> local(nsums);
    const int n = dims / 2;
    for (;;) {
      double weight = 1.0;
      for (int a = 0; a < dims; ++a) {
        xy[static_cast<std::size_t>(a)] = nodes[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
        weight *= weights[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
      }
      Point p(n);
      for (int k = 0; k < n; ++k) p[k] = Complex(xy[static_cast<std::size_t>(2 * k)], xy[static_cast<std::size_t>(2 * k + 1)]);
      bool any_inside = !compact;
      std::vector<PointPowers> pps;
      pps.reserve(windows.size());
      for (const auto& w : windows) {
        pps.emplace_back(p, w, max_degree, max_upow);
        any_inside = any_inside || pps.back().inside;
      }
      if (any_inside) {
        std::fill(local.begin(), local.end(), 0.0);
        accumulate(pps, local);
        for (std::size_t s = 0; s < nsums; ++s) sums[s] += weight * local[s];
      }
      int a = dims - 1;
      while (a >= 1 && ++idx[static_cast<std::size_t>(a)] == N) idx[static_cast<std::size_t>(a--)] = 0;
      if (a < 1) break;
    }
  });
  std::vector<double> total(nsums, 0.0);
  for (const auto& t : tiles)
    for (std::size_t s = 0; s < nsums; ++s) total[s] += t[s];
  return total;
}

double weight_factor(const WeightConfig& w, const Point& z) { return w.t == 0.0 ? 1.0 : std::exp(-w.t * z.squaredNorm()); }

}  // namespace

void axis_rule(const QuadratureGrid& grid, int axis, std::vector<double>& nodes, std::vector<double>& weights) {
  const int N = grid.points_per_axis;
  const double lo = grid.lo[axis], hi = grid.hi[axis];
  const double h = (hi - lo) / N;
  nodes.resize(static_cast<std::size_t>(N));
  weights.resize(static_cast<std::size_t>(N));
  if (grid.rule == QuadratureRule::Midpoint) {
    for (int i = 0; i < N; ++i) {
      nodes[static_cast<std::size_t>(i)] = lo + (i + 0.5) * h;
      weights[static_cast<std::size_t>(i)] = h;
    }
  } else {
    std::vector<double> x, w;
    gauss_legendre(N, x, w);
    for (int i = 0; i < N; ++i) {
      nodes[static_cast<std::size_t>(i)] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x[static_cast<std::size_t>(i)];
      weights[static_cast<std::size_t>(i)] = 0.5 * (hi - lo) * w[static_cast<std::size_t>(i)];
    }
  }
}

void check_support(const FormField& f, const QuadratureGrid& grid) {
  if (grid.lo.size() != 2 * f.n() || grid.hi.size() != 2 * f.n()) throw InvalidArgument("grid dimension mismatch");
  if (!f.compactly_supported()) throw SupportOverflow("form has a component without the compact window");
  const auto w = f.window();
  if (!w) return;  // identically zero
  for (int k = 0; k < f.n(); ++k) {
    const double cx = w->center[k].real(), cy = w->center[k].imag();
    if (!(grid.lo[2 * k] < cx - w->width && cx + w->width < grid.hi[2 * k] && grid.lo[2 * k + 1] < cy - w->width &&
          cy + w->width < grid.hi[2 * k + 1])) {
      throw SupportOverflow("window support reaches the integration box boundary");
    }
  }
}

Complex weighted_inner(const FormField& f, const FormField& h, const WeightConfig& w, const QuadratureGrid& grid) {
  if (f.n() != h.n() || f.q() != h.q()) throw InvalidArgument("inner product of forms of different type");
  check_support(f, grid);
  check_support(h, grid);
  const int deg = std::max(f.max_degree(), h.max_degree());
  const int up = std::max(f.max_upow(), h.max_upow());
  const auto sums = integrate(grid, {f.window(), h.window()}, deg, up, true, 2,
                              [&](const std::vector<PointPowers>& pp, std::vector<double>& out) {
                                if (!pp[0].inside || !pp[1].inside) return;
                                const Complex v = f.eval(pp[0]).dot(h.eval(pp[1]));  // sum conj(h) f, conjugated
                                const double wt = weight_factor(w, pp[0].z);
                                out[0] += wt * v.real();
                                out[1] -= wt * v.imag();
                              });
  return {sums[0], sums[1]};
}

double hessian_action_phi(const FormField& f, const Point& p) {
  return form_action(CMatrix::Identity(f.n(), f.n()), f.q(), f.eval(p));
}

MkhTerms mkh_terms(const FormField& f, const WeightConfig& w, const QuadratureGrid& grid) {
  check_support(f, grid);
  const int n = f.n();
  const FormField D = dbar(f);
  const FormField S = f.q() >= 1 ? dbar_star_t(f, w) : FormField(n, 0);
  std::vector<ScalarField> grads;
  for (const auto& c : f.components())
    for (int k = 0; k < n; ++k) grads.push_back(c.dzbar(k));

  int deg = std::max({f.max_degree(), D.max_degree(), S.max_degree()});
  int up = std::max({f.max_upow(), D.max_upow(), S.max_upow()});
  for (const auto& g : grads) {
    deg = std::max(deg, g.max_degree());
    up = std::max(up, g.max_upow());
  }
  const CMatrix I = CMatrix::Identity(n, n);
  const auto sums = integrate(grid, {f.window()}, deg, up, true, 4,
                              [&](const std::vector<PointPowers>& pp, std::vector<double>& out) {
                                const PointPowers& P = pp[0];
                                if (!P.inside) return;
                                const double wt = weight_factor(w, P.z);
                                out[0] += wt * D.eval(P).squaredNorm();
                                if (f.q() >= 1) out[1] += wt * S.eval(P).squaredNorm();
                                double g2 = 0.0;
                                for (const auto& g : grads) g2 += std::norm(g.eval(P));
                                out[2] += wt * g2;
                                out[3] += wt * form_action(I, f.q(), f.eval(P));
                              });
  MkhTerms t;
  t.dbar_norm2 = sums[0];
  t.dbar_star_norm2 = sums[1];
  t.gradient_norm2 = sums[2];
  t.hessian_term = w.t * sums[3];
  t.lhs = t.dbar_norm2 + t.dbar_star_norm2;
  t.rhs = t.gradient_norm2 + t.hessian_term;
  t.residual = std::abs(t.lhs - t.rhs) / std::max({t.lhs, t.rhs, 1e-300});
  if (t.lhs == 0.0 && t.rhs == 0.0) t.residual = 0.0;
  return t;
}

double mkh_residual(const FormField& f, const WeightConfig& w, const QuadratureGrid& grid) {
  return mkh_terms(f, w, grid).residual;
}

FormField bump_form(int n, const Window& window) {
  FormField f(n, 1);
  f[0] = ScalarField::bump(n, window);
  return f;
}

}  // namespace levi
