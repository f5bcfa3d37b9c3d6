#include "levi/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <vector>

#include "levi/smooth_abs.hpp"

namespace levi {

Point point_from_reals(const std::vector<double>& xy) {
  if (xy.size() % 2 != 0) {
    throw InvalidArgument("point needs an even number of real coordinates");
  }
  Point p(static_cast<Eigen::Index>(xy.size() / 2));
  for (std::size_t j = 0; j < xy.size() / 2; ++j) {
    p[static_cast<Eigen::Index>(j)] = Complex(xy[2 * j], xy[2 * j + 1]);
  }
  return p;
}

// ---------------------------------------------------------------------------
// ComplexJet

ComplexJet::ComplexJet(int nvars)
    : grad(CVector::Zero(2 * nvars)), hess(CMatrix::Zero(2 * nvars, 2 * nvars)), nvars_(nvars) {}

ComplexJet ComplexJet::constant(int nvars, Complex c) {
  ComplexJet j(nvars);
  j.value = c;
  return j;
}

ComplexJet ComplexJet::variable(int nvars, int j, Complex zj) {
  ComplexJet out(nvars);
  out.value = zj;
  out.grad[j] = 1.0;
  return out;
}

ComplexJet& ComplexJet::operator+=(const ComplexJet& o) {
  value += o.value;
  grad += o.grad;
  hess += o.hess;
  return *this;
}

ComplexJet& ComplexJet::operator-=(const ComplexJet& o) {
  value -= o.value;
  grad -= o.grad;
  hess -= o.hess;
  return *this;
}

ComplexJet& ComplexJet::operator*=(Complex s) {
  value *= s;
  grad *= s;
  hess *= s;
  return *this;
}

ComplexJet operator*(const ComplexJet& a, const ComplexJet& b) {
  ComplexJet out(a.nvars_);
  out.value = a.value * b.value;
  out.grad = a.value * b.grad + b.value * a.grad;
  const CMatrix cross = a.grad * b.grad.transpose();
  out.hess = a.value * b.hess + b.value * a.hess + cross + cross.transpose();
  return out;
}

ComplexJet ComplexJet::apply(Complex f0, Complex f1, Complex f2) const {
  ComplexJet out(nvars_);
  out.value = f0;
  out.grad = f1 * grad;
  out.hess = f2 * (grad * grad.transpose()) + f1 * hess;
  return out;
}

ComplexJet conj(const ComplexJet& a) {
  const int n = a.nvars();
  ComplexJet out(n);
  out.value = std::conj(a.value);
  for (int j = 0; j < 2 * n; ++j) {
    const int sj = j < n ? j + n : j - n;
    out.grad[j] = std::conj(a.grad[sj]);
    for (int k = 0; k < 2 * n; ++k) {
      const int sk = k < n ? k + n : k - n;
      out.hess(j, k) = std::conj(a.hess(sj, sk));
    }
  }
  return out;
}

ComplexJet real_part(const ComplexJet& a) { return (a + conj(a)) * Complex(0.5, 0.0); }

ComplexJet imag_part(const ComplexJet& a) { return (a - conj(a)) * Complex(0.0, -0.5); }

ComplexJet pow(const ComplexJet& a, unsigned k) {
  if (k == 0) return ComplexJet::constant(a.nvars(), 1.0);
  if (k == 1) return a;
  const double kd = static_cast<double>(k);
  const Complex v = a.value;
  const Complex f0 = std::pow(v, static_cast<int>(k));
  const Complex f1 = kd * std::pow(v, static_cast<int>(k - 1));
  const Complex f2 = kd * (kd - 1.0) * std::pow(v, static_cast<int>(k - 2));
  return a.apply(f0, f1, f2);
}

// ---------------------------------------------------------------------------
// Expression tree

struct DefiningExpr::Node {
  enum class Kind { Const, Var, Add, Sub, Mul, Neg, Pow, Re, Im, Abs2, Conj, SmoothMax };
  Kind kind = Kind::Const;
  double number = 0.0;  // Const value, or SmoothMax radius
  int index = 0;        // Var (0-based)
  unsigned exponent = 0;
  std::vector<std::shared_ptr<const Node>> args;
};

using Node = DefiningExpr::Node;
using NodePtr = std::shared_ptr<const Node>;

namespace {

NodePtr make_node(Node::Kind kind, std::vector<NodePtr> args) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->args = std::move(args);
  return n;
}

NodePtr make_const(double c) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Const;
  n->number = c;
  return n;
}

NodePtr make_var(int j) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Var;
  n->index = j;
  return n;
}

NodePtr make_pow(NodePtr base, unsigned k) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Pow;
  n->exponent = k;
  n->args = {std::move(base)};
  return n;
}

NodePtr make_smooth_max(NodePtr a, NodePtr b, double r) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::SmoothMax;
  n->number = r;
  n->args = {std::move(a), std::move(b)};
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, int nvars, const VariableAliases& aliases)
      : text_(text), nvars_(nvars), aliases_(aliases) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  // Offsets are reported 1-based, so an error at the end of "re(z1" is at 6.
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError("syntax error: " + msg, pos_ + 1); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const { throw ParseError(msg, at + 1); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Node::Kind::Add, {lhs, term()});
      } else if (accept('-')) {
        lhs = make_node(Node::Kind::Sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (accept('*')) lhs = make_node(Node::Kind::Mul, {lhs, factor()});
    return lhs;
  }

  NodePtr factor() {
    NodePtr b = base();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected unsigned integer exponent");
      unsigned k = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, k);
      if (ec != std::errc{}) fail_at("exponent out of range", start);
      b = make_pow(b, k);
    }
    return b;
  }

  double number() {
    skip_ws();
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t s = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ - s;
    };
    std::size_t nd = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      nd += digits();
    }
    if (nd == 0) {
      pos_ = start;
      fail("expected number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    const std::string lexeme(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(lexeme.c_str(), &end);
    if (end != lexeme.c_str() + lexeme.size() || !std::isfinite(v)) fail_at("invalid number", start);
    return v;
  }

  NodePtr base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return make_node(Node::Kind::Neg, {base()});
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return make_const(number());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);

    if (auto it = aliases_.find(name); it != aliases_.end()) {
      if (it->second < 1 || it->second > nvars_) fail_at("alias '" + std::string(name) + "' out of range", start);
      return make_var(it->second - 1);
    }
    if (name.size() >= 2 && name[0] == 'z' &&
        name.substr(1).find_first_not_of("0123456789") == std::string_view::npos) {
      int j = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), j);
      if (ec != std::errc{} || j < 1 || j > nvars_) {
        fail_at("variable index out of range: '" + std::string(name) + "' with n=" + std::to_string(nvars_), start);
      }
      return make_var(j - 1);
    }

    Node::Kind kind;
    if (name == "re") {
      kind = Node::Kind::Re;
    } else if (name == "im") {
      kind = Node::Kind::Im;
    } else if (name == "abs2") {
      kind = Node::Kind::Abs2;
    } else if (name == "conj") {
      kind = Node::Kind::Conj;
    } else if (name == "smoothmax") {
      expect('(');
      NodePtr a = expr();
      expect(',');
      NodePtr b = expr();
      expect(',');
      skip_ws();
      const std::size_t rpos = pos_;
      const double r = number();
      if (!(r > 0.0)) fail_at("smoothmax radius must be positive", rpos);
      expect(')');
      return make_smooth_max(a, b, r);
    } else {
      fail_at("unknown identifier '" + std::string(name) + "'", start);
    }
    expect('(');
    NodePtr arg = expr();
    expect(')');
    return make_node(kind, {arg});
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int nvars_;
  const VariableAliases& aliases_;
};

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print(const Node& n, std::string& out) {
  using K = Node::Kind;
  auto unary = [&](const char* name) {
    out += name;
    out += '(';
    print(*n.args[0], out);
    out += ')';
  };
  auto binary = [&](char op) {
    out += '(';
    print(*n.args[0], out);
    out += op;
    print(*n.args[1], out);
    out += ')';
  };
  switch (n.kind) {
    case K::Const:
      if (std::signbit(n.number)) {
        out += "(-" + format_number(-n.number) + ")";
      } else {
        out += format_number(n.number);
      }
      break;
    case K::Var:
      out += 'z' + std::to_string(n.index + 1);
      break;
    case K::Add: binary('+'); break;
    case K::Sub: binary('-'); break;
    case K::Mul: binary('*'); break;
    case K::Neg:
      out += "(-";
      print(*n.args[0], out);
      out += ')';
      break;
    case K::Pow:
      out += '(';
      print(*n.args[0], out);
      out += '^' + std::to_string(n.exponent) + ')';
      break;
    case K::Re: unary("re"); break;
    case K::Im: unary("im"); break;
    case K::Abs2: unary("abs2"); break;
    case K::Conj: unary("conj"); break;
    case K::SmoothMax:
      out += "smoothmax(";
      print(*n.args[0], out);
      out += ',';
      print(*n.args[1], out);
      out += ',' + format_number(n.number) + ')';
      break;
  }
}

Complex eval_node(const Node& n, const Point& p) {
  using K = Node::Kind;
  switch (n.kind) {
    case K::Const: return n.number;
    case K::Var: return p[n.index];
    case K::Add: return eval_node(*n.args[0], p) + eval_node(*n.args[1], p);
    case K::Sub: return eval_node(*n.args[0], p) - eval_node(*n.args[1], p);
    case K::Mul: return eval_node(*n.args[0], p) * eval_node(*n.args[1], p);
    case K::Neg: return -eval_node(*n.args[0], p);
    case K::Pow: return n.exponent == 0 ? Complex(1.0) : std::pow(eval_node(*n.args[0], p), static_cast<int>(n.exponent));
    case K::Re: return eval_node(*n.args[0], p).real();
    case K::Im: return eval_node(*n.args[0], p).imag();
    case K::Abs2: return std::norm(eval_node(*n.args[0], p));
    case K::Conj: return std::conj(eval_node(*n.args[0], p));
    case K::SmoothMax: {
      const Complex a = eval_node(*n.args[0], p);
      const Complex b = eval_node(*n.args[1], p);
      const double d = (a - b).real();
      if (d >= n.number) return a;
      if (d <= -n.number) return b;
      return 0.5 * psi_r_eval(d, n.number).value + 0.5 * (a + b);
    }
  }
  return {};
}

ComplexJet jet_node(const Node& n, const Point& p, int nv) {
  using K = Node::Kind;
  switch (n.kind) {
    case K::Const: return ComplexJet::constant(nv, n.number);
    case K::Var: return ComplexJet::variable(nv, n.index, p[n.index]);
    case K::Add: return jet_node(*n.args[0], p, nv) + jet_node(*n.args[1], p, nv);
    case K::Sub: return jet_node(*n.args[0], p, nv) - jet_node(*n.args[1], p, nv);
    case K::Mul: return jet_node(*n.args[0], p, nv) * jet_node(*n.args[1], p, nv);
    case K::Neg: return -jet_node(*n.args[0], p, nv);
    case K::Pow: return pow(jet_node(*n.args[0], p, nv), n.exponent);
    case K::Re: return real_part(jet_node(*n.args[0], p, nv));
    case K::Im: return imag_part(jet_node(*n.args[0], p, nv));
    case K::Abs2: {
      const ComplexJet a = jet_node(*n.args[0], p, nv);
      return a * conj(a);
    }
    case K::Conj: return conj(jet_node(*n.args[0], p, nv));
    case K::SmoothMax: {
      ComplexJet a = jet_node(*n.args[0], p, nv);
      ComplexJet b = jet_node(*n.args[1], p, nv);
      const double d = (a.value - b.value).real();
      if (d >= n.number) return a;
      if (d <= -n.number) return b;
      const PsiValue psi = psi_r_eval(d, n.number);
      ComplexJet out = (a - b).apply(psi.value, psi.d1, psi.d2);
      out += a;
      out += b;
      return out * Complex(0.5);
    }
  }
  return ComplexJet(nv);
}

}  // namespace

DefiningExpr DefiningExpr::make(std::shared_ptr<const Node> node, int nvars) { return DefiningExpr(std::move(node), nvars); }

DefiningExpr DefiningExpr::parse(std::string_view text, int nvars, const VariableAliases& aliases) {
  if (nvars < 1) throw InvalidArgument("expression needs at least one variable");
  Parser parser(text, nvars, aliases);
  return make(parser.parse(), nvars);
}

DefiningExpr DefiningExpr::constant(int nvars, double c) { return make(make_const(c), nvars); }

DefiningExpr DefiningExpr::var(int nvars, int j) {
  if (j < 1 || j > nvars) throw InvalidArgument("variable index out of range");
  return make(make_var(j - 1), nvars);
}

std::string DefiningExpr::to_string() const {
  std::string out;
  if (root_) print(*root_, out);
  return out;
}

Complex DefiningExpr::eval(const Point& p) const {
  if (p.size() != nvars_) throw InvalidArgument("point dimension does not match expression");
  return eval_node(*root_, p);
}

double DefiningExpr::eval_real(const Point& p) const {
  const Complex v = eval(p);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NonFiniteValue("expression value is not finite");
  if (std::abs(v.imag()) > kRealTolerance * std::max(1.0, std::abs(v.real()))) {
    throw NonRealValue("expression is not real-valued: imaginary part " + format_number(v.imag()));
  }
  return v.real();
}

ComplexJet DefiningExpr::complex_jet(const Point& p) const {
  if (p.size() != nvars_) throw InvalidArgument("point dimension does not match expression");
  return jet_node(*root_, p, nvars_);
}

Jet2 DefiningExpr::jet(const Point& p) const {
  const ComplexJet cj = complex_jet(p);
  if (!std::isfinite(cj.value.real()) || !cj.grad.allFinite() || !cj.hess.allFinite()) {
    throw NonFiniteValue("non-finite derivative");
  }
  if (std::abs(cj.value.imag()) > kRealTolerance * std::max(1.0, std::abs(cj.value.real()))) {
    throw NonRealValue("expression is not real-valued: imaginary part " + format_number(cj.value.imag()));
  }
  const int n = nvars_;
  Jet2 out;
  out.value = cj.value.real();
  out.dz = cj.grad.head(n);
  out.dzbar = cj.grad.tail(n);
  out.dzdzbar = cj.hess.block(0, n, n, n);
  out.dzdz = cj.hess.block(0, 0, n, n);
  return out;
}

namespace {
int common_nvars(const DefiningExpr& a, const DefiningExpr& b) {
  if (a.nvars() != b.nvars()) throw InvalidArgument("expressions have different dimensions");
  return a.nvars();
}
}  // namespace

DefiningExpr operator+(const DefiningExpr& a, const DefiningExpr& b) {
  return DefiningExpr::make(make_node(Node::Kind::Add, {a.root_, b.root_}), common_nvars(a, b));
}
DefiningExpr operator-(const DefiningExpr& a, const DefiningExpr& b) {
  return DefiningExpr::make(make_node(Node::Kind::Sub, {a.root_, b.root_}), common_nvars(a, b));
}
DefiningExpr operator*(const DefiningExpr& a, const DefiningExpr& b) {
  return DefiningExpr::make(make_node(Node::Kind::Mul, {a.root_, b.root_}), common_nvars(a, b));
}
DefiningExpr operator*(double s, const DefiningExpr& a) { return DefiningExpr::constant(a.nvars_, s) * a; }
DefiningExpr operator-(const DefiningExpr& a) { return DefiningExpr::make(make_node(Node::Kind::Neg, {a.root_}), a.nvars_); }
DefiningExpr re(const DefiningExpr& a) { return DefiningExpr::make(make_node(Node::Kind::Re, {a.root_}), a.nvars_); }
DefiningExpr im(const DefiningExpr& a) { return DefiningExpr::make(make_node(Node::Kind::Im, {a.root_}), a.nvars_); }
DefiningExpr abs2(const DefiningExpr& a) { return DefiningExpr::make(make_node(Node::Kind::Abs2, {a.root_}), a.nvars_); }
DefiningExpr conj(const DefiningExpr& a) { return DefiningExpr::make(make_node(Node::Kind::Conj, {a.root_}), a.nvars_); }
DefiningExpr pow(const DefiningExpr& a, unsigned k) { return DefiningExpr::make(make_pow(a.root_, k), a.nvars_); }
DefiningExpr smooth_max(const DefiningExpr& a, const DefiningExpr& b, double r) {
  if (!(r > 0.0)) throw InvalidArgument("smoothing radius must be positive");
  return DefiningExpr::make(make_smooth_max(a.root_, b.root_, r), common_nvars(a, b));
}

DefiningExpr parse_expr(std::string_view text, int nvars) { return DefiningExpr::parse(text, nvars); }
double eval_real(const DefiningExpr& e, const Point& p) { return e.eval_real(p); }
Jet2 wirtinger_jet2(const DefiningExpr& e, const Point& p) { return e.jet(p); }

}  // namespace levi
