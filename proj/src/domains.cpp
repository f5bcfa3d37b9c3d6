#include "levi/domains.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "levi/geometry.hpp"
#include "levi/random.hpp"

namespace levi {

namespace {

double param(const DomainParams& params, std::string_view key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

int dimension_param(const DomainParams& params, double fallback) {
  const double n = param(params, "n", fallback);
  if (n != std::floor(n) || n < 2 || n > 8) throw InvalidArgument("dimension n must be an integer in [2, 8]");
  return static_cast<int>(n);
}

DefiningExpr euclidean_norm2(int n) {
  std::string text;
  for (int j = 1; j <= n; ++j) text += (j > 1 ? "+abs2(z" : "abs2(z") + std::to_string(j) + ")";
  return DefiningExpr::parse(text, n);
}

Point seed_point(int n, double x1) {
  Point p = Point::Zero(n);
  p[0] = x1;
  return p;
}

RVector uniform_box(int n, double half_width) { return RVector::Constant(2 * n, half_width); }

DefiningExpr prop51_height() { return DefiningExpr::parse("2*re(z1)*abs2(z2)-re(z1)*im(z1)^4", 3); }

DefiningExpr prop52_height() {
  return DefiningExpr::parse(
      "-9*abs2(z1)^2+6*(re(z1)^2*abs2(z2)+im(z1)^2*abs2(z3))+abs2(z2)*abs2(z3)+0.25*(abs2(z2)^2+abs2(z3)^2)", 4);
}

DefiningExpr graph_rho(const DefiningExpr& height) {
  const int n = height.nvars();
  return -im(DefiningExpr::var(n, n)) + height;
}

DefiningExpr prop52_phi(double t) {
  if (!(t > 0.0)) throw InvalidArgument("metric parameter t must be positive");
  return t * abs2(DefiningExpr::var(4, 1)) +
         (abs2(DefiningExpr::var(4, 2)) + abs2(DefiningExpr::var(4, 3)) + abs2(DefiningExpr::var(4, 4)));
}

std::string format_param(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

DefiningExpr smooth_max_expr(const DefiningExpr& rho1, const DefiningExpr& rho2, double r) {
  return smooth_max(rho1, rho2, r);
}

void DomainSpec::validate() const {
  if (n < 2) throw InvalidArgument("domain dimension must be at least 2");
  if (rho.empty() || phi.empty()) throw InvalidArgument("domain needs rho and phi");
  if (rho.nvars() != n || phi.nvars() != n) throw InvalidArgument("rho/phi dimension does not match n");
  if (box.size() != 2 * n) throw InvalidArgument("box needs 2n half-widths");
  if ((box.array() <= 0.0).any()) throw InvalidArgument("box half-widths must be positive");
  if (components.empty()) throw InvalidArgument("domain declares no boundary component");
  for (const auto& c : components) {
    if (c.seed.size() != n) throw InvalidArgument("component '" + c.label + "' seed has wrong dimension");
    if (c.orientation_hint < -1 || c.orientation_hint > 1) throw InvalidArgument("orientation hint must be -1, 0 or 1");
    if (c.region && c.region->nvars() != n) throw InvalidArgument("component region has wrong dimension");
  }
  if (graph_height && graph_height->nvars() != n) throw InvalidArgument("graph height has wrong dimension");

  CounterRng rng(0x5eed, 0xfeed);
  for (int i = 0; i < 100; ++i) {
    Point p(n);
    for (int j = 0; j < n; ++j) p[j] = Complex(rng.uniform(-box[2 * j], box[2 * j]), rng.uniform(-box[2 * j + 1], box[2 * j + 1]));
    try {
      (void)metric_at(phi, p);
    } catch (const Error& e) {
      throw InvalidArgument(std::string("phi fails the plurisubharmonicity spot check: ") + e.what());
    }
    (void)rho.eval_real(p);
  }
}

std::size_t DomainSpec::component_index(std::string_view label) const {
  for (std::size_t i = 0; i < components.size(); ++i)
    if (components[i].label == label) return i;
  throw InvalidArgument("unknown boundary component '" + std::string(label) + "'");
}

std::vector<std::string> builtin_domain_names() {
  return {"ball", "annulus", "prop51", "prop51_bounded", "prop52", "prop52_bounded"};
}

DomainSpec builtin_domain(std::string_view name, const DomainParams& params) {
  DomainSpec dom;
  dom.name = std::string(name);
  if (name == "ball") {
    const int n = dimension_param(params, 3);
    const double R = param(params, "R", 1.0);
    if (!(R > 0.0)) throw InvalidArgument("ball radius must be positive");
    dom.n = n;
    dom.phi = euclidean_norm2(n);
    dom.rho = dom.phi - DefiningExpr::constant(n, R * R);
    dom.components.push_back({"boundary", seed_point(n, R), +1, 0.0, std::nullopt});
    dom.box = uniform_box(n, 1.5 * R);
    dom.tags["R"] = format_param(R);
  } else if (name == "annulus") {
    const int n = dimension_param(params, 3);
    const double ri = param(params, "R_in", 0.5);
    const double ro = param(params, "R_out", 1.0);
    if (!(ri > 0.0) || !(ri < ro)) throw InvalidArgument("annulus needs 0 < R_in < R_out");
    dom.n = n;
    dom.phi = euclidean_norm2(n);
    // Negative exactly on R_in < |z| < R_out.
    dom.rho = (dom.phi - DefiningExpr::constant(n, ro * ro)) * (dom.phi - DefiningExpr::constant(n, ri * ri));
    const double mid = 0.5 * (ri * ri + ro * ro);
    dom.components.push_back({"outer", seed_point(n, ro), +1, 0.0, DefiningExpr::constant(n, mid) - dom.phi});
    // A ball of radius 2 R_in around the seed covers the whole inner sphere.
    dom.components.push_back({"inner", seed_point(n, ri), -1, 2.0 * ri, dom.phi - DefiningExpr::constant(n, mid)});
    dom.box = uniform_box(n, 1.5 * ro);
    dom.tags["R_in"] = format_param(ri);
    dom.tags["R_out"] = format_param(ro);
  } else if (name == "prop51") {
    dom.n = 3;
    dom.graph_height = prop51_height();
    dom.rho = graph_rho(*dom.graph_height);
    dom.phi = euclidean_norm2(3);
    dom.components.push_back({"graph", Point::Zero(3), +1, 0.3, std::nullopt});
    dom.box = uniform_box(3, 1.0);
  } else if (name == "prop51_bounded") {
    const double r = param(params, "r", 0.05);
    const double R = param(params, "R", 0.5);
    if (!(r > 0.0) || !(R > 0.0) || !(R * R >= r)) throw InvalidArgument("prop51_bounded needs r > 0 and R^2 >= r");
    dom.n = 3;
    dom.phi = euclidean_norm2(3);
    const DefiningExpr rho1 = graph_rho(prop51_height());
    dom.rho = smooth_max_expr(rho1, dom.phi - DefiningExpr::constant(3, R * R), r);
    dom.components.push_back({"boundary", Point::Zero(3), +1, 0.0, std::nullopt});
    dom.box = uniform_box(3, 1.5 * R);
    dom.tags["r"] = format_param(r);
    dom.tags["R"] = format_param(R);
  } else if (name == "prop52") {
    const double t = param(params, "t", 1.0);
    dom.n = 4;
    dom.graph_height = prop52_height();
    dom.rho = graph_rho(*dom.graph_height);
    dom.phi = prop52_phi(t);
    dom.components.push_back({"graph", Point::Zero(4), +1, 0.1, std::nullopt});
    dom.box = uniform_box(4, 1.0);
    dom.tags["t"] = format_param(t);
  } else if (name == "prop52_bounded") {
    const double t = param(params, "t", 6.0);
    const double r = param(params, "r", 0.002);
    const double R = param(params, "R", 0.1);
    if (!(r > 0.0) || !(R > 0.0) || !(R * R >= r)) throw InvalidArgument("prop52_bounded needs r > 0 and R^2 >= r");
    dom.n = 4;
    dom.phi = prop52_phi(t);
    const DefiningExpr rho1 = graph_rho(prop52_height());
    dom.rho = smooth_max_expr(rho1, dom.phi - DefiningExpr::constant(4, R * R), r);
    dom.components.push_back({"boundary", Point::Zero(4), +1, 0.0, std::nullopt});
    dom.box = uniform_box(4, 1.5 * R);
    dom.tags["t"] = format_param(t);
    dom.tags["r"] = format_param(r);
    dom.tags["R"] = format_param(R);
  } else {
    throw InvalidArgument("unknown builtin domain '" + std::string(name) + "'");
  }
  return dom;
}

// ---------------------------------------------------------------------------
// Domain documents

namespace {

Point point_from_json(const nlohmann::json& j, int n, const char* what) {
  const auto xy = j.get<std::vector<double>>();
  if (static_cast<int>(xy.size()) != 2 * n) throw InvalidArgument(std::string(what) + " needs 2n reals");
  return point_from_reals(xy);
}

nlohmann::json point_to_json(const Point& p) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    a.push_back(p[j].real());
    a.push_back(p[j].imag());
  }
  return a;
}

}  // namespace

DomainSpec load_domain_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("domain document is not valid JSON: ") + e.what());
  }
  try {
    DomainSpec dom;
    dom.name = doc.value("name", std::string("custom"));
    dom.n = doc.at("n").get<int>();
    if (dom.n < 2) throw InvalidArgument("domain dimension must be at least 2");
    dom.rho = DefiningExpr::parse(doc.at("rho").get<std::string>(), dom.n);
    dom.phi = DefiningExpr::parse(doc.at("phi").get<std::string>(), dom.n);
    if (doc.contains("graph_height")) dom.graph_height = DefiningExpr::parse(doc.at("graph_height").get<std::string>(), dom.n);
    for (const auto& c : doc.at("components")) {
      BoundaryComponent comp;
      comp.label = c.at("label").get<std::string>();
      comp.seed = point_from_json(c.at("seed"), dom.n, "component seed");
      comp.orientation_hint = c.value("orientation_hint", 0);
      comp.spread = c.value("spread", 0.0);
      if (c.contains("region")) comp.region = DefiningExpr::parse(c.at("region").get<std::string>(), dom.n);
      dom.components.push_back(std::move(comp));
    }
    const auto box = doc.at("box").get<std::vector<double>>();
    dom.box = Eigen::Map<const RVector>(box.data(), static_cast<Eigen::Index>(box.size()));
    if (doc.contains("tags")) dom.tags = doc.at("tags").get<std::map<std::string, std::string>>();
    dom.validate();
    return dom;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed domain document: ") + e.what());
  }
}

DomainSpec load_domain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open domain file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_domain_json(ss.str());
}

std::string domain_to_json(const DomainSpec& dom) {
  nlohmann::ordered_json doc;
  doc["name"] = dom.name;
  doc["n"] = dom.n;
  doc["rho"] = dom.rho.to_string();
  doc["phi"] = dom.phi.to_string();
  if (dom.graph_height) doc["graph_height"] = dom.graph_height->to_string();
  doc["components"] = nlohmann::ordered_json::array();
  for (const auto& c : dom.components) {
    nlohmann::ordered_json jc;
    jc["label"] = c.label;
    jc["seed"] = point_to_json(c.seed);
    jc["orientation_hint"] = c.orientation_hint;
    jc["spread"] = c.spread;
    if (c.region) jc["region"] = c.region->to_string();
    doc["components"].push_back(jc);
  }
  doc["box"] = std::vector<double>(dom.box.data(), dom.box.data() + dom.box.size());
  doc["tags"] = dom.tags;
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Sampling

std::optional<Point> project_to_boundary(const DefiningExpr& rho, const Point& start) {
  Point x = start;
  double value = rho.eval_real(x);
  for (int iter = 0; iter < 50; ++iter) {
    if (std::abs(value) <= 1e-14 * std::max(1.0, x.norm())) break;
    const Jet2 jet = rho.jet(x);
    // Real gradient: d/dx_j = 2 Re(d/dz_j), d/dy_j = -2 Im(d/dz_j).
    const CVector grad = 2.0 * jet.dz.conjugate();
    const double g2 = grad.squaredNorm();
    if (!(g2 > 1e-300)) return std::nullopt;
    const CVector step = -(value / g2) * grad;
    double damping = 1.0;
    bool improved = false;
    for (int h = 0; h < 30; ++h) {
      const Point trial = x + damping * step;
      const double tv = rho.eval_real(trial);
      if (std::abs(tv) < std::abs(value)) {
        x = trial;
        value = tv;
        improved = true;
        break;
      }
      damping *= 0.5;
    }
    if (!improved) break;
  }
  if (!(std::abs(value) <= kBoundaryResidual)) return std::nullopt;
  return x;
}

namespace {

// Uniform draw from the ball of radius r in R^d.
std::vector<double> ball_draw(CounterRng& rng, std::size_t d, double r) {
  std::vector<double> v(d);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double scale = r * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) / std::sqrt(norm2);
  for (auto& x : v) x *= scale;
  return v;
}

}  // namespace

SampleSet sample_boundary(const DomainSpec& dom, std::size_t component, std::size_t count, std::uint64_t seed,
                          const SampleRegion& region) {
  if (component >= dom.components.size()) throw InvalidArgument("component index out of range");
  if (count < 1) throw InvalidArgument("sample count must be at least 1");
  const BoundaryComponent& comp = dom.components[component];
  const int n = dom.n;
  const Point center = region.center ? *region.center : comp.seed;
  if (center.size() != n) throw InvalidArgument("sampling center has wrong dimension");
  const double radius = region.radius > 0.0 ? region.radius : comp.spread;

  SampleSet out;
  const std::size_t max_attempts = 100 * count;
  const bool graph = dom.graph_height.has_value();
  // Graph domains draw (z', Re z_n) and solve Im z_n = P(z') exactly.
  const std::size_t dims = graph ? static_cast<std::size_t>(2 * n - 1) : static_cast<std::size_t>(2 * n);

  while (out.points.size() < count && out.attempts < max_attempts) {
    CounterRng rng(seed, (static_cast<std::uint64_t>(component) << 40) ^ out.attempts);
    ++out.attempts;

    std::vector<double> xy(dims);
    if (radius > 0.0) {
      const auto d = ball_draw(rng, dims, radius);
      for (std::size_t i = 0; i < dims; ++i) {
        const Complex c = center[static_cast<Eigen::Index>(i / 2)];
        xy[i] = (i % 2 == 0 ? c.real() : c.imag()) + d[i];
      }
    } else {
      for (std::size_t i = 0; i < dims; ++i) xy[i] = rng.uniform(-dom.box[static_cast<Eigen::Index>(i)], dom.box[static_cast<Eigen::Index>(i)]);
    }
    if (graph) xy.push_back(0.0);
    Point draw = point_from_reals(xy);

    std::optional<Point> p;
    try {
      if (graph) {
        draw[n - 1] = Complex(draw[n - 1].real(), dom.graph_height->eval_real(draw));
        if (std::abs(dom.rho.eval_real(draw)) <= kBoundaryResidual) p = draw;
      } else {
        p = project_to_boundary(dom.rho, draw);
      }
    } catch (const NonFiniteValue&) {
      p.reset();
    }
    if (!p) continue;
    if (graph && radius > 0.0 && (*p - center).norm() > radius) continue;
    if (comp.region && !(comp.region->eval_real(*p) < 0.0)) continue;
    const Jet2 jet = dom.rho.jet(*p);
    if (!(jet.dz.norm() > kDegenerateGradient)) {
      ++out.degenerate;
      continue;
    }
    out.points.push_back(*p);
  }
  if (out.points.size() < count) {
    throw SamplingFailure("component '" + comp.label + "': only " + std::to_string(out.points.size()) + " of " +
                              std::to_string(count) + " boundary samples after " + std::to_string(out.attempts) +
                              " attempts",
                          out.points.size());
  }
  return out;
}

}  // namespace levi
