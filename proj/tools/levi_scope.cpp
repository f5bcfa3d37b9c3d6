// levi-scope: command-line front end for the certification toolkit.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "levi/certify.hpp"
#include "levi/domains.hpp"
#include "levi/geometry.hpp"
#include "levi/mkh.hpp"
#include "levi/report.hpp"

namespace {

using namespace levi;

constexpr int kExitCertified = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitDegenerate = 3;

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Certified: return kExitCertified;
    case Verdict::InfeasibleAtPoints: return kExitInfeasible;
    case Verdict::Degenerate: return kExitDegenerate;
  }
  return kExitUsage;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::size_t as_count(double v, const char* flag) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) throw InvalidArgument(std::string(flag) + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

/// Options selecting and parameterising a domain, shared by several subcommands.
struct DomainArgs {
  std::string builtin;
  std::string file;
  double n = 3, R = 1, R_in = 0.5, R_out = 1, t = 1, r = 0.05;
  CLI::Option *n_opt = nullptr, *R_opt = nullptr, *R_in_opt = nullptr, *R_out_opt = nullptr, *t_opt = nullptr,
              *r_opt = nullptr;

  void attach(CLI::App* app) {
    auto* b = app->add_option("--builtin", builtin, "Builtin domain: ball, annulus, prop51, prop51_bounded, prop52, prop52_bounded");
    auto* f = app->add_option("--domain", file, "Domain definition document (JSON)");
    b->excludes(f);
    n_opt = app->add_option("--n", n, "Dimension for ball/annulus");
    R_opt = app->add_option("--R", R, "Radius (ball) or cut-off radius (bounded variants)");
    R_in_opt = app->add_option("--R-in", R_in, "Inner radius of the annulus");
    R_out_opt = app->add_option("--R-out", R_out, "Outer radius of the annulus");
    t_opt = app->add_option("--t", t, "Metric parameter t of phi_t");
    r_opt = app->add_option("--r", r, "Smoothing radius of the smooth maximum");
  }

  DomainParams params() const {
    DomainParams p;
    if (n_opt->count()) p["n"] = n;
    if (R_opt->count()) p["R"] = R;
    if (R_in_opt->count()) p["R_in"] = R_in;
    if (R_out_opt->count()) p["R_out"] = R_out;
    if (t_opt->count()) p["t"] = t;
    if (r_opt->count()) p["r"] = r;
    return p;
  }

  DomainSpec load() const {
    if (!file.empty()) return load_domain_file(file);
    if (builtin.empty()) throw InvalidArgument("one of --builtin or --domain is required");
    return builtin_domain(builtin, params());
  }

  Json echo() const {
    Json j;
    if (!file.empty()) {
      j["file"] = file;
    } else {
      j["builtin"] = builtin;
      Json p = Json::object();
      for (const auto& [k, v] : params()) p[k] = v;
      j["params"] = p;
    }
    return j;
  }
};

/// --near / --radius sampling region.
struct RegionArgs {
  std::string near;
  double radius = 0.0;

  void attach(CLI::App* app) {
    app->add_option("--near", near, "Draw center: one number for every real coordinate, or 2n comma-separated reals");
    app->add_option("--radius", radius, "Radius of the draw ball (0 keeps the component default)");
  }

  SampleRegion region(int n) const {
    SampleRegion r;
    r.radius = radius;
    if (!near.empty()) {
      std::vector<double> xy;
      for (const auto& s : split(near, ',')) xy.push_back(std::stod(s));
      if (xy.size() == 1) xy.assign(static_cast<std::size_t>(2 * n), xy[0]);
      if (static_cast<int>(xy.size()) != 2 * n) throw InvalidArgument("--near needs 1 or 2n values");
      r.center = point_from_reals(xy);
    }
    return r;
  }
};

void emit(const Json& doc, const std::string& path) {
  const std::string text = dump_json(doc);
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << text;
}

Json header(const std::string& command) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool"] = "levi-scope";
  j["command"] = command;
  return j;
}

void summary_line(const CertificationReport& r) {
  std::cerr << to_string(r.verdict);
  for (const auto& c : r.components) {
    std::cerr << "  " << c.label << ": " << (c.certified ? "sigma=" + std::to_string(*c.branch) : std::string("not certified"))
              << " (" << c.samples << " samples, min margin " << c.min_margin << ", min slack " << c.min_slack << ")";
  }
  std::cerr << "\n";
}

UpsilonField resolve_upsilon(const std::string& spec, const DomainSpec& dom, const DomainParams& params) {
  if (spec.rfind("builtin:", 0) == 0 || spec.find('(') != std::string::npos || spec == "prop51-upsilon" ||
      spec == "prop52-L1") {
    return builtin_upsilon(spec, params);
  }
  return load_upsilon_file(spec, dom.n);
}

std::vector<std::size_t> selected_components(const DomainSpec& dom, const std::string& label) {
  if (!label.empty()) return {dom.component_index(label)};
  std::vector<std::size_t> all(dom.components.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return all;
}

CertificationReport run_upsilon(const DomainSpec& dom, const UpsilonField& ups, int q, std::size_t samples,
                                std::uint64_t seed, const SampleRegion& region, const UpsilonOptions& options,
                                const std::string& label) {
  CertificationReport merged;
  bool first = true;
  for (std::size_t c : selected_components(dom, label)) {
    const SampleSet s = sample_boundary(dom, c, samples, seed, region);
    CertificationReport r = verify_upsilon_field(dom, ups, q, s.points, options, dom.components[c].label);
    r.components.front().attempts = s.attempts;
    r.components.front().degenerate += s.degenerate;
    if (first) {
      merged = std::move(r);
      first = false;
      continue;
    }
    merged.components.push_back(r.components.front());
    for (auto& w : r.witnesses) {
      if (merged.witnesses.size() < kMaxWitnesses) merged.witnesses.push_back(std::move(w));
      else ++merged.witnesses_truncated;
    }
    merged.witnesses_truncated += r.witnesses_truncated;
    if (static_cast<int>(r.verdict) > static_cast<int>(merged.verdict)) merged.verdict = r.verdict;
  }
  return merged;
}

// ---------------------------------------------------------------------------
// trace

struct CurveArgs {
  std::string curve;
  std::string builtin_curve;
  double s_min = 0.0, s_max = 1.0, steps = 11;
};

std::vector<std::pair<DefiningExpr, DefiningExpr>> parse_curve(const std::string& text, const DomainSpec& dom) {
  const VariableAliases aliases{{"s", 1}};
  std::vector<std::pair<DefiningExpr, DefiningExpr>> coords;
  for (const auto& c : split(text, ';')) {
    const auto parts = split(c, ',');
    if (parts.size() != 2) throw InvalidArgument("each curve coordinate needs 're,im' expressions");
    coords.emplace_back(DefiningExpr::parse(parts[0], 1, aliases), DefiningExpr::parse(parts[1], 1, aliases));
  }
  const int given = static_cast<int>(coords.size());
  if (given != dom.n && !(dom.graph_height && given == dom.n - 1))
    throw InvalidArgument("curve needs n coordinates (n-1 for graph domains)");
  return coords;
}

Point curve_point(const std::vector<std::pair<DefiningExpr, DefiningExpr>>& coords, const DomainSpec& dom, double s) {
  Point arg(1);
  arg[0] = s;
  Point p = Point::Zero(dom.n);
  for (std::size_t j = 0; j < coords.size(); ++j)
    p[static_cast<Eigen::Index>(j)] = Complex(coords[j].first.eval_real(arg), coords[j].second.eval_real(arg));
  if (static_cast<int>(coords.size()) == dom.n - 1) p[dom.n - 1] = Complex(0.0, dom.graph_height->eval_real(p));
  return p;
}

int run_trace(const DomainSpec& dom, const CurveArgs& args, int q, bool normalize, const std::string& csv_path) {
  std::function<Point(double)> curve;
  if (!args.builtin_curve.empty()) {
    if (args.builtin_curve != "great-circle") throw InvalidArgument("unknown builtin curve '" + args.builtin_curve + "'");
    // z1 = R cos(2 pi s), z2 = R sin(2 pi s) on the sphere through the first seed.
    const double R = dom.components.front().seed.norm();
    curve = [R, n = dom.n](double s) {
      Point p = Point::Zero(n);
      p[0] = R * std::cos(2.0 * std::numbers::pi * s);
      p[1] = R * std::sin(2.0 * std::numbers::pi * s);
      return p;
    };
  } else if (!args.curve.empty()) {
    curve = [coords = parse_curve(args.curve, dom), &dom](double s) { return curve_point(coords, dom, s); };
  } else {
    throw InvalidArgument("one of --curve or --builtin-curve is required");
  }
  const std::size_t steps = as_count(args.steps, "--steps");

  std::ostringstream out;
  out.precision(17);
  out << "s";
  for (int j = 1; j <= dom.n; ++j) out << ",x" << j << ",y" << j;
  out << ",rho";
  for (int j = 1; j < dom.n; ++j) out << ",mu" << j;
  out << ",det,zq_status,lp_branch,delta,slack,flag\n";

  LeviOptions lo;
  lo.normalize = normalize;
  lo.boundary_tolerance = -1.0;
  if (dom.graph_height) lo.pivot = dom.n - 1;
  for (std::size_t i = 0; i < steps; ++i) {
    const double s = steps == 1 ? args.s_min : args.s_min + (args.s_max - args.s_min) * static_cast<double>(i) / static_cast<double>(steps - 1);
    const Point p = curve(s);
    out << s;
    for (Eigen::Index j = 0; j < p.size(); ++j) out << "," << p[j].real() << "," << p[j].imag();
    const double rho = dom.rho.eval_real(p);
    out << "," << rho;
    try {
      const LeviData L = levi_form_at(dom.rho, dom.phi, p, lo);
      for (Eigen::Index j = 0; j < L.mu.size(); ++j) out << "," << L.mu[j];
      out << "," << (L.scale * L.c_raw).determinant().real();
      out << "," << to_string(z_q_status(L.mu, q));
      auto plus = weak_zq_lp(L.mu, q, +1);
      auto minus = weak_zq_lp(L.mu, q, -1);
      const Certificate* best = plus && (!minus || plus->margin >= minus->margin) ? &*plus : (minus ? &*minus : nullptr);
      if (best) out << "," << best->branch << "," << best->margin << "," << best->slack;
      else out << ",none,0,";
      out << "," << (std::abs(rho) > 1e-8 ? "off-boundary" : "ok") << "\n";
    } catch (const Error& e) {
      for (int j = 1; j < dom.n; ++j) out << ",";
      out << ",,,,,," << "error" << "\n";
    }
  }
  if (csv_path.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(csv_path);
    if (!f) throw InvalidArgument("cannot write '" + csv_path + "'");
    f << out.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"levi-scope: generalized Levi-form convexity certification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "levi-scope 0.1.0");

  // parse
  auto* parse_cmd = app.add_subcommand("parse", "Parse an expression and print its canonical form");
  std::string expr_text, at_text;
  double parse_n = 2;
  parse_cmd->add_option("--expr", expr_text, "Expression text")->required();
  parse_cmd->add_option("--n", parse_n, "Number of complex variables")->required();
  parse_cmd->add_option("--at", at_text, "Evaluate value and Wirtinger jet at 2n comma-separated reals");

  // certify
  auto* cert_cmd = app.add_subcommand("certify", "Certify weak Z(q) pointwise on sampled boundary points");
  DomainArgs cert_dom;
  RegionArgs cert_region;
  double q = 1, samples = 200, seed = 1, delta_min = 1e-6;
  bool no_normalize = false, weak_y = false, timing = false;
  std::string upsilon, report_path, component;
  cert_dom.attach(cert_cmd);
  cert_region.attach(cert_cmd);
  cert_cmd->add_option("--q", q, "Form degree q")->required();
  cert_cmd->add_option("--samples", samples, "Samples per component");
  cert_cmd->add_option("--seed", seed, "Sampling seed");
  cert_cmd->add_option("--delta-min", delta_min, "Required uniform margin |omega(Upsilon) - q|");
  cert_cmd->add_flag("--no-normalize", no_normalize, "Do not divide the Levi form by |d rho|_g");
  cert_cmd->add_flag("--weak-y", weak_y, "Also certify degree n-1-q (weak Y(q))");
  cert_cmd->add_option("--upsilon", upsilon, "Check an explicit field: builtin:NAME(t) or a JSON file");
  cert_cmd->add_option("--component", component, "Restrict to one component label");
  cert_cmd->add_option("--report", report_path, "Write the JSON report here instead of stdout");
  cert_cmd->add_flag("--timing", timing, "Include wall-clock timing in the report");

  // verify-upsilon
  auto* ups_cmd = app.add_subcommand("verify-upsilon", "Check an explicit Upsilon field at sampled boundary points");
  DomainArgs ups_dom;
  RegionArgs ups_region;
  bool ups_normalize = false;
  ups_dom.attach(ups_cmd);
  ups_region.attach(ups_cmd);
  ups_cmd->add_option("--upsilon", upsilon, "builtin:NAME(t) or a JSON file")->required();
  ups_cmd->add_option("--q", q, "Form degree q")->required();
  ups_cmd->add_option("--samples", samples, "Samples per component");
  ups_cmd->add_option("--seed", seed, "Sampling seed");
  ups_cmd->add_option("--delta-min", delta_min, "Required margin |omega(Upsilon) - q|");
  ups_cmd->add_flag("--normalize", ups_normalize, "Divide the Levi form by |d rho|_g");
  ups_cmd->add_option("--component", component, "Restrict to one component label");
  ups_cmd->add_option("--report", report_path, "Write the JSON report here instead of stdout");
  ups_cmd->add_flag("--timing", timing, "Include wall-clock timing in the report");

  // trace
  auto* trace_cmd = app.add_subcommand("trace", "Eigenvalues and certificates along a curve on the boundary");
  DomainArgs trace_dom;
  CurveArgs curve;
  bool trace_normalize = false;
  std::string csv_path;
  trace_dom.attach(trace_cmd);
  trace_cmd->add_option("--curve", curve.curve,
                        "Coordinates 're,im;re,im;...' as expressions in s (graph domains may omit z_n)");
  trace_cmd->add_option("--builtin-curve", curve.builtin_curve, "great-circle: z1 = R cos(2 pi s), z2 = R sin(2 pi s)");
  trace_cmd->add_option("--s-min", curve.s_min, "First parameter value");
  trace_cmd->add_option("--s-max", curve.s_max, "Last parameter value");
  trace_cmd->add_option("--steps", curve.steps, "Number of rows");
  trace_cmd->add_option("--q", q, "Form degree q for the verdict columns");
  trace_cmd->add_flag("--normalize", trace_normalize, "Divide the Levi form by |d rho|_g");
  trace_cmd->add_option("--csv", csv_path, "Write CSV here instead of stdout");

  // mkh-check
  auto* mkh_cmd = app.add_subcommand("mkh-check", "Quadrature check of the flat Morrey-Kohn-Hormander identity");
  double mkh_n = 2, mkh_q = 1, points = 6, refinements = 3, width = 0.7, box = 1.0;
  std::vector<double> ts;
  std::string rule = "midpoint";
  mkh_cmd->add_option("--n", mkh_n, "Complex dimension");
  mkh_cmd->add_option("--q", mkh_q, "Form degree");
  mkh_cmd->add_option("--t", ts, "Weight parameter (repeatable)");
  mkh_cmd->add_option("--points-per-axis", points, "Coarsest resolution");
  mkh_cmd->add_option("--refinements", refinements, "Number of resolution doublings");
  mkh_cmd->add_option("--width", width, "Window width w");
  mkh_cmd->add_option("--box", box, "Half-width of the integration cube");
  mkh_cmd->add_option("--rule", rule, "midpoint or gauss");
  mkh_cmd->add_option("--report", report_path, "Write the JSON report here");
  mkh_cmd->add_flag("--timing", timing, "Include wall-clock timing in the report");

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "Emit deterministic boundary samples as CSV");
  DomainArgs sample_dom;
  RegionArgs sample_region;
  double count = 100;
  sample_dom.attach(sample_cmd);
  sample_region.attach(sample_cmd);
  sample_cmd->add_option("--component", component, "Component label (default: first)");
  sample_cmd->add_option("--count", count, "Number of samples");
  sample_cmd->add_option("--seed", seed, "Sampling seed");
  sample_cmd->add_option("--csv", csv_path, "Write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count(); };

  try {
    if (*parse_cmd) {
      const int n = static_cast<int>(as_count(parse_n, "--n"));
      const DefiningExpr e = DefiningExpr::parse(expr_text, n);
      Json doc = header("parse");
      doc["canonical"] = e.to_string();
      if (!at_text.empty()) {
        std::vector<double> xy;
        for (const auto& s : split(at_text, ',')) xy.push_back(std::stod(s));
        if (static_cast<int>(xy.size()) != 2 * n) throw InvalidArgument("--at needs 2n values");
        const Point p = point_from_reals(xy);
        const Jet2 jet = e.jet(p);
        doc["value"] = jet.value;
        Json dz = Json::array(), hess = Json::array();
        for (int j = 0; j < n; ++j) dz.push_back(Json::array({jet.dz[j].real(), jet.dz[j].imag()}));
        for (int j = 0; j < n; ++j) {
          Json row = Json::array();
          for (int k = 0; k < n; ++k) row.push_back(Json::array({jet.dzdzbar(j, k).real(), jet.dzdzbar(j, k).imag()}));
          hess.push_back(row);
        }
        doc["dz"] = dz;
        doc["dzdzbar"] = hess;
      }
      emit(doc, "");
      return 0;
    }

    if (*cert_cmd || *ups_cmd) {
      const bool upsilon_mode = *ups_cmd || !upsilon.empty();
      const DomainArgs& dargs = *cert_cmd ? cert_dom : ups_dom;
      const RegionArgs& rargs = *cert_cmd ? cert_region : ups_region;
      const DomainSpec dom = dargs.load();
      const int qi = static_cast<int>(q);
      if (qi != q || qi < 0 || qi > dom.n - 1) throw InvalidArgument("--q must be an integer in [0, n-1]");
      const std::size_t ns = as_count(samples, "--samples");
      const auto sd = static_cast<std::uint64_t>(seed);
      const SampleRegion region = rargs.region(dom.n);

      Json doc = header(*cert_cmd ? "certify" : "verify-upsilon");
      Json cfg = dargs.echo();
      cfg["q"] = qi;
      cfg["samples"] = ns;
      cfg["seed"] = sd;
      cfg["delta_min"] = delta_min;
      if (region.center) cfg["near"] = point_json(*region.center);
      cfg["radius"] = region.radius;
      if (!component.empty()) cfg["component"] = component;

      int code = 0;
      if (upsilon_mode) {
        const UpsilonField ups = resolve_upsilon(upsilon, dom, dargs.params());
        UpsilonOptions uo;
        uo.delta_min = delta_min;
        uo.normalize = *cert_cmd ? !no_normalize : ups_normalize;
        cfg["upsilon"] = ups.name;
        cfg["frame"] = ups.frame_tag;
        cfg["normalize"] = uo.normalize;
        doc["config"] = cfg;
        const CertificationReport r = run_upsilon(dom, ups, qi, ns, sd, region, uo, component);
        doc["report"] = report_json(r);
        summary_line(r);
        code = exit_code(r.verdict);
      } else {
        CertifyOptions co;
        co.samples = ns;
        co.seed = sd;
        co.region = region;
        co.delta_min = delta_min;
        co.normalize = !no_normalize;
        cfg["normalize"] = co.normalize;
        cfg["weak_y"] = weak_y;
        doc["config"] = cfg;
        DomainSpec target = dom;
        if (!component.empty()) target.components = {dom.components.at(dom.component_index(component))};
        const CertificationReport r = certify_domain(target, qi, co);
        doc["report"] = report_json(r);
        summary_line(r);
        code = exit_code(r.verdict);
        if (weak_y) {
          const CertificationReport d = certify_domain(target, dom.n - 1 - qi, co);
          doc["dual_report"] = report_json(d);
          summary_line(d);
          doc["weak_y_certified"] = r.verdict == Verdict::Certified && d.verdict == Verdict::Certified;
          if (code == 0) code = exit_code(d.verdict);
        }
      }
      if (timing) doc["timing"] = Json{{"seconds", elapsed()}};
      emit(doc, report_path);
      return code;
    }

    if (*trace_cmd) {
      const DomainSpec dom = trace_dom.load();
      const int qi = static_cast<int>(q);
      if (qi != q || qi < 0 || qi > dom.n - 1) throw InvalidArgument("--q must be an integer in [0, n-1]");
      return run_trace(dom, curve, qi, trace_normalize, csv_path);
    }

    if (*mkh_cmd) {
      const int n = static_cast<int>(as_count(mkh_n, "--n"));
      const int fq = static_cast<int>(mkh_q);
      if (fq != mkh_q || fq < 1 || fq > n) throw InvalidArgument("--q must be an integer in [1, n]");
      const int base = static_cast<int>(as_count(points, "--points-per-axis"));
      if (refinements < 0 || refinements != std::floor(refinements)) throw InvalidArgument("--refinements must be a non-negative integer");
      if (rule != "midpoint" && rule != "gauss") throw InvalidArgument("--rule must be midpoint or gauss");
      if (ts.empty()) ts = {0.0, 1.0, 5.0};

      FormField f(n, fq);
      MultiIndex J;
      for (int j = 0; j < fq; ++j) J.push_back(j);
      f.component(J) = ScalarField::bump(n, Window{Point::Zero(n), width});

      Json doc = header("mkh-check");
      doc["config"] = Json{{"n", n}, {"q", fq}, {"width", width}, {"box", box}, {"rule", rule}};
      Json rows = Json::array();
      bool ok = true;
      std::cout << "t\tpoints\tlhs\trhs\tresidual\tcontraction\n";
      for (double t : ts) {
        QuadratureGrid grid = QuadratureGrid::cube(n, box, base, rule == "gauss" ? QuadratureRule::GaussLegendre
                                                                                   : QuadratureRule::Midpoint);
        double prev = -1.0, last = 0.0;
        bool contracts = true;
        for (int level = 0; level <= static_cast<int>(refinements); ++level, grid = grid.refined()) {
          const MkhTerms terms = mkh_terms(f, WeightConfig{t}, grid);
          const double ratio = prev > 0.0 && terms.residual > 0.0 ? prev / terms.residual : 0.0;
          if (prev >= 0.0 && !(ratio >= 4.0 || terms.residual <= 1e-9)) contracts = false;
          std::cout << t << "\t" << grid.points_per_axis << "\t" << terms.lhs << "\t" << terms.rhs << "\t"
                    << terms.residual << "\t" << (prev >= 0.0 ? std::to_string(ratio) : "-") << "\n";
          Json row = mkh_terms_json(terms);
          row["t"] = t;
          row["points_per_axis"] = grid.points_per_axis;
          rows.push_back(row);
          prev = terms.residual;
          last = terms.residual;
        }
        ok = ok && contracts && last <= 1e-6;
      }
      doc["rows"] = rows;
      doc["passed"] = ok;
      if (timing) doc["timing"] = Json{{"seconds", elapsed()}};
      if (!report_path.empty()) emit(doc, report_path);
      return ok ? 0 : kExitInfeasible;
    }

    if (*sample_cmd) {
      const DomainSpec dom = sample_dom.load();
      const std::size_t c = component.empty() ? 0 : dom.component_index(component);
      const SampleSet s = sample_boundary(dom, c, as_count(count, "--count"), static_cast<std::uint64_t>(seed),
                                          sample_region.region(dom.n));
      std::ostringstream out;
      out.precision(17);
      out << "index";
      for (int j = 1; j <= dom.n; ++j) out << ",x" << j << ",y" << j;
      out << ",rho,grad_norm\n";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        const Point& p = s.points[i];
        out << i;
        for (Eigen::Index j = 0; j < p.size(); ++j) out << "," << p[j].real() << "," << p[j].imag();
        out << "," << dom.rho.eval_real(p) << "," << dom.rho.jet(p).dz.norm() << "\n";
      }
      if (csv_path.empty()) {
        std::cout << out.str();
      } else {
        std::ofstream f(csv_path);
        if (!f) throw InvalidArgument("cannot write '" + csv_path + "'");
        f << out.str();
      }
      std::cerr << s.points.size() << " samples in " << s.attempts << " attempts (" << s.degenerate << " degenerate)\n";
      return 0;
    }
  } catch (const SamplingFailure& e) {
    std::cerr << "sampling failure: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
