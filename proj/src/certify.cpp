#include "levi/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "levi/parallel.hpp"

namespace levi {

const char* to_string(ZqStatus s) {
  switch (s) {
    case ZqStatus::Positive: return "Zq_positive";
    case ZqStatus::Negative: return "Zq_negative";
    case ZqStatus::NotZq: return "NotZq";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "CERTIFIED";
    case Verdict::InfeasibleAtPoints: return "INFEASIBLE-AT-POINTS";
    case Verdict::Degenerate: return "DEGENERATE";
  }
  return "?";
}

ZqStatus z_q_status(const RVector& mu, int q) {
  const int n = static_cast<int>(mu.size()) + 1;
  const auto positive = (mu.array() > kCountTolerance).count();
  const auto negative = (mu.array() < -kCountTolerance).count();
  if (positive >= n - q) return ZqStatus::Positive;
  if (negative >= q + 1) return ZqStatus::Negative;
  return ZqStatus::NotZq;
}

double certificate_slack(const RVector& mu, int q, const RVector& lambda) {
  if (lambda.size() != mu.size()) throw InvalidArgument("weights and spectrum differ in length");
  return mu.head(q).sum() - lambda.dot(mu);
}

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void check_spectrum(const RVector& mu, int q) {
  if (q < 0 || q > mu.size()) throw InvalidArgument("degree q out of range for this spectrum");
  for (Eigen::Index j = 1; j < mu.size(); ++j)
    if (mu[j] < mu[j - 1]) throw InvalidArgument("spectrum must be sorted ascending");
}

}  // namespace

// F(T) = sum of the T smallest eigenvalues (the last one fractional) is the
// least value of sum lambda_j mu_j over weights with trace T, convex in T and
// equal to the right-hand side at T = q. The feasible traces therefore form an
// interval around q; walking away from q segment by segment finds its end.
std::optional<Certificate> weak_zq_lp(const RVector& mu, int q, int branch) {
  check_spectrum(mu, q);
  if (branch != 1 && branch != -1) throw InvalidArgument("branch must be +1 or -1");
  const int m = static_cast<int>(mu.size());

  int whole = q;        // weights 1 on indices [0, whole)
  double frac = 0.0;    // weight of index `whole` when partial
  double cofrac = 1.0;  // 1 - frac, tracked exactly
  bool partial = false;

  if (branch == 1) {
    double room = 0.0;  // S_q - S_k
    for (int k = q; k >= 1; --k) {
      const double mk = mu[k - 1];
      if (mk < 0.0) {
        const double x = room / (-mk);
        if (x < 1.0) {
          if (x > 0.0) {
            whole = k - 1;
            frac = 1.0 - x;
            cofrac = x;
            partial = true;
          }
          break;
        }
      }
      room += mk;
      whole = k - 1;
    }
  } else {
    double room = 0.0;  // S_q - S_k
    for (int k = q; k < m; ++k) {
      const double mk = mu[k];
      if (mk > 0.0) {
        const double x = room / mk;
        if (x < 1.0) {
          if (x > 0.0) {
            whole = k;
            frac = x;
            cofrac = 1.0 - x;
            partial = true;
          }
          break;
        }
      }
      room -= mk;
      whole = k + 1;
    }
  }

  Certificate cert;
  cert.q = q;
  cert.branch = branch;
  cert.lambda = RVector::Zero(m);
  cert.complement = RVector::Ones(m);
  for (int j = 0; j < whole; ++j) {
    cert.lambda[j] = 1.0;
    cert.complement[j] = 0.0;
  }
  if (partial) {
    cert.lambda[whole] = frac;
    cert.complement[whole] = cofrac;
  }
  cert.trace = cert.lambda.sum();
  cert.cotrace = cert.complement.sum();
  cert.margin = branch == 1 ? static_cast<double>(q) - cert.trace : cert.trace - static_cast<double>(q);
  if (!(cert.margin > kMarginFloor)) return std::nullopt;
  cert.slack = certificate_slack(mu, q, cert.lambda);
  return cert;
}

std::optional<int> binary_weak_zq(const RVector& mu, int q, int branch) {
  check_spectrum(mu, q);
  if (branch != 1 && branch != -1) throw InvalidArgument("branch must be +1 or -1");
  const int m = static_cast<int>(mu.size());
  const double target = mu.head(q).sum();
  const int lo = branch == 1 ? 0 : q + 1;
  const int hi = branch == 1 ? q - 1 : m;
  for (int k = lo; k <= hi; ++k)
    if (mu.head(k).sum() <= target) return k;
  return std::nullopt;
}

DualCertificate duality_transform(const Certificate& cert, const RVector& mu) {
  const Eigen::Index m = mu.size();
  if (cert.lambda.size() != m || cert.complement.size() != m) throw InvalidArgument("certificate does not match spectrum");
  check_spectrum(mu, cert.q);
  DualCertificate out;
  out.mu = -mu.reverse();
  out.cert.q = static_cast<int>(m) - cert.q;
  out.cert.branch = -cert.branch;
  out.cert.lambda = cert.complement.reverse();
  out.cert.complement = cert.lambda.reverse();
  out.cert.trace = cert.cotrace;
  out.cert.cotrace = cert.trace;
  out.cert.slack = cert.slack;
  out.cert.margin = cert.margin;
  return out;
}

// ---------------------------------------------------------------------------
// Upsilon fields

UpsilonField prop51_upsilon(double t) {
  UpsilonField f;
  f.name = "prop51-upsilon(" + format_number(t) + ")";
  f.frame_tag = "graph";
  f.evaluate = [t](const UpsilonContext& ctx) {
    if (ctx.dom.n != 3) throw FrameMismatch("prop51-upsilon needs a domain in C^3");
    const double y = ctx.p[0].imag();
    // The identity tensor has coefficients (g_restricted^{-1})^T in the frame L.
    CMatrix B = ctx.levi.g_restricted.inverse().transpose();
    B(0, 0) -= 2.0 * t;
    B(1, 1) -= 3.0 * t * y * y;
    return B;
  };
  return f;
}

UpsilonField prop52_l1_upsilon(double t) {
  UpsilonField f;
  f.name = "prop52-L1(" + format_number(t) + ")";
  f.frame_tag = "graph";
  f.evaluate = [](const UpsilonContext& ctx) {
    const Eigen::Index m = ctx.levi.g_restricted.rows();
    CMatrix B = CMatrix::Zero(m, m);
    B(0, 0) = 1.0 / ctx.levi.g_restricted(0, 0).real();
    return B;
  };
  return f;
}

UpsilonField builtin_upsilon(std::string_view spec, const DomainParams& defaults) {
  std::string s(spec);
  if (s.rfind("builtin:", 0) == 0) s = s.substr(8);
  std::string name = s;
  std::optional<double> t;
  if (const auto open = s.find('('); open != std::string::npos) {
    if (s.back() != ')') throw InvalidArgument("malformed Upsilon spec '" + std::string(spec) + "'");
    name = s.substr(0, open);
    try {
      t = std::stod(s.substr(open + 1, s.size() - open - 2));
    } catch (const std::exception&) {
      throw InvalidArgument("malformed Upsilon parameter in '" + std::string(spec) + "'");
    }
  }
  auto fallback = [&](double v) {
    auto it = defaults.find("t");
    return t ? *t : (it != defaults.end() ? it->second : v);
  };
  if (name == "prop51-upsilon") return prop51_upsilon(t ? *t : 0.1);
  if (name == "prop52-L1") return prop52_l1_upsilon(fallback(6.0));
  throw InvalidArgument("unknown builtin Upsilon field '" + name + "'");
}

UpsilonField load_upsilon_json(std::string_view text, int n) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("Upsilon document is not valid JSON: ") + e.what());
  }
  try {
    UpsilonField f;
    f.name = doc.value("name", std::string("expression"));
    f.frame_tag = doc.value("frame", std::string("pivot"));
    if (f.frame_tag != "pivot" && f.frame_tag != "graph") throw FrameMismatch("unknown frame '" + f.frame_tag + "'");
    const auto& rows = doc.at("entries");
    const int m = n - 1;
    if (static_cast<int>(rows.size()) != m) throw FrameMismatch("Upsilon needs n-1 rows");
    std::vector<std::pair<DefiningExpr, DefiningExpr>> entries;
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != m) throw FrameMismatch("Upsilon needs n-1 columns");
      for (const auto& e : row) {
        if (e.is_string()) {
          entries.emplace_back(DefiningExpr::parse(e.get<std::string>(), n), DefiningExpr::constant(n, 0.0));
        } else {
          entries.emplace_back(DefiningExpr::parse(e.at(0).get<std::string>(), n),
                               DefiningExpr::parse(e.at(1).get<std::string>(), n));
        }
      }
    }
    f.evaluate = [entries = std::move(entries), m](const UpsilonContext& ctx) {
      CMatrix B(m, m);
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          const auto& [re_part, im_part] = entries[static_cast<std::size_t>(j * m + k)];
          B(j, k) = Complex(re_part.eval_real(ctx.p), im_part.eval_real(ctx.p));
        }
      return B;
    };
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed Upsilon document: ") + e.what());
  }
}

UpsilonField load_upsilon_file(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open Upsilon file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_upsilon_json(ss.str(), n);
}

UpsilonPoint evaluate_upsilon(const DomainSpec& dom, const UpsilonField& ups, int q, const Point& p,
                              const UpsilonOptions& options) {
  const int m = dom.n - 1;
  if (q < 0 || q > m) throw InvalidArgument("degree q out of range");
  LeviOptions lo;
  lo.normalize = options.normalize;
  if (ups.frame_tag == "graph") {
    lo.pivot = dom.n - 1;
  } else if (ups.frame_tag != "pivot") {
    throw FrameMismatch("unknown frame '" + ups.frame_tag + "'");
  }
  LeviData levi;
  try {
    levi = levi_form_at(dom.rho, dom.phi, p, lo);
  } catch (const DegenerateBoundaryPoint& e) {
    if (lo.pivot) throw FrameMismatch(std::string("graph frame unavailable here: ") + e.what());
    throw;
  }

  const CMatrix B = ups.evaluate(UpsilonContext{dom, levi, p});
  if (B.rows() != m || B.cols() != m) throw FrameMismatch("Upsilon matrix has the wrong size for this domain");

  UpsilonPoint out;
  out.p = p;
  out.mu = levi.mu;
  out.hermitian_defect = hermitian_defect(B);
  const CMatrix Bh = 0.5 * (B + B.adjoint());
  const CMatrix& S = levi.frame_chol;
  out.b_orthonormal = S.transpose() * Bh * S.conjugate();
  out.b_orthonormal = 0.5 * (out.b_orthonormal + out.b_orthonormal.adjoint()).eval();
  const RVector beig = eigen_ascending(out.b_orthonormal).values;
  out.b_min = beig.size() ? beig[0] : 0.0;
  out.b_max = beig.size() ? beig[beig.size() - 1] : 0.0;

  // Pairing of the bivector with the Levi form: sum_{a,b} Bu(a,b) c(a,b).
  out.levi_of_upsilon = out.b_orthonormal.cwiseProduct(levi.c_on).sum().real();
  out.trace = out.b_orthonormal.trace().real();
  out.slack = levi.mu.head(q).sum() - out.levi_of_upsilon;

  const double trace_c = levi.c_on.trace().real();
  const CMatrix A = form_action_matrix(levi.c_on, m - q);
  const CMatrix M = (trace_c - out.levi_of_upsilon) * CMatrix::Identity(A.rows(), A.cols()) - A;
  out.form_min = eigen_ascending(M).values[0];
  out.form_raw_l1 = m > 0 ? (trace_c - out.levi_of_upsilon) * levi.g_restricted(0, 0).real() -
                                levi.scale * levi.c_raw(0, 0).real()
                          : 0.0;

  const double tol = options.tolerance;
  out.cond1 = out.hermitian_defect <= tol && out.b_min >= -tol && out.b_max <= 1.0 + tol;
  out.cond2 = out.slack >= -tol && out.form_min >= -tol;
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

namespace {

void add_witness(std::vector<FailureWitness>& witnesses, std::size_t& truncated, FailureWitness w) {
  if (witnesses.size() < kMaxWitnesses) {
    witnesses.push_back(std::move(w));
  } else {
    ++truncated;
  }
}

bool degenerate_fraction_exceeded(std::size_t degenerate, std::size_t accepted) {
  const std::size_t total = degenerate + accepted;
  return total > 0 && static_cast<double>(degenerate) > 0.01 * static_cast<double>(total);
}

}  // namespace

std::vector<PointCertificates> certify_points(const DomainSpec& dom, int q, const std::vector<Point>& points,
                                              const CertifyOptions& options) {
  if (q < 0 || q > dom.n - 1) throw InvalidArgument("degree q out of range");
  std::vector<PointCertificates> out(points.size());
  LeviOptions lo;
  lo.normalize = options.normalize;
  parallel_for(
      points.size(),
      [&](std::size_t i) {
        const LeviData levi = levi_form_at(dom.rho, dom.phi, points[i], lo);
        out[i].p = points[i];
        out[i].mu = levi.mu;
        out[i].plus = weak_zq_lp(levi.mu, q, +1);
        out[i].minus = weak_zq_lp(levi.mu, q, -1);
      },
      options.threads);
  return out;
}

ComponentReport fold_component(const BoundaryComponent& comp, const std::vector<PointCertificates>& results,
                               double delta_min, std::vector<FailureWitness>& witnesses, std::size_t& truncated) {
  ComponentReport rep;
  rep.label = comp.label;
  rep.orientation_hint = comp.orientation_hint;
  rep.samples = results.size();

  auto ok = [&](const std::optional<Certificate>& c) { return c && c->margin >= delta_min; };
  auto min_margin = [&](int branch) {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& r : results) {
      const auto& c = branch == 1 ? r.plus : r.minus;
      v = std::min(v, c ? c->margin : 0.0);
    }
    return results.empty() ? 0.0 : v;
  };
  for (const auto& r : results) {
    rep.feasible_plus += ok(r.plus) ? 1 : 0;
    rep.feasible_minus += ok(r.minus) ? 1 : 0;
  }
  const bool all_plus = rep.feasible_plus == results.size();
  const bool all_minus = rep.feasible_minus == results.size();

  int chosen = 0;
  if (comp.orientation_hint != 0) {
    const bool hint_ok = comp.orientation_hint == 1 ? all_plus : all_minus;
    if (hint_ok) chosen = comp.orientation_hint;
    else if (comp.orientation_hint == 1 ? all_minus : all_plus) chosen = -comp.orientation_hint;
  } else if (all_plus && all_minus) {
    chosen = min_margin(-1) > min_margin(1) ? -1 : 1;
  } else if (all_plus) {
    chosen = 1;
  } else if (all_minus) {
    chosen = -1;
  }

  int reported = chosen;
  if (chosen != 0) {
    rep.certified = true;
    rep.branch = chosen;
  } else if (comp.orientation_hint != 0) {
    reported = comp.orientation_hint;
  } else {
    reported = rep.feasible_plus >= rep.feasible_minus ? 1 : -1;
  }

  rep.min_margin = min_margin(reported);
  rep.min_slack = std::numeric_limits<double>::infinity();
  rep.min_trace = std::numeric_limits<double>::infinity();
  rep.max_trace = -std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    const auto& c = reported == 1 ? r.plus : r.minus;
    if (c) {
      rep.min_slack = std::min(rep.min_slack, c->slack);
      rep.min_trace = std::min(rep.min_trace, c->trace);
      rep.max_trace = std::max(rep.max_trace, c->trace);
    }
    if (!ok(c)) {
      ++rep.failures;
      add_witness(witnesses, truncated,
                  {comp.label, r.p,
                   "no certificate with branch " + std::string(reported == 1 ? "+1" : "-1") + " and margin >= delta_min",
                   c ? c->margin : 0.0});
    }
  }
  if (!std::isfinite(rep.min_slack)) rep.min_slack = 0.0;
  if (!std::isfinite(rep.min_trace)) rep.min_trace = rep.max_trace = 0.0;
  return rep;
}

CertificationReport certify_domain(const DomainSpec& dom, int q, const CertifyOptions& options) {
  if (q < 0 || q > dom.n - 1) throw InvalidArgument("degree q out of range");
  CertificationReport report;
  report.mode = "lp";
  report.domain = dom.name;
  report.n = dom.n;
  report.q = q;
  bool degenerate = false;
  for (std::size_t c = 0; c < dom.components.size(); ++c) {
    const SampleSet samples = sample_boundary(dom, c, options.samples, options.seed, options.region);
    const auto results = certify_points(dom, q, samples.points, options);
    ComponentReport rep =
        fold_component(dom.components[c], results, options.delta_min, report.witnesses, report.witnesses_truncated);
    rep.attempts = samples.attempts;
    rep.degenerate = samples.degenerate;
    degenerate = degenerate || degenerate_fraction_exceeded(samples.degenerate, samples.points.size());
    report.components.push_back(std::move(rep));
  }
  const bool all = std::all_of(report.components.begin(), report.components.end(),
                               [](const ComponentReport& r) { return r.certified; });
  report.verdict = degenerate ? Verdict::Degenerate : (all ? Verdict::Certified : Verdict::InfeasibleAtPoints);
  return report;
}

WeakYReport certify_weak_y(const DomainSpec& dom, int q, const CertifyOptions& options) {
  WeakYReport out;
  out.at_q = certify_domain(dom, q, options);
  out.at_dual = certify_domain(dom, dom.n - 1 - q, options);
  out.certified = out.at_q.verdict == Verdict::Certified && out.at_dual.verdict == Verdict::Certified;
  return out;
}

CertificationReport verify_upsilon_field(const DomainSpec& dom, const UpsilonField& ups, int q,
                                         const std::vector<Point>& points, const UpsilonOptions& options,
                                         const std::string& component) {
  CertificationReport report;
  report.mode = "upsilon";
  report.domain = dom.name;
  report.n = dom.n;
  report.q = q;

  const BoundaryComponent* comp = nullptr;
  if (!component.empty()) comp = &dom.components.at(dom.component_index(component));
  else if (!dom.components.empty()) comp = &dom.components.front();

  std::vector<std::optional<UpsilonPoint>> results(points.size());
  std::vector<std::string> errors(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    try {
      results[i] = evaluate_upsilon(dom, ups, q, points[i], options);
    } catch (const DegenerateBoundaryPoint& e) {
      errors[i] = e.what();
    }
  });

  ComponentReport rep;
  rep.label = comp ? comp->label : std::string("points");
  rep.orientation_hint = comp ? comp->orientation_hint : 0;
  rep.samples = points.size();
  std::size_t above = 0, below = 0;
  for (const auto& r : results) {
    if (!r) continue;
    if (r->trace <= q - options.delta_min) ++below;
    if (r->trace >= q + options.delta_min) ++above;
  }
  int branch = rep.orientation_hint;
  if (branch == 0 || (branch == 1 ? below : above) < std::max(below, above)) branch = below >= above ? 1 : -1;

  rep.min_margin = std::numeric_limits<double>::infinity();
  rep.min_slack = std::numeric_limits<double>::infinity();
  rep.min_trace = std::numeric_limits<double>::infinity();
  rep.max_trace = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!results[i]) {
      ++rep.degenerate;
      add_witness(report.witnesses, report.witnesses_truncated, {rep.label, points[i], "degenerate: " + errors[i], 0.0});
      continue;
    }
    const UpsilonPoint& r = *results[i];
    const double margin = branch == 1 ? q - r.trace : r.trace - q;
    rep.min_margin = std::min(rep.min_margin, margin);
    rep.min_slack = std::min(rep.min_slack, r.slack);
    rep.min_trace = std::min(rep.min_trace, r.trace);
    rep.max_trace = std::max(rep.max_trace, r.trace);
    bool failed = false;
    if (!r.cond1) {
      failed = true;
      add_witness(report.witnesses, report.witnesses_truncated,
                  {rep.label, r.p, "condition 1: 0 <= Upsilon <= Id", r.b_min < 0.0 ? r.b_min : r.b_max});
    }
    if (!r.cond2) {
      failed = true;
      add_witness(report.witnesses, report.witnesses_truncated,
                  {rep.label, r.p, "condition 2: mu_1+...+mu_q - L(Upsilon) >= 0", std::min(r.slack, r.form_min)});
    }
    if (!(margin >= options.delta_min)) {
      failed = true;
      add_witness(report.witnesses, report.witnesses_truncated,
                  {rep.label, r.p, "condition 3: sigma (q - omega(Upsilon)) >= delta_min", margin});
    }
    if (failed) ++rep.failures;
    else if (branch == 1) ++rep.feasible_plus;
    else ++rep.feasible_minus;
  }
  if (!std::isfinite(rep.min_margin)) rep.min_margin = rep.min_slack = rep.min_trace = rep.max_trace = 0.0;
  rep.certified = rep.failures == 0 && rep.degenerate == 0 && !points.empty();
  if (rep.certified) rep.branch = branch;

  const bool degenerate = degenerate_fraction_exceeded(rep.degenerate, points.size() - rep.degenerate);
  report.verdict = degenerate ? Verdict::Degenerate : (rep.certified ? Verdict::Certified : Verdict::InfeasibleAtPoints);
  report.components.push_back(std::move(rep));
  return report;
}

}  // namespace levi
