#include "levi/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string_view>

namespace levi {

Json point_json(const Point& p) {
  Json a = Json::array();
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    a.push_back(p[j].real());
    a.push_back(p[j].imag());
  }
  return a;
}

Json vector_json(const RVector& v) {
  Json a = Json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) a.push_back(v[j]);
  return a;
}

Json certificate_json(const Certificate& c) {
  Json j;
  j["q"] = c.q;
  j["branch"] = c.branch;
  j["lambda"] = vector_json(c.lambda);
  j["trace"] = c.trace;
  j["slack"] = c.slack;
  j["margin"] = c.margin;
  return j;
}

Json component_json(const ComponentReport& c) {
  Json j;
  j["label"] = c.label;
  j["orientation_hint"] = c.orientation_hint;
  j["certified"] = c.certified;
  j["branch"] = c.branch ? Json(*c.branch) : Json(nullptr);
  j["samples"] = c.samples;
  j["attempts"] = c.attempts;
  j["degenerate"] = c.degenerate;
  j["feasible_plus"] = c.feasible_plus;
  j["feasible_minus"] = c.feasible_minus;
  j["failures"] = c.failures;
  j["min_margin"] = c.min_margin;
  j["min_slack"] = c.min_slack;
  j["min_trace"] = c.min_trace;
  j["max_trace"] = c.max_trace;
  return j;
}

Json report_json(const CertificationReport& r) {
  Json j;
  j["mode"] = r.mode;
  j["domain"] = r.domain;
  j["n"] = r.n;
  j["q"] = r.q;
  j["verdict"] = to_string(r.verdict);
  j["scope"] = r.scope;
  j["components"] = Json::array();
  for (const auto& c : r.components) j["components"].push_back(component_json(c));
  j["failure_witnesses"] = Json::array();
  for (const auto& w : r.witnesses) {
    Json wj;
    wj["component"] = w.component;
    wj["point"] = point_json(w.point);
    wj["condition"] = w.condition;
    wj["value"] = w.value;
    j["failure_witnesses"].push_back(wj);
  }
  j["witnesses_truncated"] = r.witnesses_truncated;
  return j;
}

Json mkh_terms_json(const MkhTerms& t) {
  Json j;
  j["dbar_norm2"] = t.dbar_norm2;
  j["dbar_star_norm2"] = t.dbar_star_norm2;
  j["gradient_norm2"] = t.gradient_norm2;
  j["hessian_term"] = t.hessian_term;
  j["lhs"] = t.lhs;
  j["rhs"] = t.rhs;
  j["residual"] = t.residual;
  return j;
}

namespace {

void write_string(std::string& out, const std::string& s) {
  // Reuse the library's escaping for strings.
  out += Json(s).dump();
}

void write(std::string& out, const Json& v, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        write_string(out, it.key());
        out += indent > 0 ? ": " : ":";
        write(out, it.value(), indent, depth + 1);
      }
      out += nl;
      out += close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_primitive(); });
      out += "[";
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) {
          out += nl;
          out += pad;
        }
        first = false;
        write(out, e, indent, depth + 1);
      }
      if (!flat) {
        out += nl;
        out += close_pad;
      }
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      out += buf;
      // Keep floats recognisable as floats after a round trip.
      if (std::string_view(buf).find_first_of(".e") == std::string_view::npos) out += ".0";
      return;
    }
    case Json::value_t::string:
      write_string(out, v.get<std::string>());
      return;
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const Json& doc, int indent) {
  std::string out;
  write(out, doc, indent, 0);
  out += "\n";
  return out;
}

}  // namespace levi
