#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "levi/certify.hpp"
#include "levi/domains.hpp"
#include "levi/expr.hpp"
#include "levi/geometry.hpp"
#include "levi/mkh.hpp"
#include "levi/report.hpp"
#include "levi/smooth_abs.hpp"

namespace py = pybind11;
using namespace levi;

namespace {

// Reports cross the boundary as plain dicts.
py::object to_python(const Json& doc) {
  return py::module_::import("json").attr("loads")(dump_json(doc, 0));
}

py::dict jet_dict(const Jet2& j) {
  py::dict d;
  d["value"] = j.value;
  d["dz"] = j.dz;
  d["dzbar"] = j.dzbar;
  d["dzdzbar"] = j.dzdzbar;
  d["dzdz"] = j.dzdz;
  return d;
}

py::dict psi_dict(const PsiValue& v) {
  py::dict d;
  d["value"] = v.value;
  d["d1"] = v.d1;
  d["d2"] = v.d2;
  d["d3"] = v.d3;
  return d;
}

DomainParams to_params(const py::dict& kw) {
  DomainParams params;
  for (const auto& [k, v] : kw) params[py::cast<std::string>(k)] = py::cast<double>(v);
  return params;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Levi-form eigenvalue certificates, boundary sampling and the flat MKH identity";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  static py::exception<ParseError> parse_error(m, "ParseError", base.ptr());
  static py::exception<SamplingFailure> sampling_failure(m, "SamplingFailure", base.ptr());
  static py::exception<SupportOverflow> support_overflow(m, "SupportOverflow", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      py::set_error(parse_error, e.what());
    } catch (const SamplingFailure& e) {
      py::set_error(sampling_failure, e.what());
    } catch (const SupportOverflow& e) {
      py::set_error(support_overflow, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<DefiningExpr>(m, "DefiningExpr")
      .def_property_readonly("n", &DefiningExpr::nvars)
      .def("__str__", &DefiningExpr::to_string)
      .def("eval", &DefiningExpr::eval, py::arg("p"))
      .def("eval_real", &DefiningExpr::eval_real, py::arg("p"))
      .def("jet", [](const DefiningExpr& e, const Point& p) { return jet_dict(e.jet(p)); }, py::arg("p"),
           "Value, Wirtinger gradients and both second-order blocks as a dict.");

  m.def("parse", [](const std::string& text, int n) { return DefiningExpr::parse(text, n); }, py::arg("text"),
        py::arg("n"));

  py::class_<LeviData>(m, "LeviData")
      .def_readonly("mu", &LeviData::mu)
      .def_readonly("c_raw", &LeviData::c_raw)
      .def_readonly("c_on", &LeviData::c_on)
      .def_readonly("g_restricted", &LeviData::g_restricted)
      .def_readonly("rho_value", &LeviData::rho_value)
      .def_readonly("drho_norm", &LeviData::drho_norm)
      .def_property_readonly("pivot", [](const LeviData& l) { return l.frame.pivot; })
      .def_property_readonly("frame", [](const LeviData& l) { return l.frame.L; });

  m.def(
      "levi_form_at",
      [](const DefiningExpr& rho, const DefiningExpr& phi, const Point& p, bool normalize, std::optional<int> pivot) {
        LeviOptions o;
        o.normalize = normalize;
        o.pivot = pivot;
        return levi_form_at(rho, phi, p, o);
      },
      py::arg("rho"), py::arg("phi"), py::arg("p"), py::arg("normalize") = true, py::arg("pivot") = py::none());

  m.def("z_q_status", [](const RVector& mu, int q) { return std::string(to_string(z_q_status(mu, q))); },
        py::arg("mu"), py::arg("q"));

  py::class_<Certificate>(m, "Certificate")
      .def_readonly("q", &Certificate::q)
      .def_readonly("branch", &Certificate::branch)
      .def_readonly("lam", &Certificate::lambda)
      .def_readonly("complement", &Certificate::complement)
      .def_readonly("trace", &Certificate::trace)
      .def_readonly("cotrace", &Certificate::cotrace)
      .def_readonly("slack", &Certificate::slack)
      .def_readonly("margin", &Certificate::margin);

  m.def("weak_zq_lp", &weak_zq_lp, py::arg("mu"), py::arg("q"), py::arg("branch"),
        "Optimal diagonal certificate, or None when the margin does not exceed 1e-9.");
  m.def("binary_weak_zq", &binary_weak_zq, py::arg("mu"), py::arg("q"), py::arg("branch"));
  m.def(
      "duality_transform",
      [](const Certificate& c, const RVector& mu) {
        auto d = duality_transform(c, mu);
        return py::make_tuple(d.cert, d.mu);
      },
      py::arg("cert"), py::arg("mu"), "Returns (dual certificate, dual spectrum).");

  py::class_<DomainSpec>(m, "DomainSpec")
      .def_readonly("name", &DomainSpec::name)
      .def_readonly("n", &DomainSpec::n)
      .def_readonly("rho", &DomainSpec::rho)
      .def_readonly("phi", &DomainSpec::phi)
      .def_property_readonly("components",
                             [](const DomainSpec& d) {
                               std::vector<std::string> labels;
                               for (const auto& c : d.components) labels.push_back(c.label);
                               return labels;
                             })
      .def("to_json", &domain_to_json);

  m.def("builtin_domain", [](const std::string& name, const py::kwargs& kw) { return builtin_domain(name, to_params(kw)); },
        py::arg("name"), "Builtin domain; parameters (R, n, t, r, ...) go in as keyword arguments.");
  m.def("builtin_domain_names", &builtin_domain_names);
  m.def("load_domain_json", [](const std::string& text) { return load_domain_json(text); }, py::arg("text"));

  m.def(
      "sample_boundary",
      [](const DomainSpec& dom, const std::string& component, std::size_t count, std::uint64_t seed,
         std::optional<Point> near, double radius) {
        SampleRegion region{near, radius};
        const std::size_t idx = component.empty() ? 0 : dom.component_index(component);
        return sample_boundary(dom, idx, count, seed, region).points;
      },
      py::arg("dom"), py::arg("component") = "", py::arg("count") = 100, py::arg("seed") = 1,
      py::arg("near") = py::none(), py::arg("radius") = 0.0);

  m.def(
      "certify_domain",
      [](const DomainSpec& dom, int q, std::size_t samples, std::uint64_t seed, std::optional<Point> near,
         double radius, bool normalize) {
        CertifyOptions o;
        o.samples = samples;
        o.seed = seed;
        o.region = SampleRegion{near, radius};
        o.normalize = normalize;
        CertificationReport r;
        {
          py::gil_scoped_release release;
          r = certify_domain(dom, q, o);
        }
        return to_python(report_json(r));
      },
      py::arg("dom"), py::arg("q"), py::arg("samples") = 200, py::arg("seed") = 1, py::arg("near") = py::none(),
      py::arg("radius") = 0.0, py::arg("normalize") = true, "Report as a dict.");

  m.def("builtin_upsilon", [](const std::string& spec) { return builtin_upsilon(spec).name; }, py::arg("spec"),
        "Canonical name of a registered field; raises for unknown names.");

  m.def(
      "verify_upsilon",
      [](const DomainSpec& dom, const std::string& upsilon, int q, const std::vector<Point>& points, bool normalize) {
        DomainParams defaults;
        if (auto it = dom.tags.find("t"); it != dom.tags.end()) defaults["t"] = std::stod(it->second);
        const UpsilonField ups = builtin_upsilon(upsilon, defaults);
        UpsilonOptions o;
        o.normalize = normalize;
        return to_python(report_json(verify_upsilon_field(dom, ups, q, points, o)));
      },
      py::arg("dom"), py::arg("upsilon"), py::arg("q"), py::arg("points"), py::arg("normalize") = false);

  m.def(
      "mkh_terms",
      [](int n, double t, int points_per_axis, double width, double box) {
        const FormField f = bump_form(n, Window{Point::Zero(n), width});
        const auto grid = QuadratureGrid::cube(n, box, points_per_axis);
        return to_python(mkh_terms_json(mkh_terms(f, WeightConfig{t}, grid)));
      },
      py::arg("n") = 2, py::arg("t") = 0.0, py::arg("points_per_axis") = 12, py::arg("width") = 0.7,
      py::arg("box") = 1.0, "All MKH terms for the centred bump (0,1)-form.");
  m.def(
      "mkh_residual",
      [](int n, double t, int points_per_axis, double width, double box) {
        const FormField f = bump_form(n, Window{Point::Zero(n), width});
        return mkh_residual(f, WeightConfig{t}, QuadratureGrid::cube(n, box, points_per_axis));
      },
      py::arg("n") = 2, py::arg("t") = 0.0, py::arg("points_per_axis") = 12, py::arg("width") = 0.7,
      py::arg("box") = 1.0);

  m.def("psi", [](double x) { return psi_dict(psi_eval(x)); }, py::arg("x"));
  m.def("psi_r", [](double x, double r) { return psi_dict(psi_r_eval(x, r)); }, py::arg("x"), py::arg("r"));
}
