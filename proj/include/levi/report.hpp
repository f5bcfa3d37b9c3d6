#pragma once

#include <string>

#include <json.hpp>

#include "levi/certify.hpp"
#include "levi/mkh.hpp"

namespace levi {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

/// Interleaved real coordinates (x1, y1, x2, y2, ...).
Json point_json(const Point& p);
Json vector_json(const RVector& v);

Json certificate_json(const Certificate& c);
Json component_json(const ComponentReport& c);
Json report_json(const CertificationReport& r);
Json mkh_terms_json(const MkhTerms& t);

/// Pretty JSON where every floating value is printed with 17 significant
/// digits, so equal inputs always give byte-identical documents.
std::string dump_json(const Json& doc, int indent = 2);

}  // namespace levi
