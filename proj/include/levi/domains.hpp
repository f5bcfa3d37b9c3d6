#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "levi/expr.hpp"
#include "levi/smooth_abs.hpp"

namespace levi {

/// A user-declared connected piece of the boundary.
struct BoundaryComponent {
  std::string label;
  Point seed;
  /// +1 (trace below q expected), -1 (trace above q expected), 0 for no preference.
  int orientation_hint = 0;
  /// Radius of the ambient draw ball around the seed; 0 draws from the whole box.
  double spread = 0.0;
  /// When set, only boundary points with region(p) < 0 belong to the component.
  std::optional<DefiningExpr> region;
};

struct DomainSpec {
  std::string name;
  int n = 0;
  DefiningExpr rho;
  DefiningExpr phi;
  std::vector<BoundaryComponent> components;
  /// Half-widths of the sampling box, one per real coordinate (x1, y1, x2, y2, ...).
  RVector box;
  std::map<std::string, std::string> tags;
  /// Set for graph domains rho = -Im z_n + P(z_1..z_{n-1}); holds P.
  std::optional<DefiningExpr> graph_height;

  /// Checks dimensions and spot-checks that phi is strictly plurisubharmonic
  /// at 100 points of the box. Throws InvalidArgument.
  void validate() const;

  std::size_t component_index(std::string_view label) const;
};

using DomainParams = std::map<std::string, double, std::less<>>;

/// ball, annulus, prop51, prop51_bounded, prop52, prop52_bounded.
DomainSpec builtin_domain(std::string_view name, const DomainParams& params = {});
std::vector<std::string> builtin_domain_names();

/// Domain definition document: {n, rho, phi, components: [{label, seed,
/// orientation_hint, spread?, region?}], box, graph_height?, tags?}.
DomainSpec load_domain_json(std::string_view text);
DomainSpec load_domain_file(const std::string& path);
std::string domain_to_json(const DomainSpec& dom);

/// rho1 glued to rho2 by 1/2 psi_r(rho1 - rho2) + 1/2 (rho1 + rho2).
DefiningExpr smooth_max_expr(const DefiningExpr& rho1, const DefiningExpr& rho2, double r);

/// Where ambient draws come from. An unset center falls back to the component seed.
struct SampleRegion {
  std::optional<Point> center;
  double radius = 0.0;  ///< 0 keeps the component default
};

struct SampleSet {
  std::vector<Point> points;
  std::size_t attempts = 0;
  /// Converged draws rejected because |d rho| <= 1e-8.
  std::size_t degenerate = 0;
};

inline constexpr double kBoundaryResidual = 1e-10;

/// Deterministic boundary samples of one component: graph domains use the
/// exact parametrisation, everything else damped Newton projection along the
/// real gradient. Throws SamplingFailure after 100 N attempts.
SampleSet sample_boundary(const DomainSpec& dom, std::size_t component, std::size_t count, std::uint64_t seed,
                          const SampleRegion& region = {});

/// Newton projection onto {rho = 0}; nullopt when it does not converge.
std::optional<Point> project_to_boundary(const DefiningExpr& rho, const Point& start);

}  // namespace levi
