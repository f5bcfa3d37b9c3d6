#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "levi/domains.hpp"
#include "levi/geometry.hpp"

namespace levi {

enum class ZqStatus { Positive, Negative, NotZq };

const char* to_string(ZqStatus s);

/// Strict Z(q) at a point with Levi eigenvalues mu (n - 1 of them):
/// Positive iff at least n - q exceed 1e-10, Negative iff at least q + 1 are
/// below -1e-10.
ZqStatus z_q_status(const RVector& mu, int q);

inline constexpr double kCountTolerance = 1e-10;
inline constexpr double kMarginFloor = 1e-9;

/// Diagonal certificate in the Levi eigenframe.
struct Certificate {
  int q = 0;
  int branch = +1;        ///< +1: trace < q, -1: trace > q
  RVector lambda;         ///< weights on mu, ascending order
  RVector complement;     ///< 1 - lambda, kept separately so duality is exact
  double trace = 0.0;     ///< sum of lambda
  double cotrace = 0.0;   ///< sum of complement
  double slack = 0.0;     ///< mu_1 + ... + mu_q - sum lambda_j mu_j
  double margin = 0.0;    ///< |trace - q|
};

/// mu_1 + ... + mu_q - sum_j lambda_j mu_j.
double certificate_slack(const RVector& mu, int q, const RVector& lambda);

/// Exact optimum of max delta over lambda in [0,1]^(n-1) with
/// sum lambda_j mu_j <= mu_1 + ... + mu_q and trace <= q - delta (branch +1)
/// or trace >= q + delta (branch -1). Absent when the optimum is <= 1e-9.
std::optional<Certificate> weak_zq_lp(const RVector& mu, int q, int branch);

/// Smallest m on the requested side of q (m < q for +1, m > q for -1) with
/// mu_1 + ... + mu_m <= mu_1 + ... + mu_q.
std::optional<int> binary_weak_zq(const RVector& mu, int q, int branch);

struct DualCertificate {
  Certificate cert;
  RVector mu;
};

/// Complement certificate for the reversed, negated spectrum at degree
/// n - 1 - q. Applying it twice returns the original bit for bit.
DualCertificate duality_transform(const Certificate& cert, const RVector& mu);

// ---------------------------------------------------------------------------
// Explicit Upsilon fields

/// Everything an Upsilon field may inspect at one boundary point.
struct UpsilonContext {
  const DomainSpec& dom;
  const LeviData& levi;
  const Point& p;
};

/// Matrix B with B(j, k) = b^{kbar j} in the frame named by frame_tag:
/// "pivot" (the default tangential_basis frame) or "graph" (pivot forced to
/// z_n, giving L_j = e_j + 2i dP/dz_j e_n on graph domains).
struct UpsilonField {
  std::string name;
  std::string frame_tag = "pivot";
  std::function<CMatrix(const UpsilonContext&)> evaluate;
};

/// prop51-upsilon(t): identity minus t (2 L1bar^L1 + 3 y^2 L2bar^L2), graph frame.
UpsilonField prop51_upsilon(double t);
/// prop52-L1(t): (g^t_{1 1bar})^{-1} L1bar^L1, graph frame.
UpsilonField prop52_l1_upsilon(double t);
/// Parses "prop51-upsilon(0.1)", "builtin:prop52-L1(6)" or a bare name; a bare
/// prop51-upsilon uses t = 0.1, a bare prop52-L1 takes t from `defaults`.
UpsilonField builtin_upsilon(std::string_view spec, const DomainParams& defaults = {});
/// Expression field from a document {frame, entries: [[[re, im], ...], ...]}.
UpsilonField load_upsilon_json(std::string_view text, int n);
UpsilonField load_upsilon_file(const std::string& path, int n);

/// Condition values of Definition-style checks at one point.
struct UpsilonPoint {
  Point p;
  RVector mu;
  CMatrix b_orthonormal;   ///< B in the g-orthonormal frame
  double hermitian_defect = 0.0;
  double b_min = 0.0;      ///< smallest eigenvalue of the orthonormal B
  double b_max = 0.0;      ///< largest eigenvalue
  double levi_of_upsilon = 0.0;  ///< L(Upsilon)
  double trace = 0.0;      ///< omega(Upsilon)
  double slack = 0.0;      ///< mu_1 + ... + mu_q - L(Upsilon)
  /// Smallest eigenvalue of (Tr L - L(Upsilon)) Id - L acting on (0, n-1-q)-forms.
  double form_min = 0.0;
  /// ((Tr L - L(Upsilon)) omega - i ddbar rho)(L_1bar ^ L_1) in the field's frame;
  /// only meaningful when q = n - 2.
  double form_raw_l1 = 0.0;
  bool cond1 = false, cond2 = false;
};

struct UpsilonOptions {
  bool normalize = false;
  double delta_min = 1e-6;
  double tolerance = 1e-9;
};

UpsilonPoint evaluate_upsilon(const DomainSpec& dom, const UpsilonField& ups, int q, const Point& p,
                              const UpsilonOptions& options = {});

// ---------------------------------------------------------------------------
// Reports

enum class Verdict { Certified, InfeasibleAtPoints, Degenerate };
const char* to_string(Verdict v);

struct FailureWitness {
  std::string component;
  Point point;
  std::string condition;
  double value = 0.0;
};

struct ComponentReport {
  std::string label;
  int orientation_hint = 0;
  std::optional<int> branch;  ///< set when certified
  bool certified = false;
  std::size_t samples = 0;
  std::size_t attempts = 0;
  std::size_t degenerate = 0;
  double min_margin = 0.0;
  double min_slack = 0.0;
  double min_trace = 0.0;
  double max_trace = 0.0;
  std::size_t failures = 0;
  /// Points certified under each branch (+1, -1).
  std::size_t feasible_plus = 0;
  std::size_t feasible_minus = 0;
};

struct CertificationReport {
  std::string mode;  ///< "lp" or "upsilon"
  std::string domain;
  int n = 0;
  int q = 0;
  Verdict verdict = Verdict::Certified;
  std::vector<ComponentReport> components;
  std::vector<FailureWitness> witnesses;  ///< first 100
  std::size_t witnesses_truncated = 0;
  /// Always "pointwise": samples are checked, continuity is not.
  std::string scope = "pointwise";
};

inline constexpr std::size_t kMaxWitnesses = 100;

struct CertifyOptions {
  std::size_t samples = 200;
  std::uint64_t seed = 1;
  SampleRegion region;
  double delta_min = 1e-6;
  bool normalize = true;
  unsigned threads = 0;  ///< 0: LEVI_SCOPE_THREADS or hardware
};

/// Per-point LP outcome for one component's samples.
struct PointCertificates {
  Point p;
  RVector mu;
  std::optional<Certificate> plus;
  std::optional<Certificate> minus;
};

std::vector<PointCertificates> certify_points(const DomainSpec& dom, int q, const std::vector<Point>& points,
                                              const CertifyOptions& options = {});

/// Folds per-point certificates of one component into its summary; appends
/// witnesses for the chosen (or preferred) branch.
ComponentReport fold_component(const BoundaryComponent& comp, const std::vector<PointCertificates>& results,
                               double delta_min, std::vector<FailureWitness>& witnesses, std::size_t& truncated);

/// Samples every component and runs the LP at each sample.
CertificationReport certify_domain(const DomainSpec& dom, int q, const CertifyOptions& options = {});

struct WeakYReport {
  CertificationReport at_q;
  CertificationReport at_dual;
  bool certified = false;
};

/// Weak Y(q): weak Z(q) and weak Z(n - 1 - q) together.
WeakYReport certify_weak_y(const DomainSpec& dom, int q, const CertifyOptions& options = {});

/// Checks an explicit field at the given points of one component.
CertificationReport verify_upsilon_field(const DomainSpec& dom, const UpsilonField& ups, int q,
                                         const std::vector<Point>& points, const UpsilonOptions& options = {},
                                         const std::string& component = "");

}  // namespace levi
