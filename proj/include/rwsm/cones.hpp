#pragma once

// Sampled estimators for Frechet normal cones, Frechet subdifferentials,
// contingent cones and contingent directional derivatives, evaluated in the
// local chart of manifold.hpp.
//
// The refuters are one-sided. A `kRefuted` verdict comes with a sample whose
// difference quotient violates the defining liminf/limsup inequality at the
// finest scales of the schedule. A `kConsistent` verdict only means no such
// sample was found.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rwsm/manifold.hpp"

namespace rwsm {

/// Produces points of Omega at chart distance in (0, c * scale] from the
/// base point, for a sampler-specific constant c. Points must lie exactly on
/// Omega (constructive parameterizations only).
using SetSampler = std::function<std::vector<Point>(double scale, Rng& rng)>;

/// Extended-real function on a manifold.
using ScalarFunction = std::function<double(const Point&)>;

struct RefuteSchedule {
  /// Strictly decreasing scales; the limit is read off the finest ones.
  std::vector<double> scales;
  /// Random directions drawn per scale, on top of the +/- tangent basis.
  int samples_per_scale = 64;
  /// A quotient beyond +/- tolerance is a violation.
  double tolerance = 1e-3;
  /// Number of finest consecutive scales that must all violate.
  int consecutive = 2;
  std::uint64_t seed = 0;

  static RefuteSchedule geometric(double first, double ratio, double floor);
  /// 1e-2 down to 1e-6 by factors of 10.
  static RefuteSchedule standard();
};

enum class RefutationStatus { kConsistent, kRefuted };

struct RefutationWitness {
  Eigen::MatrixXd sample;     // ambient coordinates of u
  Eigen::MatrixXd direction;  // chart coordinates of u relative to p
  double quotient = 0.0;
  double scale = 0.0;
};

struct RefutationVerdict {
  RefutationStatus status = RefutationStatus::kConsistent;
  std::optional<RefutationWitness> witness;
  /// Per scale: sup (normal cone) or inf (subdifferential) of the quotient.
  std::vector<double> quotient_trace;

  bool refuted() const { return status == RefutationStatus::kRefuted; }
};

/// Tests x in N_Omega(p) through limsup <x, chart(u)> / d(u,p) <= 0 over
/// sampled u in Omega.
RefutationVerdict frechet_normal_refute(const SetSampler& omega, const Point& p, const Tangent& x,
                                        const RefuteSchedule& schedule);

/// Tests x in subdifferential of f at p through
/// liminf (f(u) - f(p) - <x, chart(u)>) / d(u,p) >= 0 over u near p on M.
RefutationVerdict frechet_subdiff_refute(const ScalarFunction& f, const Point& p, const Tangent& x,
                                         const RefuteSchedule& schedule);

struct ContingentSchedule {
  std::vector<double> scales;
  /// Directions w are drawn from the ball v + (perturbation * t) B. With the
  /// default of zero only w = v is used, which is exact for locally Lipschitz
  /// f in finite dimension.
  double perturbation = 0.0;
  int perturbation_samples = 0;
  /// The estimate is the minimum over this many finest scales.
  int tail_scales = 1;
  std::uint64_t seed = 0;

  /// 1e-1 down to 1e-4, halving.
  static ContingentSchedule standard();
};

/// liminf over t -> 0, w -> v of (f(exp_p(t w)) - f(p)) / t.
double contingent_derivative(const ScalarFunction& f, const Point& p, const Tangent& v,
                             const ContingentSchedule& schedule);

/// dist(v; T_Omega(p)): minimum over sampled u at the finest scales of the
/// distance from v to the ray spanned by chart(u) / |chart(u)|, and never
/// more than |v| (the cone contains 0).
double contingent_cone_distance(const SetSampler& omega, const Point& p, const Tangent& v,
                                const ContingentSchedule& schedule);

// ---------------------------------------------------------------------------
// Cone descriptions.

/// Closed convex cone span(lines) + cone(rays) in the tangent space at a
/// point. Generators are orthonormal as a whole, which makes projection
/// exact coordinatewise.
class FiniteCone {
 public:
  FiniteCone(Point base, std::vector<Eigen::MatrixXd> lines, std::vector<Eigen::MatrixXd> rays);

  const Point& base() const { return base_; }
  const std::vector<Eigen::MatrixXd>& lines() const { return lines_; }
  const std::vector<Eigen::MatrixXd>& rays() const { return rays_; }
  int dimension() const { return static_cast<int>(lines_.size() + rays_.size()); }

  Eigen::MatrixXd project(const Eigen::MatrixXd& x) const;
  /// Distance from x to the cone itself.
  double distance(const Eigen::MatrixXd& x) const;
  /// Distance from x to (cone) intersected with the ball of radius `radius`.
  double distance_to_slice(const Eigen::MatrixXd& x, double radius = 1.0) const;
  bool contains(const Eigen::MatrixXd& x, double tol = kFeasibilityTol) const;

  /// Member of the cone with norm at most `radius`, drawn by sampling the
  /// generator coefficients.
  Eigen::MatrixXd sample_member(Rng& rng, double radius = 1.0) const;
  /// +/- lines and rays scaled to `radius`.
  std::vector<Eigen::MatrixXd> extreme_elements(double radius = 1.0) const;

 private:
  Point base_;
  std::vector<Eigen::MatrixXd> lines_;
  std::vector<Eigen::MatrixXd> rays_;
};

/// Frechet normal cone of the nonnegative Stiefel slice St+(n,k) at P,
/// described by which rows of P vanish and where P is positive:
///   X in T_P St(n,k), X <= 0 on the zero rows of P, and X = 0 on the
///   positive entries of P.
struct PatternCone {
  Eigen::MatrixXd base;
  std::vector<int> zero_rows;  // 0-based
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> support_mask;

  /// Same cone as a FiniteCone on the given manifold (St(n,k), or a sphere /
  /// euclidean model of St(n,1)).
  FiniteCone to_finite_cone(const Manifold& m) const;
};

inline constexpr double kZeroEntryTol = 1e-12;

/// Checks P in St+(n,k) and builds its normal cone pattern.
PatternCone stiefel_plus_normal_cone(const Eigen::MatrixXd& p);

bool pattern_cone_contains(const PatternCone& cone, const Tangent& x,
                           double tol = kFeasibilityTol);

/// Snap entries with |p_ij| <= kZeroEntryTol to 0.
Eigen::MatrixXd snap_small_entries(const Eigen::MatrixXd& p);

/// Constructive sampler of St+(n,k) around P: columns keep their positive
/// support (entries may hit zero), zero rows of P may join at most one
/// column with a nonnegative entry, and columns are renormalized. Disjoint
/// column supports make every sample exactly orthonormal and nonnegative.
SetSampler stiefel_plus_sampler(const Point& p, int random_samples = 64);

/// Random point of St+(n,k): k disjoint nonempty row supports with
/// positive entries, normalized. Each row is left zero with probability
/// `zero_row_probability` as long as every column keeps a row.
Eigen::MatrixXd random_stiefel_plus(int n, int k, Rng& rng, double zero_row_probability = 0.3);

struct PatternCrossCheck {
  int inside_tested = 0;
  int inside_refuted = 0;
  int outside_tested = 0;
  int outside_missed = 0;
  /// pattern_cone_contains disagreeing with the FiniteCone description.
  int membership_mismatches = 0;

  int disagreements() const { return inside_refuted + outside_missed + membership_mismatches; }
};

/// Compares the pattern description of N_{St+}(P) with the sampling
/// refuter: members (extreme and random) must survive, tangent covectors at
/// distance >= margin from the unit cone slice must be refuted.
PatternCrossCheck cross_validate_pattern_cone(const Eigen::MatrixXd& p, int covectors,
                                              const RefuteSchedule& schedule,
                                              double margin = 0.1);

// ---------------------------------------------------------------------------
// Identity checks.

struct SetFixture {
  std::string name;
  Point base;
  SetSampler sampler;
  /// Exact dist(.; Omega).
  ScalarFunction distance;
  /// Analytic Frechet normal cone at base.
  FiniteCone normal_cone;
};

struct DistSubdiffSummary {
  int inside_tested = 0;
  int inside_refuted = 0;
  int outside_tested = 0;
  int outside_refuted = 0;
  /// First offending covector, if any.
  std::optional<Eigen::MatrixXd> inside_counterexample;
  std::optional<Eigen::MatrixXd> outside_miss;

  bool passed() const { return inside_refuted == 0 && outside_refuted == outside_tested; }
};

/// Two-sided sampled test of subdiff dist(.;Omega)(p) = N_Omega(p) cap B:
/// elements of the analytic cone slice are never refuted, covectors at
/// distance >= margin from the slice always are.
DistSubdiffSummary check_dist_subdiff_identity(const SetFixture& fixture, int samples,
                                               const RefuteSchedule& schedule,
                                               double margin = 0.1);

struct DirectionResidual {
  Eigen::MatrixXd direction;
  double derivative = 0.0;      // contingent derivative of dist(.;Omega)
  double cone_distance = 0.0;   // dist(v; T_Omega(p))
  double residual = 0.0;
};

struct DirDerivReport {
  std::vector<DirectionResidual> rows;
  double max_residual = 0.0;
  bool passed(double tol) const { return max_residual <= tol; }
};

/// Compares the contingent derivative of the distance function with the
/// distance to the contingent cone, direction by direction.
DirDerivReport check_dirderiv_identity(const SetFixture& fixture,
                                       const std::vector<Eigen::MatrixXd>& directions,
                                       const ContingentSchedule& schedule);

// Fixtures used by the verification suites and the CLI.

/// Omega = {y <= 0} in R^2, base point 0.
SetFixture half_plane_fixture();
/// Omega = x-axis in R^2, base point 0.
SetFixture line_fixture();
/// Omega = R^2, base point (0.3, -0.2).
SetFixture full_space_fixture();
/// Omega = quarter arc {(cos a, sin a): a in [0, pi/2]} = St+(2,1) on the
/// unit circle, base point (1, 0).
SetFixture stiefel_plus_arc_fixture();
/// Omega = parabola {(t, t^2)} in R^2, base point 0.
SetFixture parabola_fixture();

}  // namespace rwsm
