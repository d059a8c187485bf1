#pragma once

// Weak sharp minima: sampled checks of
//     f(u) >= f(p) + alpha * dist(u; Omega)   for u in S (near p),
// modulus estimation, and the primal / dual necessary conditions
//     f^-(p; v) >= alpha * dist(v; T_Omega(p))          (primal)
//     alpha B cap N_Omega(p)  subset  subdiff f(p)      (dual)
// plus the difference-problem condition subdiff f2(p) in grad f1(p) + N_S(p).
//
// All checkers are refutation oriented: they can certify that a necessary
// condition fails, never that a set is a weak sharp minimum.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rwsm/cones.hpp"
#include "rwsm/manifold.hpp"

namespace rwsm {

struct DistanceBracket {
  double lower = 0.0;
  double upper = 0.0;
};

using BracketOracle = std::function<DistanceBracket(const Point&)>;
/// Draws `count` points of the feasible set S.
using FeasibleSampler = std::function<std::vector<Point>(int count, Rng& rng)>;

struct WsmInstance {
  ScalarFunction objective;
  FeasibleSampler feasible;
  /// Points of Omega used to confirm that f(p) is the minimal value.
  std::vector<Point> solution_samples;
  BracketOracle bracket;
  Point reference;
  double modulus = 1.0;
  /// Local radius; infinity for the global notion.
  double radius = std::numeric_limits<double>::infinity();
  /// Slack on every inequality.
  double tolerance = 1e-9;
};

enum class WsmStatus { kPassStrong, kPassWeak, kViolated };

std::string to_string(WsmStatus s);

struct WsmWitness {
  Eigen::MatrixXd point;
  double value = 0.0;
  DistanceBracket bracket;
};

struct WsmVerdict {
  WsmStatus status = WsmStatus::kPassStrong;
  std::optional<WsmWitness> witness;
  /// inf over samples with upper > 0 of (f(u) - f(p)) / upper.
  double estimated_modulus = std::numeric_limits<double>::infinity();
  int samples_used = 0;
};

WsmVerdict verify_wsm_sampled(const WsmInstance& inst, int n_samples, std::uint64_t seed);

/// inf over samples of (f(u) - f_min) / upper(u). Samples inside Omega
/// (upper = 0) are skipped; throws when every sample is inside.
double estimate_modulus(const ScalarFunction& f, double f_min, const FeasibleSampler& feasible,
                        const BracketOracle& bracket, int n_samples, std::uint64_t seed);

struct PrimalNcRow {
  Eigen::MatrixXd direction;
  double derivative = 0.0;     // f^-(p; v)
  double cone_distance = 0.0;  // dist(v; T_Omega(p))
};

struct PrimalNcVerdict {
  bool holds = true;
  std::vector<PrimalNcRow> rows;
  std::optional<std::size_t> witness;  // index into rows
};

PrimalNcVerdict check_primal_nc(const ScalarFunction& f, const SetSampler& omega, const Point& p,
                                double alpha, const std::vector<Eigen::MatrixXd>& directions,
                                const ContingentSchedule& schedule, double tol = 1e-2);

struct DualNcVerdict {
  bool consistent = true;
  int tested = 0;
  std::optional<Eigen::MatrixXd> witness;
  std::optional<RefutationVerdict> refutation;
};

/// Samples x in alpha B cap N_Omega(p) (extreme elements first, then random
/// members) and refutes x in subdiff f(p).
DualNcVerdict check_dual_nc(const ScalarFunction& f, const FiniteCone& normal_cone,
                            double alpha, int n_cone_samples, const RefuteSchedule& schedule);

struct SmoothFunction {
  ScalarFunction value;
  /// Euclidean (ambient) gradient; projected to the tangent space internally.
  std::function<Eigen::MatrixXd(const Point&)> gradient;
};

struct DifferenceNcVerdict {
  bool holds = true;
  std::vector<double> residuals;  // distance of x - grad f1(p) to N_S(p)
  std::optional<Eigen::MatrixXd> witness;
};

/// For each candidate x in subdiff f2(p), checks x - grad f1(p) in N_S(p).
/// A failure shows p is not a local solution of min_S f1 - f2.
DifferenceNcVerdict check_difference_nc(const SmoothFunction& f1,
                                        const std::vector<Eigen::MatrixXd>& f2_subgradients,
                                        const FiniteCone& normal_cone_s, double tol = 1e-8);

}  // namespace rwsm
