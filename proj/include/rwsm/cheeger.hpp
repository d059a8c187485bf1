#pragma once

// Continuous relaxation of the Cheeger-type constant on St(n,k):
//     min over U in St+(n,k) of sum_i sum_{ab in E} |U_ai - U_bi|
// treated with the exact penalty C * ||U^-||_beta^beta, a Riemannian
// subgradient solver, rounding back to k-subpartitions, and the study of
// which penalty exponents give a weak sharp minimum.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rwsm/cones.hpp"
#include "rwsm/graph.hpp"
#include "rwsm/manifold.hpp"
#include "rwsm/sharp_minima.hpp"

namespace rwsm {

/// Sum over columns and edges of |U_ai - U_bi|.
double grad_norm_l1(const Graph& g, const Eigen::MatrixXd& u);

/// sum_ij max(-u_ij, 0)^beta.
double penalty_h(const Eigen::MatrixXd& u, double beta);

/// ||U^-||_F.
double negative_part_norm(const Eigen::MatrixXd& u);

/// sqrt(k * sum_v deg(v)^2): Lipschitz rate of grad_norm_l1 in the
/// Frobenius norm.
double lipschitz_bound(const Graph& g, int k);

/// Columns 1_{A_i} / sqrt(|A_i|).
Eigen::MatrixXd indicator_matrix(int n, const SubPartition& parts);

struct DistanceEstimate {
  double upper = 0.0;  // ||U - V||_F
  double lower = 0.0;  // ||U^-||_F
  Eigen::MatrixXd feasible;  // V in St+(n,k)
};

/// Upper estimate of the distance from U to St+(n,k) together with the
/// feasible point attaining it. Tries alternating clamp / polar projection
/// and a disjoint-support construction and keeps the closer one. Returns
/// nullopt when neither produces a feasible point.
std::optional<DistanceEstimate> dist_upper_estimate(const Eigen::MatrixXd& u);

double penalized_objective(const Graph& g, const Eigen::MatrixXd& u, double beta, double c);

/// Euclidean subgradient of the penalized objective (sign 0 on ties and at
/// zero entries) projected onto T_U St(n,k). Throws DomainError for
/// beta < 1, where the penalty has no bounded subgradient.
Tangent riemannian_subgradient(const Graph& g, const Point& u, double beta, double c);

/// Argmax-column pools, then a threshold sweep per column minimizing
/// |boundary(A)| / sqrt(|A|) (ties to the larger set). Empty parts are
/// dropped; throws NumericalError when nothing survives.
SubPartition round_solution(const Graph& g, const Eigen::MatrixXd& u);

/// Grows `parts` to exactly k parts: first with the cheapest unused
/// singleton, then by splitting a vertex off the part where that costs
/// least. The result is always a member of D_k(G).
SubPartition complete_subpartition(const Graph& g, SubPartition parts, int k);

// ---------------------------------------------------------------------------
// Solver.

enum class StepSchedule { kInvSqrt, kInv };

enum class RoundPolicy {
  /// Round only the best penalized iterate of each restart.
  kBestIterate,
  /// Also round every `round_interval`-th iterate and keep the best rounding.
  kTrajectory,
};

struct SolverConfig {
  double beta = 1.0;
  /// Penalty weight; <= 0 selects 2 * L * c_hat.
  double penalty_c = 0.0;
  /// Initial step; <= 0 selects 1 / L.
  double step0 = 0.0;
  StepSchedule schedule = StepSchedule::kInvSqrt;
  int max_iters = 1000;
  int restarts = 20;
  std::uint64_t seed = 0;
  RoundPolicy round_policy = RoundPolicy::kTrajectory;
  int round_interval = 10;
  /// Number of worker threads; 0 uses the hardware concurrency.
  int threads = 0;
};

struct TraceRow {
  int iter = 0;
  double objective = 0.0;
  double penalty = 0.0;
  double feasibility_residual = 0.0;
};

struct ClusterReport {
  int k = 0;
  double beta = 1.0;
  double penalty_c = 0.0;
  double c_hat = 0.0;
  double lipschitz = 0.0;
  std::uint64_t seed = 0;
  /// grad_norm_l1 at the best penalized iterate.
  double best_continuous_value = 0.0;
  double best_penalty_value = 0.0;
  Eigen::MatrixXd best_iterate;
  SubPartition rounded;
  double rounded_value = 0.0;
  std::optional<double> oracle_value;
  std::optional<double> gap;
  int best_restart = 0;
  /// Largest ||U^T U - I||_F over every iterate of every restart.
  double max_feasibility_residual = 0.0;
  /// Iterates of the winning restart.
  std::vector<TraceRow> trace;
};

/// Slope through the origin of the regression of dist_upper_estimate(U)
/// against ||U^-||_1 over seeded samples of St(n,k) (random points and
/// points close to St+). Deterministic in (n, k).
double estimate_penalty_constant(int n, int k);

/// Multi-restart Riemannian subgradient descent on the penalized objective,
/// followed by rounding. Only beta = 1 is accepted. Reports the best found
/// solution; global optimality is never claimed.
ClusterReport solve_relaxation(const Graph& g, int k, const SolverConfig& cfg);

// ---------------------------------------------------------------------------
// Penalty exponent study.

struct PenaltyStudyConfig {
  int n = 2;
  int k = 1;
  double beta = 1.0;
  int n_samples = 2000;
  std::uint64_t seed = 0;
  /// Modulus used by the sampled weak-sharp-minimum check.
  double wsm_alpha = 0.5;
  /// Modulus used by the necessary-condition checks.
  double nc_alpha = 1.0;
  /// Seeded points of St+ tested besides [e_1 .. e_k].
  int extra_points = 2;
  int cone_samples = 16;
};

struct ModulusBand {
  double upper_limit = 0.0;  // samples with upper bracket in (upper_limit/10, upper_limit]
  int samples = 0;
  double estimate = 0.0;     // inf of h / upper over the band
};

struct DualNcAtPoint {
  Eigen::MatrixXd point;
  DualNcVerdict verdict;
};

struct PenaltyStudy {
  PenaltyStudyConfig config;
  WsmVerdict wsm;
  std::vector<DualNcAtPoint> dual;
  PrimalNcVerdict primal;  // at [e_1 .. e_k]
  double modulus_estimate = 0.0;
  std::vector<ModulusBand> modulus_trace;

  bool dual_consistent() const;
  /// No violated inequality and no refuted condition.
  bool passed() const;
};

/// [e_1 .. e_k].
Eigen::MatrixXd coordinate_frame(int n, int k);

PenaltyStudy wsm_penalty_check(const PenaltyStudyConfig& cfg);

}  // namespace rwsm
