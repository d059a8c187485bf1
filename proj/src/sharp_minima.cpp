#include "rwsm/sharp_minima.hpp"

#include <algorithm>
#include <cmath>

#include "rwsm/errors.hpp"

namespace rwsm {

std::string to_string(WsmStatus s) {
  switch (s) {
    case WsmStatus::kPassStrong: return "pass_strong";
    case WsmStatus::kPassWeak: return "pass_weak";
    case WsmStatus::kViolated: return "violated";
  }
  return "unknown";
}

WsmVerdict verify_wsm_sampled(const WsmInstance& inst, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw ShapeError("need at least one sample");
  if (!(inst.modulus > 0.0)) throw ShapeError("modulus must be positive");
  const double fp = inst.objective(inst.reference);
  if (!std::isfinite(fp)) throw DomainError("objective is not finite at the reference point");
  for (const Point& w : inst.solution_samples) {
    if (inst.objective(w) < fp - inst.tolerance)
      throw DomainError("reference value is not minimal over the solution samples");
  }

  Rng rng = substream(seed, 0);
  const std::vector<Point> samples = inst.feasible(n_samples, rng);
  WsmVerdict verdict;
  double worst_strong = 0.0;  // most negative slack against alpha * upper
  double worst_weak = 0.0;
  for (const Point& u : samples) {
    if (chart_distance(inst.reference, u) > inst.radius) continue;
    const double fu = inst.objective(u);
    if (!std::isfinite(fu)) throw DomainError("objective is not finite at a feasible sample");
    const DistanceBracket b = inst.bracket(u);
    if (b.lower > b.upper) throw DomainError("distance bracket with lower > upper");
    ++verdict.samples_used;
    const double gain = fu - fp;
    if (b.upper > 0.0) verdict.estimated_modulus = std::min(verdict.estimated_modulus, gain / b.upper);
    const double strong = gain - inst.modulus * b.upper;
    const double weak = gain - inst.modulus * b.lower;
    worst_strong = std::min(worst_strong, strong);
    if (weak < worst_weak) {
      worst_weak = weak;
      if (weak < -inst.tolerance) verdict.witness = WsmWitness{u.coords(), fu, b};
    }
  }
  if (worst_weak < -inst.tolerance) {
    verdict.status = WsmStatus::kViolated;
  } else if (worst_strong < -inst.tolerance) {
    verdict.status = WsmStatus::kPassWeak;
  } else {
    verdict.status = WsmStatus::kPassStrong;
  }
  return verdict;
}

double estimate_modulus(const ScalarFunction& f, double f_min, const FeasibleSampler& feasible,
                        const BracketOracle& bracket, int n_samples, std::uint64_t seed) {
  Rng rng = substream(seed, 0);
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const Point& u : feasible(n_samples, rng)) {
    const DistanceBracket b = bracket(u);
    if (!(b.upper > 0.0)) continue;
    any = true;
    best = std::min(best, (f(u) - f_min) / b.upper);
  }
  if (!any) throw DomainError("every sample lies inside the solution set");
  return best;
}

PrimalNcVerdict check_primal_nc(const ScalarFunction& f, const SetSampler& omega, const Point& p,
                                double alpha, const std::vector<Eigen::MatrixXd>& directions,
                                const ContingentSchedule& schedule, double tol) {
  PrimalNcVerdict verdict;
  for (const auto& dir : directions) {
    const Tangent v(p, dir);
    PrimalNcRow row;
    row.direction = dir;
    row.derivative = contingent_derivative(f, p, v, schedule);
    row.cone_distance = contingent_cone_distance(omega, p, v, schedule);
    const bool ok = row.derivative >= alpha * row.cone_distance - tol;
    verdict.rows.push_back(std::move(row));
    if (!ok && verdict.holds) {
      verdict.holds = false;
      verdict.witness = verdict.rows.size() - 1;
    }
  }
  return verdict;
}

DualNcVerdict check_dual_nc(const ScalarFunction& f, const FiniteCone& normal_cone,
                            double alpha, int n_cone_samples, const RefuteSchedule& schedule) {
  if (!(alpha > 0.0)) throw ShapeError("alpha must be positive");
  const Point& p = normal_cone.base();
  std::vector<Eigen::MatrixXd> candidates = normal_cone.extreme_elements(alpha);
  if (candidates.empty() && n_cone_samples > 0 && normal_cone.dimension() == 0)
    candidates.push_back(Eigen::MatrixXd::Zero(p.coords().rows(), p.coords().cols()));
  Rng rng = substream(schedule.seed, 0xD0A1);
  while (static_cast<int>(candidates.size()) < n_cone_samples)
    candidates.push_back(normal_cone.sample_member(rng, alpha));

  DualNcVerdict verdict;
  for (const auto& x : candidates) {
    ++verdict.tested;
    RefutationVerdict r = frechet_subdiff_refute(f, p, Tangent(p, x), schedule);
    if (r.refuted()) {
      verdict.consistent = false;
      verdict.witness = x;
      verdict.refutation = std::move(r);
      break;
    }
  }
  return verdict;
}

DifferenceNcVerdict check_difference_nc(const SmoothFunction& f1,
                                        const std::vector<Eigen::MatrixXd>& f2_subgradients,
                                        const FiniteCone& normal_cone_s, double tol) {
  if (!f1.gradient) throw ShapeError("f1 gradient unavailable");
  const Point& p = normal_cone_s.base();
  const Eigen::MatrixXd grad = tangent_project(p, f1.gradient(p)).vec();
  DifferenceNcVerdict verdict;
  for (const auto& x : f2_subgradients) {
    const double r = normal_cone_s.distance(x - grad);
    verdict.residuals.push_back(r);
    if (r > tol * std::max(1.0, x.norm() + grad.norm()) && verdict.holds) {
      verdict.holds = false;
      verdict.witness = x;
    }
  }
  return verdict;
}

}  // namespace rwsm
