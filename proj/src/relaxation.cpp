#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "rwsm/cheeger.hpp"
#include "rwsm/errors.hpp"

namespace rwsm {

double estimate_penalty_constant(int n, int k) {
  if (k < 1 || n < k) throw ShapeError("need 1 <= k <= n");
  const Manifold m = Manifold::stiefel(n, k);
  Rng rng = substream(0x5EED, static_cast<std::uint64_t>(n) * 1000 + k);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 200; ++i) {
    Eigen::MatrixXd u;
    if (i % 2 == 0) {
      u = random_point(m, rng).coords();
    } else {
      const Point p(m, random_stiefel_plus(n, k, rng));
      const double s = std::pow(10.0, -3.0 * uniform01(rng));
      u = retract(p, Tangent(p, s * random_unit_tangent(p, rng).vec())).coords();
    }
    const double h = penalty_h(u, 1.0);
    if (!(h > 1e-12)) continue;
    const auto est = dist_upper_estimate(u);
    if (!est) continue;
    num += est->upper * h;
    den += h * h;
  }
  return den > 0.0 ? num / den : 1.0;
}

namespace {

struct RestartResult {
  double best_objective = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_iterate;
  SubPartition rounded;
  double rounded_value = std::numeric_limits<double>::infinity();
  double max_residual = 0.0;
  std::vector<TraceRow> trace;
};

RestartResult run_restart(const Graph& g, int k, const SolverConfig& cfg, double c, double step0,
                          int restart) {
  const Manifold m = Manifold::stiefel(g.n(), k);
  Rng rng = substream(cfg.seed, static_cast<std::uint64_t>(restart));
  Point u = random_point(m, rng);
  RestartResult r;

  auto consider_rounding = [&](const Eigen::MatrixXd& x) {
    const SubPartition parts = complete_subpartition(g, round_solution(g, x), k);
    const double value = cheeger_objective(g, parts);
    if (value < r.rounded_value - 1e-12) {
      r.rounded_value = value;
      r.rounded = parts;
    }
  };

  for (int t = 1;; ++t) {
    const Eigen::MatrixXd& x = u.coords();
    const double h = penalty_h(x, cfg.beta);
    const double f = grad_norm_l1(g, x) + c * h;
    const double residual = orthonormality_residual(x);
    if (!std::isfinite(f)) throw NumericalError("non-finite objective at iteration " + std::to_string(t));
    if (residual > kFeasibilityTol)
      throw NumericalError("iterate left St(n,k): residual " + std::to_string(residual));
    r.max_residual = std::max(r.max_residual, residual);
    r.trace.push_back(TraceRow{t - 1, f, h, residual});
    if (f < r.best_objective) {
      r.best_objective = f;
      r.best_iterate = x;
    }
    if (cfg.round_policy == RoundPolicy::kTrajectory && (t - 1) % cfg.round_interval == 0)
      consider_rounding(x);
    if (t > cfg.max_iters) break;
    const Tangent sub = riemannian_subgradient(g, u, cfg.beta, c);
    if (!(sub.norm() > 0.0)) break;
    const double gamma =
        cfg.schedule == StepSchedule::kInvSqrt ? step0 / std::sqrt(static_cast<double>(t)) : step0 / t;
    u = retract(u, Tangent(u, -gamma * sub.vec()));
  }
  consider_rounding(r.best_iterate);
  return r;
}

}  // namespace

ClusterReport solve_relaxation(const Graph& g, int k, const SolverConfig& cfg) {
  if (k < 1 || k > g.n()) throw std::invalid_argument("need 1 <= k <= n");
  if (cfg.beta != 1.0)
    throw DomainError("the solver descends only the beta = 1 penalty; other exponents are evaluated, not optimized");
  if (cfg.restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (cfg.max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");
  if (cfg.round_interval < 1) throw std::invalid_argument("round_interval must be positive");

  ClusterReport report;
  report.k = k;
  report.beta = cfg.beta;
  report.seed = cfg.seed;
  report.lipschitz = lipschitz_bound(g, k);
  const double l_eff = report.lipschitz > 0.0 ? report.lipschitz : 1.0;
  if (cfg.penalty_c > 0.0) {
    report.penalty_c = cfg.penalty_c;
  } else {
    report.c_hat = estimate_penalty_constant(g.n(), k);
    report.penalty_c = 2.0 * l_eff * report.c_hat;
  }
  const double step0 = cfg.step0 > 0.0 ? cfg.step0 : 1.0 / l_eff;

  std::vector<RestartResult> results(cfg.restarts);
  std::vector<std::exception_ptr> errors(cfg.restarts);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r; (r = next.fetch_add(1)) < cfg.restarts;) {
      try {
        results[r] = run_restart(g, k, cfg, report.penalty_c, step0, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, cfg.restarts);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  // Minimum by (rounded value, penalized value, restart index).
  int best = 0;
  for (int r = 1; r < cfg.restarts; ++r) {
    const RestartResult& a = results[r];
    const RestartResult& b = results[best];
    if (a.rounded_value < b.rounded_value - 1e-12 ||
        (std::abs(a.rounded_value - b.rounded_value) <= 1e-12 && a.best_objective < b.best_objective))
      best = r;
  }
  for (const auto& r : results)
    report.max_feasibility_residual = std::max(report.max_feasibility_residual, r.max_residual);
  RestartResult& w = results[best];
  report.best_restart = best;
  report.best_iterate = w.best_iterate;
  report.best_continuous_value = grad_norm_l1(g, w.best_iterate);
  report.best_penalty_value = w.best_objective;
  report.rounded = w.rounded.canonical();
  report.rounded_value = w.rounded_value;
  report.trace = std::move(w.trace);
  return report;
}

}  // namespace rwsm
