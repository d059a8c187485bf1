#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rwsm/cheeger.hpp"
#include "rwsm/errors.hpp"

namespace rwsm {

Eigen::MatrixXd coordinate_frame(int n, int k) {
  if (k < 1 || n < k) throw ShapeError("need 1 <= k <= n");
  return Eigen::MatrixXd::Identity(n, k);
}

bool PenaltyStudy::dual_consistent() const {
  return std::all_of(dual.begin(), dual.end(), [](const auto& d) { return d.verdict.consistent; });
}

bool PenaltyStudy::passed() const {
  return wsm.status != WsmStatus::kViolated && dual_consistent() && primal.holds;
}

namespace {

// Feasible samples of St(n,k). St(2,1) uses a full circle grid plus angles
// approaching the ends of the nonnegative arc from outside; larger cases mix
// random points with retractions of St+ points along random directions.
FeasibleSampler study_sampler(int n, int k) {
  const Manifold m = Manifold::stiefel(n, k);
  return [m, n, k](int count, Rng& rng) {
    std::vector<Point> out;
    if (n == 2 && k == 1) {
      const int grid = count - count / 2;
      for (int i = 0; i < grid; ++i) {
        const double a = 2.0 * std::numbers::pi * (i + 0.5) / grid;
        out.emplace_back(m, Eigen::Vector2d(std::cos(a), std::sin(a)));
      }
      const int near = count - grid;
      for (int i = 0; i < near; ++i) {
        const double eps = std::pow(10.0, -6.0 * (i / 2 + 0.5) / std::max(1, near / 2));
        const double a = i % 2 == 0 ? -eps : std::numbers::pi / 2 + eps;
        out.emplace_back(m, Eigen::Vector2d(std::cos(a), std::sin(a)));
      }
      return out;
    }
    for (int i = 0; i < count; ++i) {
      if (i % 2 == 0) {
        out.push_back(random_point(m, rng));
      } else {
        const Point p(m, random_stiefel_plus(n, k, rng));
        const double s = std::pow(10.0, -6.0 * uniform01(rng));
        out.push_back(retract(p, Tangent(p, s * random_unit_tangent(p, rng).vec())));
      }
    }
    return out;
  };
}

}  // namespace

PenaltyStudy wsm_penalty_check(const PenaltyStudyConfig& cfg) {
  if (cfg.k < 1 || cfg.n < cfg.k) throw ShapeError("need 1 <= k <= n");
  if (!(cfg.beta > 0.0)) throw DomainError("penalty exponent must be positive");
  if (cfg.n_samples < 1) throw ShapeError("need at least one sample");
  const Manifold m = Manifold::stiefel(cfg.n, cfg.k);
  const Point p0(m, coordinate_frame(cfg.n, cfg.k));
  const double beta = cfg.beta;
  const ScalarFunction h = [beta](const Point& u) { return penalty_h(u.coords(), beta); };

  PenaltyStudy study;
  study.config = cfg;

  // (a) sampled weak sharp minimum of h_beta against the distance bracket.
  WsmInstance inst{h, study_sampler(cfg.n, cfg.k), {p0},
                   [p0](const Point& u) {
                     const auto est = dist_upper_estimate(u.coords());
                     if (est) return DistanceBracket{est->lower, est->upper};
                     return DistanceBracket{negative_part_norm(u.coords()),
                                            (u.coords() - p0.coords()).norm()};
                   },
                   p0, cfg.wsm_alpha};
  study.wsm = verify_wsm_sampled(inst, cfg.n_samples, cfg.seed);
  study.modulus_estimate = study.wsm.estimated_modulus;

  // Modulus by distance band.
  {
    Rng rng = substream(cfg.seed, 0);
    const std::vector<Point> samples = inst.feasible(cfg.n_samples, rng);
    const double top = 2.0 * std::sqrt(static_cast<double>(cfg.k));
    std::vector<double> limits{top, 1e-1, 1e-2, 1e-3, 1e-4};
    study.modulus_trace.resize(limits.size());
    for (std::size_t b = 0; b < limits.size(); ++b) {
      study.modulus_trace[b].upper_limit = limits[b];
      study.modulus_trace[b].estimate = std::numeric_limits<double>::infinity();
    }
    for (const Point& u : samples) {
      const DistanceBracket br = inst.bracket(u);
      if (!(br.upper > 0.0)) continue;
      for (std::size_t b = 0; b < limits.size(); ++b) {
        const double lo = b + 1 < limits.size() ? limits[b + 1] : 0.0;
        if (br.upper > lo && (br.upper <= limits[b] || b == 0)) {
          auto& band = study.modulus_trace[b];
          ++band.samples;
          band.estimate = std::min(band.estimate, h(u) / br.upper);
          break;
        }
      }
    }
    study.modulus_trace.erase(std::remove_if(study.modulus_trace.begin(), study.modulus_trace.end(),
                                             [](const ModulusBand& b) { return b.samples == 0; }),
                              study.modulus_trace.end());
  }

  // (b) dual condition alpha B cap N(P) in subdiff h(P) at seeded points.
  std::vector<Eigen::MatrixXd> points{p0.coords()};
  Rng prng = substream(cfg.seed, 0xB0);
  for (int i = 0; i < cfg.extra_points; ++i) points.push_back(random_stiefel_plus(cfg.n, cfg.k, prng, 0.5));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const FiniteCone cone = stiefel_plus_normal_cone(points[i]).to_finite_cone(m);
    RefuteSchedule schedule = RefuteSchedule::standard();
    schedule.seed = cfg.seed + i;
    study.dual.push_back(
        DualNcAtPoint{points[i], check_dual_nc(h, cone, cfg.nc_alpha, cfg.cone_samples, schedule)});
  }

  // (c) primal condition h^-(P; v) >= alpha dist(v; T(P)) at [e_1 .. e_k],
  // along the directions leaving St+ through each zero row, then a basis.
  std::vector<Eigen::MatrixXd> directions;
  for (int r = cfg.k; r < cfg.n; ++r)
    for (int j = 0; j < cfg.k; ++j) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(cfg.n, cfg.k);
      e(r, j) = -1.0;
      directions.push_back(std::move(e));
    }
  for (const auto& b : tangent_basis(p0)) directions.push_back(b);
  ContingentSchedule cs = ContingentSchedule::standard();
  cs.seed = cfg.seed;
  study.primal = check_primal_nc(h, stiefel_plus_sampler(p0), p0, cfg.nc_alpha, directions, cs);
  return study;
}

}  // namespace rwsm
