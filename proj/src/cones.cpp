#include "rwsm/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rwsm/errors.hpp"

namespace rwsm {

RefuteSchedule RefuteSchedule::geometric(double first, double ratio, double floor) {
  if (!(first > 0.0) || !(ratio > 0.0 && ratio < 1.0) || !(floor > 0.0) || floor > first)
    throw ShapeError("invalid geometric schedule");
  RefuteSchedule s;
  for (double t = first; t >= floor * (1.0 - 1e-9); t *= ratio) s.scales.push_back(t);
  return s;
}

RefuteSchedule RefuteSchedule::standard() { return geometric(1e-2, 0.1, 1e-6); }

ContingentSchedule ContingentSchedule::standard() {
  ContingentSchedule s;
  for (double t = 1e-1; t >= 1e-4 * (1.0 - 1e-9); t *= 0.5) s.scales.push_back(t);
  if (s.scales.back() > 1e-4) s.scales.push_back(1e-4);
  return s;
}

namespace {

void validate_schedule(const std::vector<double>& scales) {
  if (scales.empty()) throw ShapeError("empty schedule");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0)) throw ShapeError("schedule scales must be positive");
    if (i > 0 && !(scales[i] < scales[i - 1]))
      throw ShapeError("schedule scales must be strictly decreasing");
  }
}

bool finest_scales_violate(const std::vector<bool>& violated, int consecutive) {
  const int count = static_cast<int>(violated.size());
  const int need = std::clamp(consecutive, 1, count);
  for (int i = count - need; i < count; ++i)
    if (!violated[i]) return false;
  return true;
}

void require_same_base(const Point& p, const Tangent& x) {
  if (!(p.manifold() == x.base().manifold()) ||
      (p.coords() - x.base().coords()).norm() > 1e-12 * (1.0 + p.coords().norm()))
    throw DomainError("covector is not based at the test point");
}

// Unit test directions at p: +/- an orthonormal tangent basis, then random.
std::vector<Eigen::MatrixXd> probe_directions(const Point& p, int random_count, Rng& rng) {
  std::vector<Eigen::MatrixXd> dirs;
  for (const Eigen::MatrixXd& b : tangent_basis(p)) {
    dirs.push_back(b);
    dirs.push_back(-b);
  }
  for (int i = 0; i < random_count; ++i) dirs.push_back(random_unit_tangent(p, rng).vec());
  return dirs;
}

}  // namespace

RefutationVerdict frechet_normal_refute(const SetSampler& omega, const Point& p, const Tangent& x,
                                        const RefuteSchedule& schedule) {
  validate_schedule(schedule.scales);
  require_same_base(p, x);
  RefutationVerdict verdict;
  std::vector<bool> violated;
  std::optional<RefutationWitness> last_violation;
  for (std::size_t j = 0; j < schedule.scales.size(); ++j) {
    const double t = schedule.scales[j];
    Rng rng = substream(schedule.seed, j);
    const std::vector<Point> samples = omega(t, rng);
    double sup = -std::numeric_limits<double>::infinity();
    RefutationWitness best;
    for (const Point& u : samples) {
      const double d = chart_distance(p, u);
      if (!(d > 0.0)) continue;
      const Eigen::MatrixXd w = chart_coordinates(p, u);
      const double q = inner(x.vec(), w) / d;
      if (q > sup) {
        sup = q;
        best = RefutationWitness{u.coords(), w, q, t};
      }
    }
    if (samples.empty()) throw ShapeError("set sampler produced no points at a scale");
    // Every sample equal to p: p is isolated in Omega at this scale.
    if (!std::isfinite(sup)) sup = 0.0;
    verdict.quotient_trace.push_back(sup);
    violated.push_back(sup > schedule.tolerance);
    if (sup > schedule.tolerance) last_violation = best;
  }
  if (finest_scales_violate(violated, schedule.consecutive)) {
    verdict.status = RefutationStatus::kRefuted;
    verdict.witness = last_violation;
  }
  return verdict;
}

RefutationVerdict frechet_subdiff_refute(const ScalarFunction& f, const Point& p, const Tangent& x,
                                         const RefuteSchedule& schedule) {
  validate_schedule(schedule.scales);
  require_same_base(p, x);
  const double fp = f(p);
  if (!std::isfinite(fp)) throw DomainError("function is not finite at the base point");

  RefutationVerdict verdict;
  std::vector<bool> violated;
  std::optional<RefutationWitness> last_violation;
  for (std::size_t j = 0; j < schedule.scales.size(); ++j) {
    const double t = schedule.scales[j];
    Rng rng = substream(schedule.seed, j);
    double inf = std::numeric_limits<double>::infinity();
    RefutationWitness best;
    for (const Eigen::MatrixXd& dir : probe_directions(p, schedule.samples_per_scale, rng)) {
      const Point u = chart_step(p, Tangent(p, t * dir));
      const double fu = f(u);
      if (!std::isfinite(fu)) continue;
      const double d = chart_distance(p, u);
      if (!(d > 0.0)) continue;
      const Eigen::MatrixXd w = chart_coordinates(p, u);
      const double q = (fu - fp - inner(x.vec(), w)) / d;
      if (q < inf) {
        inf = q;
        best = RefutationWitness{u.coords(), w, q, t};
      }
    }
    if (!std::isfinite(inf)) throw NumericalError("function was non-finite at every sample of a scale");
    verdict.quotient_trace.push_back(inf);
    violated.push_back(inf < -schedule.tolerance);
    if (inf < -schedule.tolerance) last_violation = best;
  }
  if (finest_scales_violate(violated, schedule.consecutive)) {
    verdict.status = RefutationStatus::kRefuted;
    verdict.witness = last_violation;
  }
  return verdict;
}

double contingent_derivative(const ScalarFunction& f, const Point& p, const Tangent& v,
                             const ContingentSchedule& schedule) {
  validate_schedule(schedule.scales);
  require_same_base(p, v);
  const double fp = f(p);
  if (!std::isfinite(fp)) throw DomainError("function is not finite at the base point");
  const int count = static_cast<int>(schedule.scales.size());
  const int tail = std::clamp(schedule.tail_scales, 1, count);
  const int dim = p.manifold().intrinsic_dim();
  double estimate = std::numeric_limits<double>::infinity();
  for (int j = count - tail; j < count; ++j) {
    const double t = schedule.scales[j];
    Rng rng = substream(schedule.seed, static_cast<std::uint64_t>(j));
    std::vector<Eigen::MatrixXd> ws{v.vec()};
    for (int i = 0; i < schedule.perturbation_samples; ++i) {
      const double radius = schedule.perturbation * t * std::pow(uniform01(rng), 1.0 / dim);
      ws.push_back(v.vec() + radius * random_unit_tangent(p, rng).vec());
    }
    for (const Eigen::MatrixXd& w : ws) {
      const double fu = f(chart_step(p, Tangent(p, t * w)));
      if (std::isnan(fu)) continue;
      estimate = std::min(estimate, (fu - fp) / t);
    }
  }
  return estimate;
}

double contingent_cone_distance(const SetSampler& omega, const Point& p, const Tangent& v,
                                const ContingentSchedule& schedule) {
  validate_schedule(schedule.scales);
  require_same_base(p, v);
  const double vn = v.norm();
  const int count = static_cast<int>(schedule.scales.size());
  const int tail = std::clamp(schedule.tail_scales, 1, count);
  double best = vn;
  for (int j = count - tail; j < count; ++j) {
    Rng rng = substream(schedule.seed, static_cast<std::uint64_t>(j));
    const std::vector<Point> samples = omega(schedule.scales[j], rng);
    for (const Point& u : samples) {
      const Eigen::MatrixXd w = chart_coordinates(p, u);
      const double wn = w.norm();
      if (!(wn > 0.0)) continue;
      const double along = inner(v.vec(), w) / wn;
      if (along > 0.0) best = std::min(best, std::sqrt(std::max(vn * vn - along * along, 0.0)));
    }
    if (j == count - 1 && samples.empty())
      throw ShapeError("set sampler produced no points at the finest scale");
  }
  return best;
}

// ---------------------------------------------------------------------------

FiniteCone::FiniteCone(Point base, std::vector<Eigen::MatrixXd> lines,
                       std::vector<Eigen::MatrixXd> rays)
    : base_(std::move(base)), lines_(std::move(lines)), rays_(std::move(rays)) {
  std::vector<const Eigen::MatrixXd*> all;
  for (const auto& l : lines_) all.push_back(&l);
  for (const auto& r : rays_) all.push_back(&r);
  for (std::size_t i = 0; i < all.size(); ++i) {
    Tangent check(base_, *all[i]);  // throws when not tangent
    for (std::size_t j = i; j < all.size(); ++j) {
      const double g = inner(*all[i], *all[j]);
      if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-8)
        throw ShapeError("cone generators must be orthonormal");
    }
  }
}

Eigen::MatrixXd FiniteCone::project(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  for (const auto& l : lines_) out += inner(x, l) * l;
  for (const auto& r : rays_) out += std::max(inner(x, r), 0.0) * r;
  return out;
}

double FiniteCone::distance(const Eigen::MatrixXd& x) const { return (x - project(x)).norm(); }

double FiniteCone::distance_to_slice(const Eigen::MatrixXd& x, double radius) const {
  Eigen::MatrixXd y = project(x);
  const double yn = y.norm();
  if (yn > radius) y *= radius / yn;
  return (x - y).norm();
}

bool FiniteCone::contains(const Eigen::MatrixXd& x, double tol) const {
  return distance(x) <= tol * std::max(1.0, x.norm());
}

Eigen::MatrixXd FiniteCone::sample_member(Rng& rng, double radius) const {
  const Eigen::MatrixXd& p = base_.coords();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p.rows(), p.cols());
  const int dim = dimension();
  if (dim == 0) return out;
  std::normal_distribution<double> normal;
  for (const auto& l : lines_) out += normal(rng) * l;
  for (const auto& r : rays_) out += std::abs(normal(rng)) * r;
  const double len = out.norm();
  if (!(len > 0.0)) return out;
  return (radius * std::pow(uniform01(rng), 1.0 / dim) / len) * out;
}

std::vector<Eigen::MatrixXd> FiniteCone::extreme_elements(double radius) const {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& l : lines_) {
    out.push_back(radius * l);
    out.push_back(-radius * l);
  }
  for (const auto& r : rays_) out.push_back(radius * r);
  return out;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd snap_small_entries(const Eigen::MatrixXd& p) {
  return p.unaryExpr([](double v) { return std::abs(v) <= kZeroEntryTol ? 0.0 : v; });
}

PatternCone stiefel_plus_normal_cone(const Eigen::MatrixXd& p_raw) {
  if (p_raw.cols() < 1 || p_raw.rows() < p_raw.cols()) throw ShapeError("P must be n x k with k <= n");
  if (p_raw.minCoeff() < -kZeroEntryTol) throw DomainError("P has a negative entry; not in St+(n,k)");
  if (orthonormality_residual(p_raw) > kFeasibilityTol)
    throw DomainError("P does not have orthonormal columns");
  PatternCone cone;
  cone.base = snap_small_entries(p_raw);
  cone.support_mask = (cone.base.array() > kZeroEntryTol);
  for (Eigen::Index i = 0; i < cone.base.rows(); ++i)
    if (!cone.support_mask.row(i).any()) cone.zero_rows.push_back(static_cast<int>(i));
  return cone;
}

FiniteCone PatternCone::to_finite_cone(const Manifold& m) const {
  const Eigen::Index n = base.rows(), k = base.cols();
  std::vector<bool> is_zero_row(n, false);
  for (int r : zero_rows) is_zero_row[r] = true;

  // Free entries of the linear part: nonzero rows, outside the support.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> free;
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (!is_zero_row[i] && !support_mask(i, j)) free.emplace_back(i, j);

  std::vector<Eigen::MatrixXd> lines;
  if (!free.empty()) {
    // Constraint rows: entries (a <= b) of P^T X + X^T P.
    const Eigen::Index ncons = k * (k + 1) / 2;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(std::max<Eigen::Index>(ncons, 1),
                                              static_cast<Eigen::Index>(free.size()));
    for (std::size_t f = 0; f < free.size(); ++f) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, k);
      e(free[f].first, free[f].second) = 1.0;
      const Eigen::MatrixXd c = base.transpose() * e + e.transpose() * base;
      Eigen::Index row = 0;
      for (Eigen::Index x = 0; x < k; ++x)
        for (Eigen::Index y = x; y < k; ++y) a(row++, static_cast<Eigen::Index>(f)) = c(x, y);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(free.size()); ++c) {
      const double s = c < sv.size() ? sv(c) : 0.0;
      if (s > cutoff) continue;
      Eigen::MatrixXd line = Eigen::MatrixXd::Zero(n, k);
      for (std::size_t f = 0; f < free.size(); ++f)
        line(free[f].first, free[f].second) = svd.matrixV()(static_cast<Eigen::Index>(f), c);
      lines.push_back(std::move(line));
    }
  }
  std::vector<Eigen::MatrixXd> rays;
  for (int r : zero_rows) {
    for (Eigen::Index j = 0; j < k; ++j) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, k);
      e(r, j) = -1.0;
      rays.push_back(std::move(e));
    }
  }
  return FiniteCone(Point(m, base), std::move(lines), std::move(rays));
}

bool pattern_cone_contains(const PatternCone& cone, const Tangent& x, double tol) {
  const Eigen::MatrixXd& p = cone.base;
  const Eigen::MatrixXd& v = x.vec();
  if (v.rows() != p.rows() || v.cols() != p.cols() ||
      (x.base().coords() - p).norm() > 1e-10)
    throw DomainError("tangent is not based at the cone's base point");
  const double scale = std::max(1.0, v.norm());
  if ((v.transpose() * p + p.transpose() * v).norm() > tol * scale) return false;
  for (int r : cone.zero_rows)
    if (v.row(r).maxCoeff() > tol * scale) return false;
  for (Eigen::Index j = 0; j < p.cols(); ++j)
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      if (cone.support_mask(i, j) && std::abs(v(i, j)) > tol * scale) return false;
  return true;
}

SetSampler stiefel_plus_sampler(const Point& p_point, int random_samples) {
  const PatternCone pattern = stiefel_plus_normal_cone(p_point.coords());
  const Manifold m = p_point.manifold();
  return [pattern, m, random_samples](double scale, Rng& rng) {
    const Eigen::MatrixXd& p = pattern.base;
    const Eigen::Index n = p.rows(), k = p.cols();
    std::vector<Point> out;
    std::normal_distribution<double> normal;

    // assignment[r] = column index joined by zero row r, or -1.
    auto build = [&](const std::vector<int>& assignment, bool move_support) {
      Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, k);
      if (move_support)
        for (Eigen::Index j = 0; j < k; ++j)
          for (Eigen::Index i = 0; i < n; ++i)
            if (pattern.support_mask(i, j)) d(i, j) = normal(rng);
      for (std::size_t z = 0; z < pattern.zero_rows.size(); ++z)
        if (assignment[z] >= 0) d(pattern.zero_rows[z], assignment[z]) = std::abs(normal(rng)) + 0.05;
      const double dn = d.norm();
      if (!(dn > 0.0)) return;
      Eigen::MatrixXd u = p + (scale / dn) * d;
      for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) u(i, j) = std::max(u(i, j), 0.0);
        const double cn = u.col(j).norm();
        if (!(cn > 0.0)) return;
        u.col(j) /= cn;
      }
      out.emplace_back(m, std::move(u));
    };

    const std::size_t nz = pattern.zero_rows.size();
    std::vector<int> none(nz, -1);
    // Single zero row joining a single column.
    for (std::size_t z = 0; z < nz; ++z) {
      for (Eigen::Index j = 0; j < k; ++j) {
        std::vector<int> a = none;
        a[z] = static_cast<int>(j);
        build(a, false);
      }
    }
    // Moves inside the positive support only.
    const int support_moves = std::max(4, random_samples / 4);
    if (pattern.support_mask.count() > k)
      for (int i = 0; i < support_moves; ++i) build(none, true);
    // Random mixtures.
    std::uniform_int_distribution<int> column(0, static_cast<int>(k) - 1);
    for (int i = 0; i < random_samples; ++i) {
      std::vector<int> a(nz);
      for (std::size_t z = 0; z < nz; ++z) a[z] = uniform01(rng) < 0.5 ? -1 : column(rng);
      build(a, uniform01(rng) < 0.5);
    }
    return out;
  };
}

Eigen::MatrixXd random_stiefel_plus(int n, int k, Rng& rng, double zero_row_probability) {
  if (k < 1 || n < k) throw ShapeError("need 1 <= k <= n");
  std::vector<int> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = i;
  std::shuffle(rows.begin(), rows.end(), rng);
  std::vector<int> owner(n, -1);
  for (int j = 0; j < k; ++j) owner[rows[j]] = j;  // every column gets a row
  std::uniform_int_distribution<int> column(0, k - 1);
  for (int r = k; r < n; ++r)
    if (uniform01(rng) >= zero_row_probability) owner[rows[r]] = column(rng);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, k);
  for (int i = 0; i < n; ++i)
    if (owner[i] >= 0) p(i, owner[i]) = 0.1 + uniform01(rng);
  for (int j = 0; j < k; ++j) p.col(j).normalize();
  return p;
}

PatternCrossCheck cross_validate_pattern_cone(const Eigen::MatrixXd& p_raw, int covectors,
                                              const RefuteSchedule& schedule, double margin) {
  const PatternCone pattern = stiefel_plus_normal_cone(p_raw);
  const Manifold m = Manifold::stiefel(static_cast<int>(p_raw.rows()), static_cast<int>(p_raw.cols()));
  const Point p(m, pattern.base);
  const FiniteCone cone = pattern.to_finite_cone(m);
  const SetSampler omega = stiefel_plus_sampler(p);
  Rng rng = substream(schedule.seed, 0xE15);
  PatternCrossCheck out;

  std::vector<Eigen::MatrixXd> inside = cone.extreme_elements(1.0);
  while (static_cast<int>(inside.size()) < covectors) inside.push_back(cone.sample_member(rng, 1.0));
  std::vector<Eigen::MatrixXd> outside;
  int attempts = 0;
  // When the cone is the whole tangent space there is nothing outside it.
  const bool full = cone.dimension() == m.intrinsic_dim();
  while (!full && static_cast<int>(outside.size()) < covectors) {
    if (++attempts > 100000) throw NumericalError("could not draw covectors outside the cone slice");
    Eigen::MatrixXd x = random_unit_tangent(p, rng).vec();
    if (cone.distance(x) < margin) continue;
    outside.push_back(std::move(x));
  }

  for (const auto& x : inside) {
    ++out.inside_tested;
    if (!pattern_cone_contains(pattern, Tangent(p, x), 1e-8)) ++out.membership_mismatches;
    if (frechet_normal_refute(omega, p, Tangent(p, x), schedule).refuted()) ++out.inside_refuted;
  }
  for (const auto& x : outside) {
    ++out.outside_tested;
    if (pattern_cone_contains(pattern, Tangent(p, x), 1e-8)) ++out.membership_mismatches;
    if (!frechet_normal_refute(omega, p, Tangent(p, x), schedule).refuted()) ++out.outside_missed;
  }
  return out;
}

// ---------------------------------------------------------------------------

DistSubdiffSummary check_dist_subdiff_identity(const SetFixture& fixture, int samples,
                                               const RefuteSchedule& schedule, double margin) {
  if (samples < 1) throw ShapeError("need at least one covector sample");
  const Point& p = fixture.base;
  const FiniteCone& cone = fixture.normal_cone;
  DistSubdiffSummary summary;
  Rng rng = substream(schedule.seed, 0xC0DE);

  std::vector<Eigen::MatrixXd> inside = cone.extreme_elements(1.0);
  inside.push_back(Eigen::MatrixXd::Zero(p.coords().rows(), p.coords().cols()));
  while (static_cast<int>(inside.size()) < samples) inside.push_back(cone.sample_member(rng, 1.0));

  std::vector<Eigen::MatrixXd> outside;
  if (cone.dimension() > 0) {
    for (const auto& e : cone.extreme_elements(1.0)) outside.push_back((1.0 + margin) * e);
  }
  int attempts = 0;
  while (static_cast<int>(outside.size()) < samples) {
    if (++attempts > 100000) throw NumericalError("could not draw covectors outside the cone slice");
    Eigen::MatrixXd x;
    if (cone.dimension() > 0 && outside.size() % 2 == 0) {
      // Radial overshoot of a cone member.
      Eigen::MatrixXd m = cone.sample_member(rng, 1.0);
      const double mn = m.norm();
      if (!(mn > 1e-6)) continue;
      x = ((1.0 + margin + (1.0 - margin) * uniform01(rng)) / mn) * m;
    } else {
      x = (2.0 * uniform01(rng)) * random_unit_tangent(p, rng).vec();
    }
    if (cone.distance_to_slice(x, 1.0) < margin) continue;
    outside.push_back(std::move(x));
  }

  const ScalarFunction& dist = fixture.distance;
  for (const auto& x : inside) {
    ++summary.inside_tested;
    if (frechet_subdiff_refute(dist, p, Tangent(p, x), schedule).refuted()) {
      ++summary.inside_refuted;
      if (!summary.inside_counterexample) summary.inside_counterexample = x;
    }
  }
  for (const auto& x : outside) {
    ++summary.outside_tested;
    if (frechet_subdiff_refute(dist, p, Tangent(p, x), schedule).refuted()) {
      ++summary.outside_refuted;
    } else if (!summary.outside_miss) {
      summary.outside_miss = x;
    }
  }
  return summary;
}

DirDerivReport check_dirderiv_identity(const SetFixture& fixture,
                                       const std::vector<Eigen::MatrixXd>& directions,
                                       const ContingentSchedule& schedule) {
  DirDerivReport report;
  for (const auto& dir : directions) {
    const Tangent v(fixture.base, dir);
    DirectionResidual row;
    row.direction = dir;
    row.derivative = contingent_derivative(fixture.distance, fixture.base, v, schedule);
    row.cone_distance = contingent_cone_distance(fixture.sampler, fixture.base, v, schedule);
    row.residual = std::abs(row.derivative - row.cone_distance);
    report.max_residual = std::max(report.max_residual, row.residual);
    report.rows.push_back(std::move(row));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Fixtures.

namespace {

Eigen::MatrixXd vec2(double x, double y) {
  Eigen::MatrixXd v(2, 1);
  v << x, y;
  return v;
}

}  // namespace

SetFixture half_plane_fixture() {
  const Manifold m = Manifold::euclidean(2);
  const Point base(m, vec2(0, 0));
  SetSampler sampler = [m](double t, Rng& rng) {
    std::vector<Point> out{Point(m, vec2(t, 0)), Point(m, vec2(-t, 0)), Point(m, vec2(0, -t))};
    // One-degree angular grid over the lower half, random radii.
    for (int i = 0; i <= 180; ++i) {
      const double a = std::numbers::pi * (1.0 + i / 180.0);
      const double r = t * (0.05 + 0.95 * uniform01(rng));
      out.emplace_back(m, vec2(r * std::cos(a), std::min(r * std::sin(a), 0.0)));
    }
    return out;
  };
  ScalarFunction dist = [](const Point& u) { return std::max(u.coords()(1, 0), 0.0); };
  FiniteCone cone(base, {}, {vec2(0, 1)});
  return SetFixture{"half-plane", base, sampler, dist, cone};
}

SetFixture line_fixture() {
  const Manifold m = Manifold::euclidean(2);
  const Point base(m, vec2(0, 0));
  SetSampler sampler = [m](double t, Rng& rng) {
    std::vector<Point> out{Point(m, vec2(t, 0)), Point(m, vec2(-t, 0))};
    for (int i = 0; i < 32; ++i) {
      const double s = t * (0.05 + 0.95 * uniform01(rng));
      out.emplace_back(m, vec2(uniform01(rng) < 0.5 ? s : -s, 0));
    }
    return out;
  };
  ScalarFunction dist = [](const Point& u) { return std::abs(u.coords()(1, 0)); };
  FiniteCone cone(base, {vec2(0, 1)}, {});
  return SetFixture{"x-axis", base, sampler, dist, cone};
}

SetFixture full_space_fixture() {
  const Manifold m = Manifold::euclidean(2);
  const Point base(m, vec2(0.3, -0.2));
  SetSampler sampler = [m, base](double t, Rng& rng) {
    std::vector<Point> out;
    for (int i = 0; i < 360; ++i) {
      const double a = 2.0 * std::numbers::pi * i / 360.0;
      const double r = t * (0.05 + 0.95 * uniform01(rng));
      out.emplace_back(m, base.coords() + vec2(r * std::cos(a), r * std::sin(a)));
    }
    return out;
  };
  ScalarFunction dist = [](const Point&) { return 0.0; };
  FiniteCone cone(base, {}, {});
  return SetFixture{"full-space", base, sampler, dist, cone};
}

SetFixture stiefel_plus_arc_fixture() {
  const Manifold m = Manifold::sphere(2, 1.0);
  const Point base(m, vec2(1, 0));
  SetSampler sampler = [m](double t, Rng& rng) {
    const double top = std::min(t, std::numbers::pi / 2);
    std::vector<Point> out{Point(m, vec2(std::cos(top), std::sin(top)))};
    for (int i = 0; i < 32; ++i) {
      const double a = top * (0.05 + 0.95 * uniform01(rng));
      out.emplace_back(m, vec2(std::cos(a), std::sin(a)));
    }
    return out;
  };
  ScalarFunction dist = [](const Point& u) {
    const double a = std::atan2(u.coords()(1, 0), u.coords()(0, 0));
    if (a >= 0.0 && a <= std::numbers::pi / 2) return 0.0;
    auto wrap = [](double x) {
      x = std::fmod(std::abs(x), 2.0 * std::numbers::pi);
      return std::min(x, 2.0 * std::numbers::pi - x);
    };
    return std::min(wrap(a), wrap(a - std::numbers::pi / 2));
  };
  FiniteCone cone = stiefel_plus_normal_cone(vec2(1, 0)).to_finite_cone(m);
  return SetFixture{"st+(2,1)-arc", base, sampler, dist, cone};
}

SetFixture parabola_fixture() {
  const Manifold m = Manifold::euclidean(2);
  const Point base(m, vec2(0, 0));
  SetSampler sampler = [m](double t, Rng& rng) {
    std::vector<Point> out{Point(m, vec2(t, t * t)), Point(m, vec2(-t, t * t))};
    for (int i = 0; i < 32; ++i) {
      double s = t * (0.05 + 0.95 * uniform01(rng));
      if (uniform01(rng) < 0.5) s = -s;
      out.emplace_back(m, vec2(s, s * s));
    }
    return out;
  };
  // Stationary points of |(s, s^2) - (x, y)|^2 solve 2 s^3 + (1 - 2y) s - x = 0.
  ScalarFunction dist = [](const Point& u) {
    const double x = u.coords()(0, 0), y = u.coords()(1, 0);
    Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    companion(0, 2) = x / 2.0;
    companion(1, 2) = -(1.0 - 2.0 * y) / 2.0;
    const Eigen::Vector3cd roots = companion.eigenvalues();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      double s = roots(i).real();
      for (int it = 0; it < 3; ++it) {  // polish
        const double g = 2 * s * s * s + (1 - 2 * y) * s - x;
        const double dg = 6 * s * s + (1 - 2 * y);
        if (dg != 0.0) s -= g / dg;
      }
      best = std::min(best, std::hypot(s - x, s * s - y));
    }
    return best;
  };
  FiniteCone cone(base, {vec2(0, 1)}, {});
  return SetFixture{"parabola", base, sampler, dist, cone};
}

}  // namespace rwsm
