#include "rwsm/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rwsm/errors.hpp"

namespace rwsm {

namespace {

void require_same_manifold(const Point& a, const Point& b) {
  if (!(a.manifold() == b.manifold()))
    throw ShapeError("points on different manifolds: " + a.manifold().describe() + " vs " +
                     b.manifold().describe());
}

void require_base(const Point& p, const Tangent& v) {
  require_same_manifold(p, v.base());
  if ((p.coords() - v.base().coords()).norm() > 1e-14 * (1.0 + p.coords().norm()))
    throw DomainError("tangent vector is based at a different point");
}

Eigen::MatrixXd sym(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

Manifold Manifold::euclidean(int n) {
  if (n < 1) throw ShapeError("euclidean dimension must be positive");
  return Manifold(ManifoldKind::kEuclidean, n, 1, 0.0);
}

Manifold Manifold::sphere(int n, double radius) {
  if (n < 2) throw ShapeError("sphere needs an ambient dimension of at least 2");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ShapeError("sphere radius must be positive");
  return Manifold(ManifoldKind::kSphere, n, 1, radius);
}

Manifold Manifold::stiefel(int n, int k) {
  if (k < 1 || k > n) throw ShapeError("stiefel manifold needs 0 < k <= n");
  return Manifold(ManifoldKind::kStiefel, n, k, 0.0);
}

int Manifold::intrinsic_dim() const {
  switch (kind_) {
    case ManifoldKind::kEuclidean: return n_;
    case ManifoldKind::kSphere: return n_ - 1;
    case ManifoldKind::kStiefel: return n_ * k_ - k_ * (k_ + 1) / 2;
  }
  return 0;
}

double Manifold::injectivity_radius() const {
  switch (kind_) {
    case ManifoldKind::kEuclidean: return std::numeric_limits<double>::infinity();
    case ManifoldKind::kSphere: return std::numbers::pi * radius_;
    case ManifoldKind::kStiefel: break;
  }
  throw DomainError("injectivity radius not available for " + describe());
}

std::string Manifold::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case ManifoldKind::kEuclidean: os << "euclidean(" << n_ << ")"; break;
    case ManifoldKind::kSphere: os << "sphere(" << n_ << ", " << radius_ << ")"; break;
    case ManifoldKind::kStiefel: os << "stiefel(" << n_ << ", " << k_ << ")"; break;
  }
  return os.str();
}

Point::Point(Manifold manifold, Eigen::MatrixXd coords)
    : manifold_(manifold), coords_(std::move(coords)) {
  if (coords_.rows() != manifold_.rows() || coords_.cols() != manifold_.cols())
    throw ShapeError("coordinates do not match " + manifold_.describe());
  if (!coords_.allFinite()) throw DomainError("non-finite coordinates");
  switch (manifold_.kind()) {
    case ManifoldKind::kEuclidean: break;
    case ManifoldKind::kSphere:
      if (std::abs(coords_.norm() - manifold_.radius()) > kFeasibilityTol)
        throw DomainError("point is not on " + manifold_.describe());
      break;
    case ManifoldKind::kStiefel:
      if (orthonormality_residual(coords_) > kFeasibilityTol)
        throw DomainError("columns are not orthonormal for " + manifold_.describe());
      break;
  }
}

Tangent::Tangent(Point base, Eigen::MatrixXd vec) : base_(std::move(base)), vec_(std::move(vec)) {
  const Eigen::MatrixXd& p = base_.coords();
  if (vec_.rows() != p.rows() || vec_.cols() != p.cols())
    throw ShapeError("tangent shape does not match its base point");
  if (!vec_.allFinite()) throw DomainError("non-finite tangent vector");
  const double scale = vec_.norm();
  switch (base_.manifold().kind()) {
    case ManifoldKind::kEuclidean: break;
    case ManifoldKind::kSphere: {
      const double rho = base_.manifold().radius();
      if (std::abs(inner(vec_, p)) / rho > kFeasibilityTol * std::max(scale, 1e-300) + 1e-300)
        throw DomainError("vector is not tangent to the sphere");
      break;
    }
    case ManifoldKind::kStiefel: {
      const Eigen::MatrixXd c = vec_.transpose() * p + p.transpose() * vec_;
      if (c.norm() > kFeasibilityTol * std::max(scale, 1e-300) + 1e-300)
        throw DomainError("vector is not tangent to the Stiefel manifold");
      break;
    }
  }
}

Tangent Tangent::zero(const Point& base) {
  return Tangent(base, Eigen::MatrixXd::Zero(base.coords().rows(), base.coords().cols()));
}

Point exp_map(const Point& p, const Tangent& v) {
  require_base(p, v);
  const Manifold& m = p.manifold();
  switch (m.kind()) {
    case ManifoldKind::kEuclidean: return Point(m, p.coords() + v.vec());
    case ManifoldKind::kSphere: {
      const double len = v.norm();
      if (len == 0.0) return p;
      const double rho = m.radius();
      Eigen::MatrixXd q = p.coords() * std::cos(len / rho) + (rho / len) * std::sin(len / rho) * v.vec();
      // Remove the O(eps) radial drift so the result passes the feasibility check.
      q *= rho / q.norm();
      return Point(m, std::move(q));
    }
    case ManifoldKind::kStiefel: break;
  }
  throw DomainError("exact exponential map is not available on " + m.describe() + "; use retract");
}

Tangent log_map(const Point& p, const Point& q) {
  require_same_manifold(p, q);
  const Manifold& m = p.manifold();
  switch (m.kind()) {
    case ManifoldKind::kEuclidean: return Tangent(p, q.coords() - p.coords());
    case ManifoldKind::kSphere: {
      const double rho = m.radius();
      const double c = inner(p.coords(), q.coords());
      Eigen::MatrixXd w = q.coords() - (c / (rho * rho)) * p.coords();
      const double wn = w.norm();
      const double angle = std::atan2(wn * rho, c);
      if (rho * angle > 0.99 * std::numbers::pi * rho)
        throw DomainError("log_map: point is at or beyond 0.99 of the injectivity radius");
      if (wn == 0.0) return Tangent::zero(p);
      Eigen::MatrixXd v = (rho * angle / wn) * w;
      // Re-project to kill rounding in the normal direction.
      v -= (inner(v, p.coords()) / (rho * rho)) * p.coords();
      return Tangent(p, std::move(v));
    }
    case ManifoldKind::kStiefel: break;
  }
  throw DomainError("log_map is not available on " + m.describe());
}

double geodesic_distance(const Point& p, const Point& q) {
  require_same_manifold(p, q);
  const Manifold& m = p.manifold();
  switch (m.kind()) {
    case ManifoldKind::kEuclidean:
    case ManifoldKind::kStiefel: return (p.coords() - q.coords()).norm();
    case ManifoldKind::kSphere: {
      const double rho = m.radius();
      const double c = inner(p.coords(), q.coords());
      const double wn = (q.coords() - (c / (rho * rho)) * p.coords()).norm();
      return rho * std::atan2(wn * rho, c);
    }
  }
  return 0.0;
}

Tangent tangent_project(const Point& p, const Eigen::MatrixXd& z) {
  const Eigen::MatrixXd& x = p.coords();
  if (z.rows() != x.rows() || z.cols() != x.cols())
    throw ShapeError("ambient vector shape does not match the base point");
  switch (p.manifold().kind()) {
    case ManifoldKind::kEuclidean: return Tangent(p, z);
    case ManifoldKind::kSphere: {
      const double rho = p.manifold().radius();
      return Tangent(p, z - (inner(z, x) / (rho * rho)) * x);
    }
    case ManifoldKind::kStiefel: {
      Eigen::MatrixXd t = z - x * sym(x.transpose() * z);
      // One refinement pass keeps ||X^T P + P^T X|| at rounding level for
      // inputs with large normal components.
      t -= x * sym(x.transpose() * t);
      return Tangent(p, std::move(t));
    }
  }
  return Tangent(p, z);
}

Point retract(const Point& p, const Tangent& v) {
  require_base(p, v);
  const Manifold& m = p.manifold();
  switch (m.kind()) {
    case ManifoldKind::kEuclidean: return Point(m, p.coords() + v.vec());
    case ManifoldKind::kSphere: {
      Eigen::MatrixXd y = p.coords() + v.vec();
      return Point(m, (m.radius() / y.norm()) * y);
    }
    case ManifoldKind::kStiefel: {
      const Eigen::MatrixXd y = p.coords() + v.vec();
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
      const Eigen::MatrixXd r = qr.matrixQR().topRows(m.k()).triangularView<Eigen::Upper>();
      Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.n(), m.k());
      const double scale = std::max(1.0, y.norm());
      for (int j = 0; j < m.k(); ++j) {
        if (std::abs(r(j, j)) < 1e-12 * scale)
          throw NumericalError("retraction: P + X is numerically rank deficient");
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
      }
      return Point(m, std::move(q));
    }
  }
  return p;
}

double curvature_norm(const Point& p) {
  const Manifold& m = p.manifold();
  switch (m.kind()) {
    case ManifoldKind::kEuclidean: return 0.0;
    case ManifoldKind::kSphere:
      // A one-dimensional sphere is flat; otherwise constant sectional
      // curvature 1/rho^2 and |R(u,v,w,z)| = K |<u^v, w^z>| <= K.
      return m.intrinsic_dim() < 2 ? 0.0 : 1.0 / (m.radius() * m.radius());
    case ManifoldKind::kStiefel: break;
  }
  throw DomainError("unknown curvature for " + m.describe());
}

double point_set_distance(const Point& q, const std::vector<Point>& set) {
  if (set.empty()) throw ShapeError("point_set_distance: empty set");
  double best = std::numeric_limits<double>::infinity();
  for (const Point& s : set) best = std::min(best, geodesic_distance(q, s));
  return best;
}

std::vector<Eigen::MatrixXd> tangent_basis(const Point& p) {
  const Manifold& m = p.manifold();
  const Eigen::Index rows = m.rows(), cols = m.cols();
  const int amb = m.ambient_dim();
  Eigen::MatrixXd projected(amb, amb);
  for (int j = 0; j < amb; ++j) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(rows, cols);
    e(j % rows, j / rows) = 1.0;
    projected.col(j) = tangent_project(p, e).vec().reshaped();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(projected, Eigen::ComputeFullU);
  std::vector<Eigen::MatrixXd> basis;
  const int dim = m.intrinsic_dim();
  basis.reserve(dim);
  for (int j = 0; j < dim; ++j) {
    Eigen::MatrixXd b = svd.matrixU().col(j).reshaped(rows, cols);
    basis.push_back(tangent_project(p, b).vec());
  }
  return basis;
}

Tangent random_unit_tangent(const Point& p, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Tangent t = tangent_project(p, gaussian_matrix(p.manifold().rows(), p.manifold().cols(), rng));
    const double len = t.norm();
    if (len > 1e-8) return Tangent(p, t.vec() / len);
  }
  throw NumericalError("could not draw a nonzero tangent vector");
}

Point random_point(const Manifold& m, Rng& rng) {
  Eigen::MatrixXd g = gaussian_matrix(m.rows(), m.cols(), rng);
  switch (m.kind()) {
    case ManifoldKind::kEuclidean: return Point(m, g);
    case ManifoldKind::kSphere: return Point(m, (m.radius() / g.norm()) * g);
    case ManifoldKind::kStiefel: {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
      Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.n(), m.k());
      for (int j = 0; j < m.k(); ++j)
        if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
      return Point(m, std::move(q));
    }
  }
  return Point(m, g);
}

double orthonormality_residual(const Eigen::MatrixXd& u) {
  return (u.transpose() * u - Eigen::MatrixXd::Identity(u.cols(), u.cols())).norm();
}

Eigen::MatrixXd chart_coordinates(const Point& p, const Point& u) {
  require_same_manifold(p, u);
  if (p.manifold().kind() == ManifoldKind::kStiefel) return u.coords() - p.coords();
  return log_map(p, u).vec();
}

double chart_distance(const Point& p, const Point& u) { return geodesic_distance(p, u); }

Point chart_step(const Point& p, const Tangent& v) {
  if (p.manifold().kind() == ManifoldKind::kStiefel) return retract(p, v);
  return exp_map(p, v);
}

BallSampler geodesic_sphere_sampler(const Point& p, int count) {
  return [p, count](double r, Rng& rng) {
    std::vector<Point> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
      const Tangent w = random_unit_tangent(p, rng);
      out.push_back(exp_map(p, Tangent(p, r * w.vec())));
    }
    return out;
  };
}

LemmaReport verify_local_distance_lemma(const Point& p, const BallSampler& set_sampler,
                                        const std::vector<double>& radii,
                                        const LemmaOptions& options) {
  const Manifold& m = p.manifold();
  if (m.kind() == ManifoldKind::kStiefel)
    throw DomainError("lemma verification needs an exact distance oracle; not available on " +
                      m.describe());
  if (radii.size() < 3) throw ShapeError("lemma verification needs at least 3 radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw ShapeError("radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw ShapeError("radii must be strictly decreasing");
    if (radii[i] >= 0.99 * m.injectivity_radius())
      throw DomainError("radius exceeds the injectivity radius guard");
  }

  LemmaReport report;
  report.radii = radii;
  report.coefficient_bound = curvature_norm(p) / 6.0;
  const int dim = m.intrinsic_dim();

  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    Rng rng = substream(options.seed, ri);
    const std::vector<Point> omega = set_sampler(r, rng);
    if (omega.empty()) throw ShapeError("set sampler returned no points");
    std::vector<Eigen::MatrixXd> omega_chart;
    omega_chart.reserve(omega.size());
    for (const Point& s : omega) {
      if (geodesic_distance(p, s) > r * (1.0 + 1e-12))
        throw DomainError("set sampler produced a point outside B(p, r)");
      omega_chart.push_back(log_map(p, s).vec());
    }

    double worst = 0.0;
    for (int i = 0; i < options.samples_per_radius; ++i) {
      const Tangent dir = random_unit_tangent(p, rng);
      // Radius distributed like volume in the chart ball, so most samples
      // sit near the boundary where the deviation is largest.
      const double rho = r * std::pow(uniform01(rng), 1.0 / dim);
      const Eigen::MatrixXd uc = rho * dir.vec();
      const Point u = exp_map(p, Tangent(p, uc));
      double manifold_dist = std::numeric_limits<double>::infinity();
      double chart_dist = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < omega.size(); ++j) {
        manifold_dist = std::min(manifold_dist, geodesic_distance(u, omega[j]));
        chart_dist = std::min(chart_dist, (uc - omega_chart[j]).norm());
      }
      if (chart_dist <= 1e-12 * r) continue;
      worst = std::max(worst, std::abs(manifold_dist / chart_dist - 1.0));
    }
    report.worst_ratio_deviation.push_back(worst);
  }

  // log dev = order * log r + log c  (free slope), and log c2 = mean(log dev - 2 log r).
  const std::size_t count = radii.size();
  bool any_zero = false;
  for (double d : report.worst_ratio_deviation) any_zero = any_zero || !(d > 0.0);
  if (any_zero) {
    report.fitted_order = std::numeric_limits<double>::quiet_NaN();
    double c = 0.0;
    for (std::size_t i = 0; i < count; ++i)
      c = std::max(c, report.worst_ratio_deviation[i] / (radii[i] * radii[i]));
    report.fitted_coefficient = c;
  } else {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, s2 = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const double x = std::log(radii[i]);
      const double y = std::log(report.worst_ratio_deviation[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      s2 += y - 2.0 * x;
    }
    const double nn = static_cast<double>(count);
    report.fitted_order = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    report.fitted_coefficient = std::exp(s2 / nn);
  }
  report.within_bound = report.fitted_coefficient <=
                        (1.0 + options.tolerance) * report.coefficient_bound + 1e-12;
  for (std::size_t i = 0; i < count; ++i) {
    const double r = radii[i];
    report.cubic_remainder =
        std::max(report.cubic_remainder,
                 std::abs(report.worst_ratio_deviation[i] - report.coefficient_bound * r * r) /
                     (r * r * r));
  }
  return report;
}

}  // namespace rwsm
