#pragma once

// Concrete finite-dimensional Riemannian manifolds embedded in Euclidean
// space: R^n, round spheres of radius rho in R^n, and the Stiefel manifold
// St(n,k) with the metric induced by <X,Y> = tr(X^T Y).
//
// Points and tangent vectors are stored in ambient coordinates as Eigen
// matrices (column vectors for R^n and spheres, n x k for St(n,k)).

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rwsm/random.hpp"

namespace rwsm {

inline constexpr double kFeasibilityTol = 1e-10;
inline constexpr double kInversionTol = 1e-8;

enum class ManifoldKind { kEuclidean, kSphere, kStiefel };

class Manifold {
 public:
  static Manifold euclidean(int n);
  /// Sphere of radius `radius` embedded in R^n; intrinsic dimension n-1.
  static Manifold sphere(int n, double radius = 1.0);
  static Manifold stiefel(int n, int k);

  ManifoldKind kind() const { return kind_; }
  int n() const { return n_; }
  /// Number of columns (1 unless Stiefel).
  int k() const { return k_; }
  double radius() const { return radius_; }
  int ambient_dim() const { return n_ * k_; }
  int intrinsic_dim() const;
  Eigen::Index rows() const { return n_; }
  Eigen::Index cols() const { return k_; }

  /// Injectivity radius of the exponential map (infinite for R^n).
  double injectivity_radius() const;

  std::string describe() const;

  friend bool operator==(const Manifold& a, const Manifold& b) {
    return a.kind_ == b.kind_ && a.n_ == b.n_ && a.k_ == b.k_ && a.radius_ == b.radius_;
  }

 private:
  Manifold(ManifoldKind kind, int n, int k, double radius)
      : kind_(kind), n_(n), k_(k), radius_(radius) {}

  ManifoldKind kind_;
  int n_;
  int k_;
  double radius_;
};

/// A point of a manifold. Construction validates the defining equations to
/// kFeasibilityTol and throws DomainError otherwise.
class Point {
 public:
  Point(Manifold manifold, Eigen::MatrixXd coords);

  const Manifold& manifold() const { return manifold_; }
  const Eigen::MatrixXd& coords() const { return coords_; }

 private:
  Manifold manifold_;
  Eigen::MatrixXd coords_;
};

/// A tangent vector at `base`. Covectors are identified with tangents
/// through the metric, so this type also carries subgradients and normals.
class Tangent {
 public:
  Tangent(Point base, Eigen::MatrixXd vec);

  static Tangent zero(const Point& base);

  const Point& base() const { return base_; }
  const Eigen::MatrixXd& vec() const { return vec_; }
  double norm() const { return vec_.norm(); }

 private:
  Point base_;
  Eigen::MatrixXd vec_;
};

/// Frobenius inner product of ambient matrices.
inline double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

Point exp_map(const Point& p, const Tangent& v);
Tangent log_map(const Point& p, const Point& q);

/// Riemannian distance on R^n and spheres. On St(n,k) this is the chordal
/// distance ||P - Q||_F, which lower-bounds the Riemannian distance.
double geodesic_distance(const Point& p, const Point& q);

Tangent tangent_project(const Point& p, const Eigen::MatrixXd& z);

/// First-order retraction: identity on R^n, radial normalization on spheres,
/// Q factor of P + X (diagonal of R made positive) on St(n,k).
Point retract(const Point& p, const Tangent& v);

/// sup |R_p(w1,w2,w3,w4)| over unit tangent vectors.
double curvature_norm(const Point& p);

/// min over s in `set` of geodesic_distance(q, s).
double point_set_distance(const Point& q, const std::vector<Point>& set);

/// Orthonormal basis of T_p M, one ambient matrix per basis vector.
std::vector<Eigen::MatrixXd> tangent_basis(const Point& p);

/// Uniformly distributed unit tangent vector at p.
Tangent random_unit_tangent(const Point& p, Rng& rng);

/// Random point of M. Stiefel points come from the QR factor of a Gaussian
/// matrix; sphere points from a normalized Gaussian vector.
Point random_point(const Manifold& m, Rng& rng);

/// ||U^T U - I||_F.
double orthonormality_residual(const Eigen::MatrixXd& u);

// Local chart used by the cone estimators. On R^n and spheres this is the
// exponential chart (log_p, geodesic distance). On St(n,k), where no closed
// form log exists, the ambient chart u - p with chordal distance is used; it
// agrees with the exponential chart to first order, which is all the
// Frechet constructions see (normal cones are the ambient cone intersected
// with the tangent space).
Eigen::MatrixXd chart_coordinates(const Point& p, const Point& u);
double chart_distance(const Point& p, const Point& u);
/// Point reached from p along tangent direction v: exp_p(v) when available,
/// otherwise retract(p, v).
Point chart_step(const Point& p, const Tangent& v);

// ---------------------------------------------------------------------------
// Local distance lemma verification.

/// Produces a finite subset of Omega inside the closed ball B(p, r).
using BallSampler = std::function<std::vector<Point>(double r, Rng& rng)>;

struct LemmaReport {
  std::vector<double> radii;
  /// Per radius: max over sampled u of |dist(u; Omega_r) / chart distance - 1|.
  std::vector<double> worst_ratio_deviation;
  /// Slope of the log-log regression of deviation against r (NaN when any
  /// deviation is zero, e.g. in flat space).
  double fitted_order = 0.0;
  /// Coefficient c of the fit deviation ~ c r^2.
  double fitted_coefficient = 0.0;
  /// ||R_p|| / 6.
  double coefficient_bound = 0.0;
  bool within_bound = false;
  /// Largest |deviation - coefficient_bound r^2| / r^3 seen; the r^3 term
  /// the lemma leaves unspecified, reported rather than asserted.
  double cubic_remainder = 0.0;
};

struct LemmaOptions {
  int samples_per_radius = 400;
  std::uint64_t seed = 0;
  /// Relative slack allowed on the coefficient bound.
  double tolerance = 0.25;
};

LemmaReport verify_local_distance_lemma(const Point& p, const BallSampler& set_sampler,
                                        const std::vector<double>& radii,
                                        const LemmaOptions& options);

/// Sampler for the geodesic sphere of radius r about p (points exp_p(r w)).
BallSampler geodesic_sphere_sampler(const Point& p, int count);

}  // namespace rwsm
