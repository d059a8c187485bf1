#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rwsm/cones.hpp"
#include "rwsm/errors.hpp"

using namespace rwsm;

namespace {

Eigen::MatrixXd vec2(double x, double y) {
  Eigen::MatrixXd v(2, 1);
  v << x, y;
  return v;
}

Eigen::MatrixXd unit(int n, int k, int i, int j, double value = 1.0) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, k);
  e(i, j) = value;
  return e;
}

}  // namespace

TEST(FiniteCone, ProjectionOntoRay) {
  const Point p(Manifold::euclidean(2), vec2(0, 0));
  const FiniteCone cone(p, {}, {vec2(0, 1)});
  EXPECT_EQ(cone.project(vec2(1, 2)), vec2(0, 2));
  EXPECT_EQ(cone.project(vec2(1, -2)), vec2(0, 0));
  EXPECT_NEAR(cone.distance(vec2(1, -2)), std::sqrt(5.0), 1e-15);
  EXPECT_TRUE(cone.contains(vec2(0, 3)));
  EXPECT_FALSE(cone.contains(vec2(0, -3)));
  // Slice of radius 1: (0, 3) is 2 away from (0, 1).
  EXPECT_NEAR(cone.distance_to_slice(vec2(0, 3), 1.0), 2.0, 1e-15);
  EXPECT_NEAR(cone.distance_to_slice(vec2(0, 0.5), 1.0), 0.0, 1e-15);
}

TEST(FiniteCone, LinesAndRays) {
  const Point p(Manifold::euclidean(2), vec2(0, 0));
  const FiniteCone cone(p, {vec2(1, 0)}, {vec2(0, 1)});
  EXPECT_EQ(cone.project(vec2(-3, -1)), vec2(-3, 0));
  EXPECT_EQ(cone.extreme_elements(2.0).size(), 3u);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const Eigen::MatrixXd m = cone.sample_member(rng, 0.5);
    EXPECT_LE(m.norm(), 0.5 + 1e-15);
    EXPECT_TRUE(cone.contains(m));
  }
}

TEST(FiniteCone, RejectsNonOrthonormalGenerators) {
  const Point p(Manifold::euclidean(2), vec2(0, 0));
  EXPECT_THROW(FiniteCone(p, {vec2(1, 0)}, {vec2(1, 1) / std::sqrt(2.0)}), ShapeError);
  EXPECT_THROW(FiniteCone(p, {}, {vec2(2, 0)}), ShapeError);
  const Point s(Manifold::sphere(2), vec2(1, 0));
  EXPECT_THROW(FiniteCone(s, {}, {vec2(1, 0)}), DomainError);  // not tangent
}

TEST(Refuters, NormalConeOfHalfPlane) {
  const SetFixture f = half_plane_fixture();
  const Point& p = f.base;
  EXPECT_FALSE(frechet_normal_refute(f.sampler, p, Tangent(p, vec2(0, 1)), RefuteSchedule::standard()).refuted());
  const RefutationVerdict v = frechet_normal_refute(f.sampler, p, Tangent(p, vec2(1, 0)), RefuteSchedule::standard());
  ASSERT_TRUE(v.refuted());
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_GT(v.witness->quotient, 0.9);  // sup over directions is |(1,0)| = 1
}

TEST(Refuters, SubdifferentialOfAbsoluteValue) {
  const Point p(Manifold::euclidean(1), Eigen::MatrixXd::Zero(1, 1));
  const ScalarFunction f = [](const Point& u) { return std::abs(u.coords()(0, 0)); };
  auto x = [&](double s) { return Tangent(p, Eigen::MatrixXd::Constant(1, 1, s)); };
  EXPECT_FALSE(frechet_subdiff_refute(f, p, x(0.5), RefuteSchedule::standard()).refuted());
  EXPECT_FALSE(frechet_subdiff_refute(f, p, x(1.0), RefuteSchedule::standard()).refuted());
  const RefutationVerdict v = frechet_subdiff_refute(f, p, x(1.5), RefuteSchedule::standard());
  ASSERT_TRUE(v.refuted());
  EXPECT_NEAR(v.witness->quotient, -0.5, 1e-9);  // 1 - 1.5
}

TEST(Refuters, SmoothFunctionHasGradientOnly) {
  // f(u) = u_1 on the unit circle at (0, 1): Riemannian gradient is (1, 0).
  const Point p(Manifold::sphere(2), vec2(0, 1));
  const ScalarFunction f = [](const Point& u) { return u.coords()(0, 0); };
  EXPECT_FALSE(frechet_subdiff_refute(f, p, Tangent(p, vec2(1, 0)), RefuteSchedule::standard()).refuted());
  EXPECT_TRUE(frechet_subdiff_refute(f, p, Tangent(p, vec2(1.1, 0)), RefuteSchedule::standard()).refuted());
}

TEST(Refuters, RequiresDecreasingSchedule) {
  const SetFixture f = half_plane_fixture();
  RefuteSchedule s;
  s.scales = {1e-3, 1e-2};
  EXPECT_THROW(frechet_normal_refute(f.sampler, f.base, Tangent(f.base, vec2(0, 1)), s), ShapeError);
  s.scales = {};
  EXPECT_THROW(frechet_normal_refute(f.sampler, f.base, Tangent(f.base, vec2(0, 1)), s), ShapeError);
}

TEST(Refuters, CoarseViolationAloneDoesNotRefute) {
  // f(u) = |u| - 10 u^2 has slope 1 at 0, but at t = 1e-1 the quadratic
  // term dominates; only the finest scales decide.
  const Point p(Manifold::euclidean(1), Eigen::MatrixXd::Zero(1, 1));
  const ScalarFunction f = [](const Point& u) {
    const double x = u.coords()(0, 0);
    return std::abs(x) - 10.0 * x * x;
  };
  RefuteSchedule s = RefuteSchedule::geometric(1e-1, 0.1, 1e-6);
  const RefutationVerdict v = frechet_subdiff_refute(f, p, Tangent(p, Eigen::MatrixXd::Constant(1, 1, 0.9)), s);
  EXPECT_LT(v.quotient_trace.front(), -s.tolerance);
  EXPECT_FALSE(v.refuted());
}

TEST(Contingent, LinearFunctionIsExact) {
  Rng rng(3);
  const Point p(Manifold::euclidean(3), gaussian_matrix(3, 1, rng));
  const Eigen::MatrixXd a = gaussian_matrix(3, 1, rng);
  const ScalarFunction f = [a](const Point& u) { return inner(a, u.coords()); };
  for (int i = 0; i < 10; ++i) {
    const Tangent v(p, gaussian_matrix(3, 1, rng));
    EXPECT_NEAR(contingent_derivative(f, p, v, ContingentSchedule::standard()), inner(a, v.vec()), 1e-10);
  }
}

TEST(Contingent, AbsoluteValueKink) {
  const Point p(Manifold::euclidean(1), Eigen::MatrixXd::Zero(1, 1));
  const ScalarFunction f = [](const Point& u) { return std::abs(u.coords()(0, 0)); };
  EXPECT_NEAR(contingent_derivative(f, p, Tangent(p, Eigen::MatrixXd::Constant(1, 1, -2.0)),
                                    ContingentSchedule::standard()),
              2.0, 1e-12);
}

TEST(Contingent, ConeDistanceForHalfPlane) {
  const SetFixture f = half_plane_fixture();
  const ContingentSchedule cs = ContingentSchedule::standard();
  EXPECT_NEAR(contingent_cone_distance(f.sampler, f.base, Tangent(f.base, vec2(0, 1)), cs), 1.0, 1e-12);
  EXPECT_NEAR(contingent_cone_distance(f.sampler, f.base, Tangent(f.base, vec2(0, -1)), cs), 0.0, 1e-2);
  // (1, 1) / sqrt 2 is 1/sqrt 2 away from the boundary ray.
  EXPECT_NEAR(contingent_cone_distance(f.sampler, f.base, Tangent(f.base, vec2(1, 1) / std::sqrt(2.0)), cs),
              1.0 / std::sqrt(2.0), 1e-12);
}

TEST(PatternCone, CircleEndpoint) {
  const PatternCone pc = stiefel_plus_normal_cone(vec2(1, 0));
  ASSERT_EQ(pc.zero_rows, std::vector<int>{1});
  const FiniteCone cone = pc.to_finite_cone(Manifold::stiefel(2, 1));
  EXPECT_TRUE(cone.lines().empty());
  ASSERT_EQ(cone.rays().size(), 1u);
  EXPECT_EQ(cone.rays()[0], vec2(0, -1));
}

TEST(PatternCone, CoordinateFrameInThreeSpace) {
  // P = [e1 e2] in St(3,2). Zero row 3 gives rays -E31, -E32. Off-support
  // entries (1,2), (2,1) of nonzero rows must satisfy X12 + X21 = 0, giving
  // the line (E12 - E21)/sqrt 2.
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(3, 2);
  const PatternCone pc = stiefel_plus_normal_cone(p);
  const FiniteCone cone = pc.to_finite_cone(Manifold::stiefel(3, 2));
  EXPECT_EQ(cone.dimension(), 3);
  ASSERT_EQ(cone.lines().size(), 1u);
  const Eigen::MatrixXd expected = (unit(3, 2, 0, 1) - unit(3, 2, 1, 0)) / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(inner(cone.lines()[0], expected)), 1.0, 1e-12);
  const Point base(Manifold::stiefel(3, 2), p);
  EXPECT_TRUE(pattern_cone_contains(pc, Tangent(base, unit(3, 2, 2, 0, -0.3))));
  EXPECT_FALSE(pattern_cone_contains(pc, Tangent(base, unit(3, 2, 2, 0, 0.3))));
  EXPECT_TRUE(pattern_cone_contains(pc, Tangent(base, expected)));
}

TEST(PatternCone, MembershipAgreesWithFiniteCone) {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 1 + trial % 3;
    const int n = k + trial % 4;
    const Eigen::MatrixXd p = random_stiefel_plus(n, k, rng);
    const PatternCone pc = stiefel_plus_normal_cone(p);
    const Manifold m = Manifold::stiefel(n, k);
    if (m.intrinsic_dim() == 0) continue;
    const FiniteCone cone = pc.to_finite_cone(m);
    const Point base(m, pc.base);
    for (int i = 0; i < 20; ++i) {
      const Eigen::MatrixXd x = i % 2 == 0 ? cone.sample_member(rng) : random_unit_tangent(base, rng).vec();
      EXPECT_EQ(pattern_cone_contains(pc, Tangent(base, x), 1e-8), cone.contains(x, 1e-8));
    }
  }
}

TEST(PatternCone, RejectsInfeasiblePoints) {
  EXPECT_THROW(stiefel_plus_normal_cone(vec2(0.6, -0.8)), DomainError);
  EXPECT_THROW(stiefel_plus_normal_cone(vec2(0.6, 0.6)), DomainError);
  EXPECT_EQ(snap_small_entries(vec2(1e-13, 1)), vec2(0, 1));
}

TEST(StiefelPlus, RandomPointsAreFeasible) {
  Rng rng(22);
  for (int i = 0; i < 100; ++i) {
    const int k = 1 + i % 3;
    const Eigen::MatrixXd p = random_stiefel_plus(k + i % 4, k, rng);
    EXPECT_GE(p.minCoeff(), 0.0);
    EXPECT_LE(orthonormality_residual(p), 1e-12);
  }
}

TEST(StiefelPlus, SamplerStaysInSetAndNearBase) {
  Rng rng(23);
  const Eigen::MatrixXd p = random_stiefel_plus(6, 3, rng, 0.5);
  const Point base(Manifold::stiefel(6, 3), p);
  const SetSampler s = stiefel_plus_sampler(base);
  for (double t : {1e-1, 1e-3, 1e-6}) {
    const auto pts = s(t, rng);
    EXPECT_FALSE(pts.empty());
    for (const Point& u : pts) {
      EXPECT_GE(u.coords().minCoeff(), 0.0);
      EXPECT_LE(orthonormality_residual(u.coords()), 1e-10);
      EXPECT_LE((u.coords() - p).norm(), 3.0 * t);
    }
  }
}

TEST(StiefelPlus, CrossValidationOnSeededPoints) {
  Rng rng(24);
  for (int i = 0; i < 5; ++i) {
    const Eigen::MatrixXd p = random_stiefel_plus(5, 2, rng);
    RefuteSchedule s = RefuteSchedule::standard();
    s.seed = static_cast<std::uint64_t>(i);
    const PatternCrossCheck c = cross_validate_pattern_cone(p, 8, s);
    EXPECT_EQ(c.disagreements(), 0);
    EXPECT_EQ(c.outside_tested, 8);
  }
}

TEST(StiefelPlus, IsolatedPointHasWholeTangentSpaceAsNormalCone) {
  const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(2, 2);
  const FiniteCone cone = stiefel_plus_normal_cone(p).to_finite_cone(Manifold::stiefel(2, 2));
  EXPECT_EQ(cone.dimension(), 1);
  const PatternCrossCheck c = cross_validate_pattern_cone(p, 6, RefuteSchedule::standard());
  EXPECT_EQ(c.disagreements(), 0);
  EXPECT_EQ(c.outside_tested, 0);
}

TEST(Fixtures, ParabolaDistanceMatchesGridSearch) {
  const SetFixture f = parabola_fixture();
  Rng rng(25);
  for (int i = 0; i < 50; ++i) {
    const double x = 2.0 * uniform01(rng) - 1.0, y = 2.0 * uniform01(rng) - 1.0;
    double oracle = std::numeric_limits<double>::infinity();
    for (int j = -40000; j <= 40000; ++j) {
      const double s = j * 5e-5;
      oracle = std::min(oracle, std::hypot(s - x, s * s - y));
    }
    EXPECT_NEAR(f.distance(Point(Manifold::euclidean(2), vec2(x, y))), oracle, 1e-4);
  }
}

TEST(Fixtures, ArcDistanceIsAngular) {
  const SetFixture f = stiefel_plus_arc_fixture();
  const Manifold m = Manifold::sphere(2);
  EXPECT_NEAR(f.distance(Point(m, vec2(0, -1))), std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(f.distance(Point(m, vec2(std::cos(1.0), std::sin(1.0)))), 0.0, 1e-15);
  EXPECT_NEAR(f.distance(Point(m, vec2(-1, 0))), std::numbers::pi / 2, 1e-15);
}

TEST(Identities, DistanceSubdifferential) {
  for (const SetFixture& f : {half_plane_fixture(), line_fixture(), full_space_fixture(),
                              stiefel_plus_arc_fixture(), parabola_fixture()}) {
    const DistSubdiffSummary s = check_dist_subdiff_identity(f, 50, RefuteSchedule::standard());
    EXPECT_TRUE(s.passed()) << f.name << " inside refuted " << s.inside_refuted << ", outside missed "
                            << s.outside_tested - s.outside_refuted;
  }
}

TEST(Identities, DirectionalDerivative) {
  for (const SetFixture& f : {half_plane_fixture(), line_fixture(), full_space_fixture(),
                              stiefel_plus_arc_fixture(), parabola_fixture()}) {
    std::vector<Eigen::MatrixXd> dirs;
    for (const auto& b : tangent_basis(f.base)) {
      dirs.push_back(b);
      dirs.push_back(-b);
    }
    const DirDerivReport r = check_dirderiv_identity(f, dirs, ContingentSchedule::standard());
    EXPECT_TRUE(r.passed(5e-2)) << f.name << " residual " << r.max_residual;
  }
}
