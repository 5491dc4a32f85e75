/* Copyright 2026 The EgoSDE Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "egosde/geom.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "egosde/error.h"
#include "test_util.h"

namespace egosde {
namespace {

using testing::Uniform;

Polygon2 UnitSquare(const Vec2& c = {0.5, 0.5}) {
  return OrientedBox2(c, 1.0, 1.0, 0.0).Footprint();
}

TEST(PointLineDistanceTest, Examples) {
  const Line2 x_axis({0, 0}, {1, 0});
  EXPECT_DOUBLE_EQ(PointLineDistance({0, 3}, x_axis), 3.0);
  EXPECT_DOUBLE_EQ(PointLineDistance({7, 0}, x_axis), 0.0);
  const Line2 diag = Line2::FromHeading({0, 0}, std::numbers::pi / 4);
  EXPECT_NEAR(PointLineDistance({1, 1}, diag), 0.0, 1e-15);
}

TEST(LineTest, RejectsNonUnitDirection) { EXPECT_THROW(Line2({0, 0}, {2, 0}), InvalidArgument); }

TEST(SegmentLineDistanceTest, Examples) {
  const Line2 x_axis({0, 0}, {1, 0});
  EXPECT_DOUBLE_EQ(SegmentLineDistance({1, 1}, {1, -1}, x_axis), 0.0);
  EXPECT_DOUBLE_EQ(SegmentLineDistance({1, 2}, {3, 2}, x_axis), 2.0);
  EXPECT_DOUBLE_EQ(SegmentLineDistance({1, 2}, {3, 1}, x_axis), 1.0);
}

TEST(SegmentLineDistanceTest, MatchesDenseSampling) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec2 a{Uniform(rng, -5, 5), Uniform(rng, -5, 5)};
    const Vec2 b{Uniform(rng, -5, 5), Uniform(rng, -5, 5)};
    const Line2 line =
        Line2::FromHeading({Uniform(rng, -1, 1), Uniform(rng, -1, 1)}, Uniform(rng, -3, 3));
    const auto samples = testing::DenseSegment(a, b, 10000);
    const double oracle = testing::DenseSampledDistance(samples, line.origin(), line.direction());
    EXPECT_NEAR(SegmentLineDistance(a, b, line), oracle, 1e-4);
  }
}

TEST(ConvexHullTest, DropsInteriorPoint) {
  const std::vector<Vec2> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  const Polygon2 hull = ConvexHull(pts);
  EXPECT_EQ(hull.size(), 4u);
  EXPECT_DOUBLE_EQ(hull.Area(), 1.0);
}

TEST(ConvexHullTest, TriangleIsItself) {
  const std::vector<Vec2> pts = {{0, 0}, {2, 0}, {0, 1}};
  const Polygon2 hull = ConvexHull(pts);
  EXPECT_EQ(hull.size(), 3u);
  EXPECT_GT(SignedArea(hull.vertices()), 0.0);
}

TEST(ConvexHullTest, DropsCollinearEdgePoints) {
  const std::vector<Vec2> pts = {{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_EQ(ConvexHull(pts).size(), 4u);
}

TEST(ConvexHullTest, DegenerateInputs) {
  const std::vector<Vec2> two = {{0, 0}, {1, 1}};
  const std::vector<Vec2> line = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  EXPECT_THROW(ConvexHull(two), DegenerateInput);
  EXPECT_THROW(ConvexHull(line), DegenerateInput);
}

TEST(ConvexHullTest, ContainmentAndIdempotence) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vec2> pts;
    while (pts.size() < 100) {
      const Vec2 p{Uniform(rng, -1, 1), Uniform(rng, -1, 1)};
      if (Norm(p) <= 1.0) pts.push_back(p);
    }
    const Polygon2 hull = ConvexHull(pts);
    EXPECT_TRUE(hull.IsConvex());
    for (const Vec2& p : pts) EXPECT_TRUE(PointInPolygon(p, hull));
    for (const Vec2& v : hull.vertices()) {
      EXPECT_NE(std::find(pts.begin(), pts.end(), v), pts.end());
    }
    EXPECT_EQ(ConvexHull(hull.vertices()), hull);
  }
}

TEST(IntersectionAreaTest, Examples) {
  EXPECT_NEAR(PolygonIntersectionArea(UnitSquare(), UnitSquare()), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(PolygonIntersectionArea(UnitSquare(), UnitSquare({5, 5})), 0.0);
  const Polygon2 a = OrientedBox2({0, 0}, 1, 1, 0).Footprint();
  const Polygon2 b = OrientedBox2({0, 0}, 1, 1, std::numbers::pi / 4).Footprint();
  EXPECT_NEAR(PolygonIntersectionArea(a, b), 2.0 * (std::sqrt(2.0) - 1.0), 1e-12);
}

TEST(IntersectionAreaTest, RejectsNonConvex) {
  const Polygon2 l_shape({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  EXPECT_THROW(PolygonIntersectionArea(l_shape, UnitSquare()), NonConvexInput);
}

TEST(IntersectionAreaTest, BoundedAndMotionInvariant) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const OrientedBox2 a({Uniform(rng, -2, 2), Uniform(rng, -2, 2)}, Uniform(rng, 0.5, 4),
                         Uniform(rng, 0.5, 3), Uniform(rng, -3, 3));
    const OrientedBox2 b({Uniform(rng, -2, 2), Uniform(rng, -2, 2)}, Uniform(rng, 0.5, 4),
                         Uniform(rng, 0.5, 3), Uniform(rng, -3, 3));
    const double area = PolygonIntersectionArea(a.Footprint(), b.Footprint());
    EXPECT_LE(area, std::min(a.Footprint().Area(), b.Footprint().Area()) + 1e-12);
    const RigidMotion2 m{Uniform(rng, -3, 3), {Uniform(rng, -50, 50), Uniform(rng, -50, 50)}};
    EXPECT_NEAR(
        PolygonIntersectionArea(ApplyMotion(m, a.Footprint()), ApplyMotion(m, b.Footprint())), area,
        1e-9);
  }
}

TEST(BoxIouTest, Examples) {
  const OrientedBox2 a({0, 0}, 1, 1, 0);
  EXPECT_DOUBLE_EQ(BoxIouBev(a, a), 1.0);
  EXPECT_DOUBLE_EQ(BoxIouBev(a, OrientedBox2({3, 0}, 1, 1, 0)), 0.0);
  EXPECT_NEAR(BoxIouBev(a, OrientedBox2({0, 0}, 1, 1, std::numbers::pi / 4)), 0.70711, 1e-5);
}

TEST(BoxIouTest, SymmetricAndMatchesMonteCarlo) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const OrientedBox2 a({Uniform(rng, -1, 1), Uniform(rng, -1, 1)}, Uniform(rng, 1, 4),
                         Uniform(rng, 1, 3), Uniform(rng, -3, 3));
    const OrientedBox2 b({Uniform(rng, -1, 1), Uniform(rng, -1, 1)}, Uniform(rng, 1, 4),
                         Uniform(rng, 1, 3), Uniform(rng, -3, 3));
    EXPECT_NEAR(BoxIouBev(a, b), BoxIouBev(b, a), 1e-12);
    EXPECT_NEAR(BoxIouBev(a, b), testing::MonteCarloIou(a, b, 600, rng), 3e-3);
  }
}

TEST(OrientedBoxTest, ValidatesAndWrapsHeading) {
  EXPECT_THROW(OrientedBox2({0, 0}, 0.0, 1.0, 0.0), InvalidArgument);
  EXPECT_THROW(OrientedBox2({0, 0}, 1.0, -1.0, 0.0), InvalidArgument);
  EXPECT_THROW(OrientedBox2({NAN, 0}, 1.0, 1.0, 0.0), InvalidArgument);
  EXPECT_NEAR(OrientedBox2({0, 0}, 1, 1, 3 * std::numbers::pi).heading(), std::numbers::pi, 1e-12);
  EXPECT_NEAR(OrientedBox2({0, 0}, 1, 1, -std::numbers::pi).heading(), std::numbers::pi, 1e-12);
}

TEST(OrientedBoxTest, LocalWorldRoundTrip) {
  const OrientedBox2 box({3, -2}, 4, 2, 0.7);
  const Vec2 p{1.25, 8.5};
  const Vec2 q = box.ToWorld(box.ToLocal(p));
  EXPECT_NEAR(q.x, p.x, 1e-12);
  EXPECT_NEAR(q.y, p.y, 1e-12);
  const auto corners = box.Corners();
  EXPECT_NEAR(box.ToLocal(corners[0]).x, 2.0, 1e-12);
  EXPECT_NEAR(box.ToLocal(corners[0]).y, -1.0, 1e-12);
}

TEST(RigidMotionTest, Examples) {
  const Vec2 p = RigidMotion2::Identity().Apply({2, 3});
  EXPECT_EQ(p, Vec2(2, 3));
  EXPECT_EQ((RigidMotion2{0.0, {1, 0}}.Apply({0, 0})), Vec2(1, 0));
  const Vec2 r = RigidMotion2{std::numbers::pi / 2, {}}.Apply({1, 0});
  EXPECT_NEAR(r.x, 0.0, 1e-15);
  EXPECT_NEAR(r.y, 1.0, 1e-15);
}

TEST(RigidMotionTest, InverseAndRigidity) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const RigidMotion2 m{Uniform(rng, -4, 4), {Uniform(rng, -9, 9), Uniform(rng, -9, 9)}};
    const RigidMotion2 id = m.Compose(m.Inverse());
    const Vec2 p{Uniform(rng, -9, 9), Uniform(rng, -9, 9)};
    const Vec2 q{Uniform(rng, -9, 9), Uniform(rng, -9, 9)};
    EXPECT_NEAR(id.Apply(p).x, p.x, 1e-9);
    EXPECT_NEAR(id.Apply(p).y, p.y, 1e-9);
    EXPECT_NEAR(Norm(m.Apply(p) - m.Apply(q)), Norm(p - q), 1e-9);
  }
}

TEST(PointInPolygonTest, Examples) {
  EXPECT_TRUE(PointInPolygon({0.5, 0.5}, UnitSquare()));
  EXPECT_FALSE(PointInPolygon({2, 2}, UnitSquare()));
  EXPECT_TRUE(PointInPolygon({1, 1}, UnitSquare()));
  EXPECT_TRUE(PointInPolygon({1 + 5e-10, 0.5}, UnitSquare()));
  EXPECT_FALSE(PointInPolygon({1 + 1e-6, 0.5}, UnitSquare()));
}

TEST(PolygonTest, RejectsSelfIntersection) {
  EXPECT_THROW(Polygon2({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), InvalidArgument);
}

TEST(PolygonsOverlapTest, TouchingAndNonConvex) {
  EXPECT_TRUE(PolygonsOverlap(UnitSquare(), UnitSquare({1.5, 0.5})));
  EXPECT_FALSE(PolygonsOverlap(UnitSquare(), UnitSquare({1.6, 0.5})));
  const Polygon2 l_shape({{0, 0}, {3, 0}, {3, 1}, {1, 1}, {1, 3}, {0, 3}});
  EXPECT_FALSE(PolygonsOverlap(l_shape, UnitSquare({2.2, 2.2})));
  EXPECT_TRUE(PolygonsOverlap(l_shape, UnitSquare({0.5, 2.5})));
}

TEST(SamplePerimeterTest, EvenArcLength) {
  const PointSet pts = SamplePerimeter(UnitSquare(), 8);
  ASSERT_EQ(pts.size(), 8u);
  EXPECT_EQ(pts[0], UnitSquare().vertices()[0]);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 d = pts[(i + 1) % pts.size()] - pts[i];
    EXPECT_NEAR(std::abs(d.x) + std::abs(d.y), 0.5, 1e-12);
  }
}

TEST(BoundaryTest, RejectsEmptyPointSet) { EXPECT_THROW(Boundary::Points({}), InvalidArgument); }

}  // namespace
}  // namespace egosde
