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
#ifndef EGOSDE_GEOM_H_
#define EGOSDE_GEOM_H_

#include <array>
#include <cmath>
#include <span>
#include <variant>
#include <vector>

namespace egosde {

// 2D bird's-eye-view geometry. Everything here is in meters and radians,
// counter-clockwise positive.

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_in, double y_in) : x(x_in), y(y_in) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
constexpr double Dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
// Scalar 2D cross product a.x * b.y - a.y * b.x.
constexpr double Cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double Norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline bool IsFinite(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }
inline Vec2 Rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Checked construction for values crossing an API boundary (files, bindings).
// Throws InvalidArgument on NaN/Inf.
Vec2 MakeVec2(double x, double y);

// Wraps an angle into (-pi, pi].
double WrapAngle(double angle);

class Line2 {
 public:
  // `direction` must be unit length within 1e-9.
  Line2(const Vec2& origin, const Vec2& direction);
  static Line2 FromHeading(const Vec2& origin, double heading);

  const Vec2& origin() const { return origin_; }
  const Vec2& direction() const { return direction_; }

  // Positive on the left of the direction.
  double SignedDistance(const Vec2& p) const { return Cross(direction_, p - origin_); }

 private:
  Vec2 origin_;
  Vec2 direction_;
};

// Simple counter-clockwise polygon with positive area. The public
// constructor checks simplicity in O(n^2); geometry that is simple by
// construction goes through FromTrustedCcw.
class Polygon2 {
 public:
  explicit Polygon2(std::vector<Vec2> vertices);
  static Polygon2 FromTrustedCcw(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  double Area() const;
  bool IsConvex() const;

  bool operator==(const Polygon2&) const = default;

 private:
  struct Trusted {};
  Polygon2(std::vector<Vec2> vertices, Trusted) : vertices_(std::move(vertices)) {}

  std::vector<Vec2> vertices_;
};

// Shoelace signed area; positive for counter-clockwise rings.
double SignedArea(std::span<const Vec2> ring);

class OrientedBox2 {
 public:
  // Heading is wrapped into (-pi, pi]. Throws InvalidArgument unless
  // length > 0, width > 0 and all fields are finite.
  OrientedBox2(const Vec2& center, double length, double width, double heading);

  const Vec2& center() const { return center_; }
  double length() const { return length_; }
  double width() const { return width_; }
  double heading() const { return heading_; }

  // Counter-clockwise, starting at the front-right corner.
  std::array<Vec2, 4> Corners() const;
  Polygon2 Footprint() const;

  Vec2 ToLocal(const Vec2& world) const;
  Vec2 ToWorld(const Vec2& local) const;

  bool operator==(const OrientedBox2&) const = default;

 private:
  Vec2 center_;
  double length_;
  double width_;
  double heading_;
};

// p -> R(rotation) p + translation.
struct RigidMotion2 {
  double rotation = 0.0;
  Vec2 translation;

  static RigidMotion2 Identity() { return {}; }

  Vec2 Apply(const Vec2& p) const { return Rotate(p, rotation) + translation; }
  // (this * other)(p) == this->Apply(other.Apply(p)).
  RigidMotion2 Compose(const RigidMotion2& other) const;
  RigidMotion2 Inverse() const;
};

using PointSet = std::vector<Vec2>;

// Object boundary: a sampled point set or a closed polygon.
class Boundary {
 public:
  // Throws InvalidArgument for an empty point set.
  static Boundary Points(PointSet points);
  static Boundary Poly(Polygon2 polygon);

  bool is_polygon() const { return std::holds_alternative<Polygon2>(shape_); }
  const PointSet& points() const { return std::get<PointSet>(shape_); }
  const Polygon2& polygon() const { return std::get<Polygon2>(shape_); }
  const std::variant<PointSet, Polygon2>& shape() const { return shape_; }

 private:
  explicit Boundary(std::variant<PointSet, Polygon2> shape) : shape_(std::move(shape)) {}

  std::variant<PointSet, Polygon2> shape_;
};

double PointLineDistance(const Vec2& p, const Line2& line);

// Minimum distance from segment ab to the line; 0 when the segment touches or
// crosses it.
double SegmentLineDistance(const Vec2& a, const Vec2& b, const Line2& line);

double PointSegmentDistance(const Vec2& p, const Vec2& a, const Vec2& b);

// Andrew's monotone chain. Collinear points on hull edges are dropped.
// Throws DegenerateInput for fewer than 3 points or an all-collinear input.
Polygon2 ConvexHull(std::span<const Vec2> points);

// Area of the intersection of two convex polygons by half-plane clipping.
// Slivers below 1e-12 m^2 are reported as 0. Throws NonConvexInput.
double PolygonIntersectionArea(const Polygon2& p, const Polygon2& q);

double BoxIouBev(const OrientedBox2& a, const OrientedBox2& b);

// Boundary inclusive within 1e-9.
bool PointInPolygon(const Vec2& p, const Polygon2& polygon);

// True when two simple polygons share any point (boundary inclusive within
// 1e-9). Works for non-convex polygons.
bool PolygonsOverlap(const Polygon2& a, const Polygon2& b);

PointSet ApplyMotion(const RigidMotion2& m, std::span<const Vec2> points);
Polygon2 ApplyMotion(const RigidMotion2& m, const Polygon2& polygon);
Boundary ApplyMotion(const RigidMotion2& m, const Boundary& boundary);

// `count` points evenly spaced by arc length along the closed ring, starting
// at the first vertex. `phase` in [0, 1) shifts the start by a fraction of the
// spacing.
PointSet SamplePerimeter(const Polygon2& polygon, int count, double phase = 0.0);

}  // namespace egosde

#endif  // EGOSDE_GEOM_H_
