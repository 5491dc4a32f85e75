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

#include <algorithm>
#include <numbers>
#include <sstream>
#include <tuple>

#include "egosde/error.h"

namespace egosde {
namespace {

constexpr double kUnitTolerance = 1e-9;
constexpr double kBoundaryTolerance = 1e-9;
constexpr double kSliverArea = 1e-12;
constexpr double kHullCollinearSine = 1e-9;

bool SegmentsIntersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d,
                       double tolerance) {
  const double d1 = Cross(b - a, c - a);
  const double d2 = Cross(b - a, d - a);
  const double d3 = Cross(d - c, a - c);
  const double d4 = Cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return PointSegmentDistance(c, a, b) <= tolerance || PointSegmentDistance(d, a, b) <= tolerance ||
         PointSegmentDistance(a, c, d) <= tolerance || PointSegmentDistance(b, c, d) <= tolerance;
}

void CheckFinite(std::span<const Vec2> pts, const char* what) {
  for (const Vec2& p : pts) {
    if (!IsFinite(p)) throw InvalidArgument(std::string(what) + ": non-finite coordinate");
  }
}

// Keeps the part of `subject` on the left of the directed edge a->b.
std::vector<Vec2> ClipByHalfPlane(const std::vector<Vec2>& subject, const Vec2& a, const Vec2& b) {
  std::vector<Vec2> out;
  out.reserve(subject.size() + 2);
  const Vec2 edge = b - a;
  const std::size_t n = subject.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& cur = subject[i];
    const Vec2& nxt = subject[(i + 1) % n];
    const double sc = Cross(edge, cur - a);
    const double sn = Cross(edge, nxt - a);
    if (sc >= 0) out.push_back(cur);
    if ((sc >= 0) != (sn >= 0)) {
      const double t = sc / (sc - sn);
      out.push_back(cur + (nxt - cur) * t);
    }
  }
  return out;
}

}  // namespace

Vec2 MakeVec2(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw InvalidArgument("Vec2 components must be finite");
  }
  return {x, y};
}

double WrapAngle(double angle) {
  constexpr double kPi = std::numbers::pi;
  double wrapped = std::remainder(angle, 2.0 * kPi);
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

Line2::Line2(const Vec2& origin, const Vec2& direction) : origin_(origin), direction_(direction) {
  if (!IsFinite(origin) || !IsFinite(direction)) {
    throw InvalidArgument("Line2: non-finite origin or direction");
  }
  if (std::abs(Norm(direction) - 1.0) > kUnitTolerance) {
    throw InvalidArgument("Line2: direction must be unit length");
  }
}

Line2 Line2::FromHeading(const Vec2& origin, double heading) {
  return Line2(origin, {std::cos(heading), std::sin(heading)});
}

double SignedArea(std::span<const Vec2> ring) {
  double twice = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    twice += Cross(ring[i], ring[(i + 1) % n]);
  }
  return 0.5 * twice;
}

Polygon2::Polygon2(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw InvalidArgument("Polygon2: needs at least 3 vertices");
  CheckFinite(vertices_, "Polygon2");
  if (!(SignedArea(vertices_) > 0.0)) {
    throw InvalidArgument("Polygon2: vertices must be counter-clockwise with positive area");
  }
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share a vertex by construction.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (SegmentsIntersect(a, b, vertices_[j], vertices_[(j + 1) % n], 0.0)) {
        std::ostringstream msg;
        msg << "Polygon2: edges " << i << " and " << j << " intersect";
        throw InvalidArgument(msg.str());
      }
    }
  }
}

Polygon2 Polygon2::FromTrustedCcw(std::vector<Vec2> vertices) {
  return Polygon2(std::move(vertices), Trusted{});
}

double Polygon2::Area() const { return SignedArea(vertices_); }

bool Polygon2::IsConvex() const {
  const std::size_t n = vertices_.size();
  const double scale = std::max(1.0, std::sqrt(std::abs(Area())));
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % n];
    const Vec2& c = vertices_[(i + 2) % n];
    if (Cross(b - a, c - b) < -1e-12 * scale * scale) return false;
  }
  return true;
}

OrientedBox2::OrientedBox2(const Vec2& center, double length, double width, double heading)
    : center_(center), length_(length), width_(width), heading_(WrapAngle(heading)) {
  if (!IsFinite(center) || !std::isfinite(length) || !std::isfinite(width) ||
      !std::isfinite(heading)) {
    throw InvalidArgument("OrientedBox2: non-finite field");
  }
  if (!(length > 0.0)) throw InvalidArgument("OrientedBox2: length must be > 0");
  if (!(width > 0.0)) throw InvalidArgument("OrientedBox2: width must be > 0");
}

std::array<Vec2, 4> OrientedBox2::Corners() const {
  const double hl = 0.5 * length_;
  const double hw = 0.5 * width_;
  return {ToWorld({hl, -hw}), ToWorld({hl, hw}), ToWorld({-hl, hw}), ToWorld({-hl, -hw})};
}

Polygon2 OrientedBox2::Footprint() const {
  const auto corners = Corners();
  return Polygon2::FromTrustedCcw({corners.begin(), corners.end()});
}

Vec2 OrientedBox2::ToLocal(const Vec2& world) const { return Rotate(world - center_, -heading_); }

Vec2 OrientedBox2::ToWorld(const Vec2& local) const { return Rotate(local, heading_) + center_; }

RigidMotion2 RigidMotion2::Compose(const RigidMotion2& other) const {
  return {WrapAngle(rotation + other.rotation), Apply(other.translation)};
}

RigidMotion2 RigidMotion2::Inverse() const {
  return {WrapAngle(-rotation), -Rotate(translation, -rotation)};
}

Boundary Boundary::Points(PointSet points) {
  if (points.empty()) throw InvalidArgument("Boundary: point set must be non-empty");
  CheckFinite(points, "Boundary");
  return Boundary(std::move(points));
}

Boundary Boundary::Poly(Polygon2 polygon) { return Boundary(std::move(polygon)); }

double PointLineDistance(const Vec2& p, const Line2& line) {
  return std::abs(line.SignedDistance(p));
}

double SegmentLineDistance(const Vec2& a, const Vec2& b, const Line2& line) {
  const double da = line.SignedDistance(a);
  const double db = line.SignedDistance(b);
  if ((da <= 0 && db >= 0) || (da >= 0 && db <= 0)) return 0.0;
  return std::min(std::abs(da), std::abs(db));
}

double PointSegmentDistance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = Dot(ab, ab);
  if (len2 == 0.0) return Norm(p - a);
  const double t = std::clamp(Dot(p - a, ab) / len2, 0.0, 1.0);
  return Norm(p - (a + ab * t));
}

Polygon2 ConvexHull(std::span<const Vec2> points) {
  if (points.size() < 3) throw DegenerateInput("convex hull needs at least 3 points");
  CheckFinite(points, "ConvexHull");
  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(),
            [](const Vec2& a, const Vec2& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw DegenerateInput("convex hull needs 3 distinct points");

  // Turns flatter than kHullCollinearSine count as collinear, so samples of a
  // straight edge that picked up rounding noise do not become hull vertices.
  const auto keeps_turning_left = [](const Vec2& a, const Vec2& b, const Vec2& p) {
    const Vec2 u = b - a;
    const Vec2 v = p - a;
    return Cross(u, v) > kHullCollinearSine * Norm(u) * Norm(v);
  };
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && !keeps_turning_left(hull[k - 2], hull[k - 1], p)) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    const Vec2& p = pts[i];
    while (k >= lower && !keeps_turning_left(hull[k - 2], hull[k - 1], p)) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  if (hull.size() < 3 || !(SignedArea(hull) > 0.0)) {
    throw DegenerateInput("convex hull of collinear points");
  }
  return Polygon2::FromTrustedCcw(std::move(hull));
}

double PolygonIntersectionArea(const Polygon2& p, const Polygon2& q) {
  if (!p.IsConvex() || !q.IsConvex()) {
    throw NonConvexInput("polygon intersection requires convex inputs");
  }
  std::vector<Vec2> clipped = p.vertices();
  const auto& clip = q.vertices();
  for (std::size_t i = 0; i < clip.size() && !clipped.empty(); ++i) {
    clipped = ClipByHalfPlane(clipped, clip[i], clip[(i + 1) % clip.size()]);
  }
  if (clipped.size() < 3) return 0.0;
  const double area = SignedArea(clipped);
  return area < kSliverArea ? 0.0 : area;
}

double BoxIouBev(const OrientedBox2& a, const OrientedBox2& b) {
  // Fixed argument order makes the result exactly symmetric.
  const auto key = [](const OrientedBox2& box) {
    return std::make_tuple(box.center().x, box.center().y, box.length(), box.width(),
                           box.heading());
  };
  const bool swap = key(b) < key(a);
  const OrientedBox2& first = swap ? b : a;
  const OrientedBox2& second = swap ? a : b;
  const double inter = PolygonIntersectionArea(first.Footprint(), second.Footprint());
  const double uni = a.length() * a.width() + b.length() * b.width() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

bool PointInPolygon(const Vec2& p, const Polygon2& polygon) {
  const auto& v = polygon.vertices();
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (PointSegmentDistance(p, v[j], v[i]) <= kBoundaryTolerance) return true;
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x_cross = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool PolygonsOverlap(const Polygon2& a, const Polygon2& b) {
  if (PointInPolygon(a.vertices().front(), b) || PointInPolygon(b.vertices().front(), a)) {
    return true;
  }
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  for (std::size_t i = 0; i < va.size(); ++i) {
    const Vec2& a0 = va[i];
    const Vec2& a1 = va[(i + 1) % va.size()];
    for (std::size_t j = 0; j < vb.size(); ++j) {
      if (SegmentsIntersect(a0, a1, vb[j], vb[(j + 1) % vb.size()], kBoundaryTolerance)) {
        return true;
      }
    }
  }
  return false;
}

PointSet ApplyMotion(const RigidMotion2& m, std::span<const Vec2> points) {
  PointSet out;
  out.reserve(points.size());
  const double c = std::cos(m.rotation);
  const double s = std::sin(m.rotation);
  for (const Vec2& p : points) {
    out.push_back({c * p.x - s * p.y + m.translation.x, s * p.x + c * p.y + m.translation.y});
  }
  return out;
}

Polygon2 ApplyMotion(const RigidMotion2& m, const Polygon2& polygon) {
  return Polygon2::FromTrustedCcw(ApplyMotion(m, std::span<const Vec2>(polygon.vertices())));
}

Boundary ApplyMotion(const RigidMotion2& m, const Boundary& boundary) {
  if (boundary.is_polygon()) return Boundary::Poly(ApplyMotion(m, boundary.polygon()));
  return Boundary::Points(ApplyMotion(m, std::span<const Vec2>(boundary.points())));
}

PointSet SamplePerimeter(const Polygon2& polygon, int count, double phase) {
  if (count <= 0) throw InvalidArgument("SamplePerimeter: count must be positive");
  const auto& v = polygon.vertices();
  const std::size_t n = v.size();
  std::vector<double> cumulative(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cumulative[i + 1] = cumulative[i] + Norm(v[(i + 1) % n] - v[i]);
  }
  const double perimeter = cumulative[n];
  const double spacing = perimeter / count;
  PointSet out;
  out.reserve(count);
  std::size_t edge = 0;
  for (int k = 0; k < count; ++k) {
    const double s = (k + phase) * spacing;
    while (edge + 1 < n && cumulative[edge + 1] <= s) ++edge;
    const double len = cumulative[edge + 1] - cumulative[edge];
    const double t = len > 0 ? (s - cumulative[edge]) / len : 0.0;
    out.push_back(v[edge] + (v[(edge + 1) % n] - v[edge]) * t);
  }
  return out;
}

}  // namespace egosde
