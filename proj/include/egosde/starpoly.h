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
#ifndef EGOSDE_STARPOLY_H_
#define EGOSDE_STARPOLY_H_

#include <memory>
#include <span>
#include <vector>

#include "egosde/geom.h"

namespace egosde {

inline constexpr int kStarPolyResolution = 256;
inline constexpr double kMinRadius = 1e-3;
// Points closer than this to the polygon center have no wedge and are
// ignored by the losses.
inline constexpr double kCenterTolerance = 1e-12;

// A fixed fan of unit directions in strictly clockwise order. Consecutive
// directions d_i, d_{i+1} bound wedge i; the last wedge wraps to d_0.
class DirectionSet {
 public:
  // Throws InvalidArgument unless there are >= 8 unit directions, each wedge
  // turns clockwise by less than pi, and the fan closes after one turn.
  explicit DirectionSet(std::vector<Vec2> directions);

  // Directions whose tips are evenly spaced along the boundary of an
  // axis-aligned square, starting at +x and proceeding clockwise.
  static std::shared_ptr<const DirectionSet> Square(int n = kStarPolyResolution);

  int size() const { return static_cast<int>(directions_.size()); }
  const Vec2& operator[](int i) const { return directions_[i]; }
  const std::vector<Vec2>& directions() const { return directions_; }

  struct Wedge {
    int l;
    int r;
    bool operator==(const Wedge&) const = default;
  };

  // Half-open wedge [d_l, d_r) containing the direction of `x`, found by
  // binary search over clockwise angles. Throws DegenerateAtCenter for
  // |x| <= kCenterTolerance.
  Wedge WedgeOf(const Vec2& x) const;

 private:
  std::vector<Vec2> directions_;
  std::vector<double> clockwise_angle_;  // from directions_[0], in [0, 2pi)
};

// Star-shaped polygon about `center`: vertex i is center + radii[i] * d_i.
class StarPolygon {
 public:
  // Throws InvalidArgument when radii do not match the directions or any
  // radius is below kMinRadius.
  StarPolygon(std::shared_ptr<const DirectionSet> directions, std::vector<double> radii,
              Vec2 center = {});

  const DirectionSet& directions() const { return *directions_; }
  std::shared_ptr<const DirectionSet> shared_directions() const { return directions_; }
  const std::vector<double>& radii() const { return radii_; }
  const Vec2& center() const { return center_; }
  int size() const { return static_cast<int>(radii_.size()); }

  Vec2 Vertex(int i) const { return center_ + (*directions_)[i] * radii_[i]; }
  DirectionSet::Wedge WedgeOf(const Vec2& x) const { return directions_->WedgeOf(x - center_); }
  // Counter-clockwise polygon (vertex order reversed).
  Polygon2 ToPolygon() const;

 private:
  std::shared_ptr<const DirectionSet> directions_;
  std::vector<double> radii_;
  Vec2 center_;
};

// Box-aligned frame with the detection center at the origin, heading along
// +x and the longest box side scaled to length 1.
struct CanonicalFrame {
  Vec2 center;
  double heading = 0.0;
  double scale = 1.0;

  Vec2 ToCanonical(const Vec2& world) const { return Rotate(world - center, -heading) * scale; }
  Vec2 ToWorld(const Vec2& canonical) const { return Rotate(canonical / scale, heading) + center; }
};

struct CanonicalCloud {
  PointSet points;            // X: points the contour must cover
  PointSet visible_boundary;  // B: points the contour should pass through
  double scale = 1.0;         // s = 1 / max(length, width)
  CanonicalFrame frame;
};

// Maps cropped world points into the box's canonical frame. Every visible
// point is a surface return, so B is the full visible set.
CanonicalCloud Canonicalize(const OrientedBox2& box, std::span<const Vec2> raw_points);

struct LossWeights {
  double accuracy = 0.1;   // weight on the visible-boundary fit
  double tightness = 0.1;  // weight on the mean radius

  void Validate() const;
};

struct LossTerms {
  double total = 0.0;
  double coverage = 0.0;
  double accuracy = 0.0;
  double tightness = 0.0;
};

// Coverage penalizes points outside the polygon, accuracy penalizes boundary
// points off the polygon edge, tightness is the mean radius:
//   s(x)      = (x cross v_r + v_l cross x) / (v_l cross v_r)
//   coverage  = mean_{x in X} max(s(x) - 1, 0)
//   accuracy  = mean_{x in B} |s(x) - 1|
//   tightness = mean_i |c_i|
LossTerms Loss(const StarPolygon& polygon, const CanonicalCloud& cloud, const LossWeights& w);

// d total / d c_i. At the clamp and absolute-value kinks the derivative from
// the positive side is used.
std::vector<double> LossGradient(const StarPolygon& polygon, const CanonicalCloud& cloud,
                                 const LossWeights& w);

struct FitOptions {
  int resolution = kStarPolyResolution;
  double initial_step = 0.05;  // largest radius change per step, canonical units
  double shrink = 0.5;
  int max_iterations = 500;
  double relative_tolerance = 1e-7;
  double min_radius = kMinRadius;
  // Adds the reflection of every visible point through the box center to the
  // coverage set, standing in for the occluded half of a symmetric object.
  // Off by default: it doubles any box-center error on the hidden side.
  bool symmetric_completion = false;

  void Validate() const;
};

struct FitResult {
  Polygon2 polygon;                  // world frame, counter-clockwise
  std::vector<double> radii;         // canonical units, clockwise direction order
  std::vector<double> loss_history;  // total loss per accepted iterate, from the start
  LossTerms final_terms;
  int iterations = 0;
  bool fell_back = false;  // no usable points; polygon is the box footprint
  CanonicalFrame frame;
};

// Per-instance StarPoly fit by projected gradient descent with backtracking.
// Radii start on the box footprint; every accepted step lowers the loss.
FitResult FitStarPoly(const OrientedBox2& box, std::span<const Vec2> raw_points,
                      const LossWeights& weights = {}, const FitOptions& options = {});

inline Polygon2 Fit(const OrientedBox2& box, std::span<const Vec2> raw_points,
                    const LossWeights& weights = {}, const FitOptions& options = {}) {
  return FitStarPoly(box, raw_points, weights, options).polygon;
}

// Radius along each direction at which the ray from the origin leaves the
// axis-aligned rectangle [-hx, hx] x [-hy, hy].
std::vector<double> RectangleRadii(const DirectionSet& directions, double hx, double hy);

}  // namespace egosde

#endif  // EGOSDE_STARPOLY_H_
