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
#include "egosde/starpoly.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "egosde/error.h"

namespace egosde {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinStep = 1e-12;
// Points this close to the contour count as sitting on it.
constexpr double kKinkTolerance = 1e-9;

double ClockwiseAngle(double from, const Vec2& v) {
  double angle = from - std::atan2(v.y, v.x);
  if (angle < 0.0) angle += kTwoPi;
  if (angle >= kTwoPi) angle -= kTwoPi;
  return angle;
}

// Loss with the wedge coordinates of every point precomputed: for x in wedge
// (l, r), x = a d_l + b d_r, so s(x) = a / c_l + b / c_r.
class LossModel {
 public:
  LossModel(const DirectionSet& directions, std::span<const Vec2> cover,
            std::span<const Vec2> boundary, const LossWeights& weights)
      : n_(directions.size()),
        weights_(weights),
        cover_(Prepare(directions, cover)),
        boundary_(Prepare(directions, boundary)) {}

  LossTerms Evaluate(std::span<const double> radii) const {
    LossTerms t;
    if (!cover_.empty()) {
      double sum = 0.0;
      for (const Term& p : cover_) sum += std::max(Excess(p, radii), 0.0);
      t.coverage = sum / static_cast<double>(cover_.size());
    }
    if (!boundary_.empty()) {
      double sum = 0.0;
      for (const Term& p : boundary_) sum += std::abs(Excess(p, radii));
      t.accuracy = sum / static_cast<double>(boundary_.size());
    }
    double radius_sum = 0.0;
    for (double c : radii) radius_sum += std::abs(c);
    t.tightness = radius_sum / static_cast<double>(n_);
    t.total = t.coverage + weights_.accuracy * t.accuracy + weights_.tightness * t.tightness;
    return t;
  }

  // One-sided derivative from the positive side at every kink. With
  // `descent`, points within kKinkTolerance of the contour contribute nothing,
  // so points resting on the contour do not block the line search.
  void Gradient(std::span<const double> radii, std::span<double> out, bool descent = false) const {
    const double tol = descent ? kKinkTolerance : 0.0;
    for (int i = 0; i < n_; ++i) {
      out[i] = weights_.tightness * (radii[i] >= 0.0 ? 1.0 : -1.0) / n_;
    }
    if (!cover_.empty()) {
      const double w = 1.0 / static_cast<double>(cover_.size());
      for (const Term& p : cover_) {
        const double e = Excess(p, radii);
        if (descent ? e > tol : e >= 0.0) Accumulate(p, radii, w, out);
      }
    }
    if (!boundary_.empty() && weights_.accuracy != 0.0) {
      const double w = weights_.accuracy / static_cast<double>(boundary_.size());
      for (const Term& p : boundary_) {
        const double e = Excess(p, radii);
        if (descent && std::abs(e) <= tol) continue;
        Accumulate(p, radii, e >= 0.0 ? w : -w, out);
      }
    }
  }

  bool empty_cover() const { return cover_.empty(); }

 private:
  struct Term {
    int l;
    int r;
    double a;
    double b;
  };

  static std::vector<Term> Prepare(const DirectionSet& directions, std::span<const Vec2> pts) {
    std::vector<Term> terms;
    terms.reserve(pts.size());
    for (const Vec2& x : pts) {
      if (Norm(x) <= kCenterTolerance) continue;
      const auto [l, r] = directions.WedgeOf(x);
      const Vec2& dl = directions[l];
      const Vec2& dr = directions[r];
      const double denom = Cross(dl, dr);
      terms.push_back({l, r, Cross(x, dr) / denom, Cross(dl, x) / denom});
    }
    return terms;
  }

  static double Excess(const Term& p, std::span<const double> radii) {
    return p.a / radii[p.l] + p.b / radii[p.r] - 1.0;
  }

  static void Accumulate(const Term& p, std::span<const double> radii, double weight,
                         std::span<double> out) {
    const double cl = radii[p.l];
    const double cr = radii[p.r];
    out[p.l] -= weight * p.a / (cl * cl);
    out[p.r] -= weight * p.b / (cr * cr);
  }

  int n_;
  LossWeights weights_;
  std::vector<Term> cover_;
  std::vector<Term> boundary_;
};

}  // namespace

DirectionSet::DirectionSet(std::vector<Vec2> directions) : directions_(std::move(directions)) {
  const std::size_t n = directions_.size();
  if (n < 8) throw InvalidArgument("DirectionSet: need at least 8 directions");
  for (const Vec2& d : directions_) {
    if (!IsFinite(d) || std::abs(Norm(d) - 1.0) > 1e-9) {
      throw InvalidArgument("DirectionSet: directions must be finite unit vectors");
    }
  }
  const double start = std::atan2(directions_[0].y, directions_[0].x);
  clockwise_angle_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(Cross(directions_[i], directions_[(i + 1) % n]) < 0.0)) {
      throw InvalidArgument("DirectionSet: directions must turn strictly clockwise");
    }
    clockwise_angle_.push_back(i == 0 ? 0.0 : ClockwiseAngle(start, directions_[i]));
    if (i > 0 && !(clockwise_angle_[i] > clockwise_angle_[i - 1])) {
      throw InvalidArgument("DirectionSet: directions must wind exactly once");
    }
  }
}

std::shared_ptr<const DirectionSet> DirectionSet::Square(int n) {
  if (n < 8) throw InvalidArgument("square direction set needs n >= 8");
  std::vector<Vec2> dirs;
  dirs.reserve(n);
  // Perimeter of the square [-1/2, 1/2]^2 walked clockwise from (1/2, 0).
  for (int k = 0; k < n; ++k) {
    const double u = 4.0 * k / n;
    Vec2 tip;
    if (u < 0.5) {
      tip = {0.5, -u};
    } else if (u < 1.5) {
      tip = {0.5 - (u - 0.5), -0.5};
    } else if (u < 2.5) {
      tip = {-0.5, -0.5 + (u - 1.5)};
    } else if (u < 3.5) {
      tip = {-0.5 + (u - 2.5), 0.5};
    } else {
      tip = {0.5, 0.5 - (u - 3.5)};
    }
    dirs.push_back(tip / Norm(tip));
  }
  return std::make_shared<const DirectionSet>(std::move(dirs));
}

DirectionSet::Wedge DirectionSet::WedgeOf(const Vec2& x) const {
  if (Norm(x) <= kCenterTolerance) {
    throw DegenerateAtCenter("point coincides with the star polygon center");
  }
  const double start = std::atan2(directions_[0].y, directions_[0].x);
  const double angle = ClockwiseAngle(start, x);
  const auto it = std::upper_bound(clockwise_angle_.begin(), clockwise_angle_.end(), angle);
  const int l = static_cast<int>(it - clockwise_angle_.begin()) - 1;
  return {l, (l + 1) % size()};
}

StarPolygon::StarPolygon(std::shared_ptr<const DirectionSet> directions, std::vector<double> radii,
                         Vec2 center)
    : directions_(std::move(directions)), radii_(std::move(radii)), center_(center) {
  if (!directions_) throw InvalidArgument("StarPolygon: missing directions");
  if (static_cast<int>(radii_.size()) != directions_->size()) {
    throw InvalidArgument("StarPolygon: one radius per direction required");
  }
  for (double c : radii_) {
    if (!std::isfinite(c) || c < kMinRadius) {
      throw InvalidArgument("StarPolygon: radii must be finite and >= 1e-3");
    }
  }
}

Polygon2 StarPolygon::ToPolygon() const {
  std::vector<Vec2> ccw;
  ccw.reserve(radii_.size());
  for (int i = size() - 1; i >= 0; --i) ccw.push_back(Vertex(i));
  return Polygon2::FromTrustedCcw(std::move(ccw));
}

CanonicalCloud Canonicalize(const OrientedBox2& box, std::span<const Vec2> raw_points) {
  CanonicalCloud cloud;
  cloud.scale = 1.0 / std::max(box.length(), box.width());
  cloud.frame = {box.center(), box.heading(), cloud.scale};
  cloud.points.reserve(raw_points.size());
  for (const Vec2& p : raw_points) cloud.points.push_back(cloud.frame.ToCanonical(p));
  cloud.visible_boundary = cloud.points;
  return cloud;
}

void LossWeights::Validate() const {
  if (!(accuracy >= 0) || !std::isfinite(accuracy) || !(tightness >= 0) ||
      !std::isfinite(tightness)) {
    throw InvalidConfig("loss weights must be finite and >= 0");
  }
}

LossTerms Loss(const StarPolygon& polygon, const CanonicalCloud& cloud, const LossWeights& w) {
  w.Validate();
  PointSet cover, boundary;
  cover.reserve(cloud.points.size());
  boundary.reserve(cloud.visible_boundary.size());
  for (const Vec2& p : cloud.points) cover.push_back(p - polygon.center());
  for (const Vec2& p : cloud.visible_boundary) boundary.push_back(p - polygon.center());
  const LossModel model(polygon.directions(), cover, boundary, w);
  return model.Evaluate(polygon.radii());
}

std::vector<double> LossGradient(const StarPolygon& polygon, const CanonicalCloud& cloud,
                                 const LossWeights& w) {
  w.Validate();
  PointSet cover, boundary;
  for (const Vec2& p : cloud.points) cover.push_back(p - polygon.center());
  for (const Vec2& p : cloud.visible_boundary) boundary.push_back(p - polygon.center());
  const LossModel model(polygon.directions(), cover, boundary, w);
  std::vector<double> grad(polygon.size());
  model.Gradient(polygon.radii(), grad);
  return grad;
}

void FitOptions::Validate() const {
  if (resolution < 8) throw InvalidConfig("fit resolution must be >= 8");
  if (!(initial_step > 0)) throw InvalidConfig("fit initial_step must be > 0");
  if (!(shrink > 0 && shrink < 1)) throw InvalidConfig("fit shrink must be in (0, 1)");
  if (max_iterations < 0) throw InvalidConfig("fit max_iterations must be >= 0");
  if (!(relative_tolerance >= 0)) throw InvalidConfig("fit relative_tolerance must be >= 0");
  if (!(min_radius >= kMinRadius)) throw InvalidConfig("fit min_radius must be >= 1e-3");
}

std::vector<double> RectangleRadii(const DirectionSet& directions, double hx, double hy) {
  std::vector<double> radii;
  radii.reserve(directions.size());
  for (const Vec2& d : directions.directions()) {
    const double tx = std::abs(d.x) > 0 ? hx / std::abs(d.x) : INFINITY;
    const double ty = std::abs(d.y) > 0 ? hy / std::abs(d.y) : INFINITY;
    radii.push_back(std::min(tx, ty));
  }
  return radii;
}

FitResult FitStarPoly(const OrientedBox2& box, std::span<const Vec2> raw_points,
                      const LossWeights& weights, const FitOptions& options) {
  weights.Validate();
  options.Validate();
  CanonicalCloud cloud = Canonicalize(box, raw_points);
  if (options.symmetric_completion) {
    const std::size_t n = cloud.points.size();
    for (std::size_t i = 0; i < n; ++i) cloud.points.push_back(-cloud.points[i]);
  }

  FitResult result{box.Footprint(), {}, {}, {}, 0, false, cloud.frame};
  const auto directions = DirectionSet::Square(options.resolution);
  const LossModel model(*directions, cloud.points, cloud.visible_boundary, weights);

  const double s = cloud.scale;
  std::vector<double> radii =
      RectangleRadii(*directions, 0.5 * box.length() * s, 0.5 * box.width() * s);
  for (double& c : radii) c = std::max(c, options.min_radius);

  if (model.empty_cover()) {
    result.fell_back = true;
    result.radii = std::move(radii);
    result.final_terms = model.Evaluate(result.radii);
    result.loss_history.push_back(result.final_terms.total);
    return result;
  }

  LossTerms current = model.Evaluate(radii);
  result.loss_history.push_back(current.total);
  std::vector<double> grad(radii.size());
  std::vector<double> candidate(radii.size());
  double step = options.initial_step;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    model.Gradient(radii, grad, /*descent=*/true);
    double grad_max = 0.0;
    for (double g : grad) grad_max = std::max(grad_max, std::abs(g));
    if (grad_max == 0.0) break;

    bool accepted = false;
    LossTerms trial;
    for (; step >= kMinStep; step *= options.shrink) {
      for (std::size_t i = 0; i < radii.size(); ++i) {
        candidate[i] = std::max(radii[i] - step * grad[i] / grad_max, options.min_radius);
      }
      trial = model.Evaluate(candidate);
      if (trial.total < current.total) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    const double decrease = current.total - trial.total;
    radii.swap(candidate);
    current = trial;
    result.loss_history.push_back(current.total);
    step = std::min(step / options.shrink, options.initial_step);
    if (decrease <= options.relative_tolerance * std::abs(current.total)) {
      ++iter;
      break;
    }
  }

  result.iterations = iter;
  result.final_terms = current;
  std::vector<Vec2> ccw;
  ccw.reserve(radii.size());
  for (int i = static_cast<int>(radii.size()) - 1; i >= 0; --i) {
    ccw.push_back(cloud.frame.ToWorld((*directions)[i] * radii[i]));
  }
  result.polygon = Polygon2::FromTrustedCcw(std::move(ccw));
  result.radii = std::move(radii);
  return result;
}

}  // namespace egosde
