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
// Independent reference implementations used as oracles by the tests. They
// favor obviousness over speed and share no code paths with the library
// beyond the plain data types.

#ifndef EGOSDE_TESTS_TEST_UTIL_H_
#define EGOSDE_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "egosde/geom.h"
#include "egosde/scene.h"
#include "egosde/starpoly.h"

namespace egosde::testing {

inline double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline bool InBox(const Vec2& p, const OrientedBox2& b) {
  const double c = std::cos(b.heading());
  const double s = std::sin(b.heading());
  const Vec2 d = p - b.center();
  const double x = c * d.x + s * d.y;
  const double y = -s * d.x + c * d.y;
  return std::abs(x) <= 0.5 * b.length() && std::abs(y) <= 0.5 * b.width();
}

// Jittered-grid Monte Carlo estimate of the BEV IoU of two boxes: one
// uniformly drawn sample per cell of an m x m grid over the joint bounding
// square.
inline double MonteCarloIou(const OrientedBox2& a, const OrientedBox2& b, int m,
                            std::mt19937_64& rng) {
  double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
  for (const OrientedBox2* box : {&a, &b}) {
    for (const Vec2& c : box->Corners()) {
      lo_x = std::min(lo_x, c.x);
      lo_y = std::min(lo_y, c.y);
      hi_x = std::max(hi_x, c.x);
      hi_y = std::max(hi_y, c.y);
    }
  }
  const double hx = (hi_x - lo_x) / m;
  const double hy = (hi_y - lo_y) / m;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  long inter = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const Vec2 p{lo_x + (i + u(rng)) * hx, lo_y + (j + u(rng)) * hy};
      inter += InBox(p, a) && InBox(p, b);
    }
  }
  const double inter_area = static_cast<double>(inter) * hx * hy;
  const double area_a = a.length() * a.width();
  const double area_b = b.length() * b.width();
  return inter_area / (area_a + area_b - inter_area);
}

// Signed distance of p to the line through `origin` with direction `dir`
// (left positive), from first principles.
inline double SignedLineDistance(const Vec2& p, const Vec2& origin, const Vec2& dir) {
  const double n = std::hypot(dir.x, dir.y);
  return (dir.x * (p.y - origin.y) - dir.y * (p.x - origin.x)) / n;
}

// Minimum |distance| over a dense sampling; 0 when samples straddle the line.
inline double DenseSampledDistance(std::span<const Vec2> samples, const Vec2& origin,
                                   const Vec2& dir) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& p : samples) {
    const double d = SignedLineDistance(p, origin, dir);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    best = std::min(best, std::abs(d));
  }
  return lo <= 0.0 && hi >= 0.0 ? 0.0 : best;
}

inline std::vector<Vec2> DenseSegment(const Vec2& a, const Vec2& b, int n) {
  std::vector<Vec2> out;
  out.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
  }
  return out;
}

// Closed-boundary samples with spacing at most `step`.
inline std::vector<Vec2> DenseBoundary(std::span<const Vec2> ring, double step) {
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % ring.size()];
    const int n = std::max(1, static_cast<int>(std::ceil(std::hypot(b.x - a.x, b.y - a.y) / step)));
    for (int k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / n;
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

inline double SegmentPointDistance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

inline double DistanceToRing(const Vec2& p, std::span<const Vec2> ring) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ring.size(); ++i) {
    best = std::min(best, SegmentPointDistance(p, ring[i], ring[(i + 1) % ring.size()]));
  }
  return best;
}

// Symmetric Hausdorff distance between two closed rings, sampling each at
// `step` and measuring exactly to the other's edges.
inline double Hausdorff(std::span<const Vec2> a, std::span<const Vec2> b, double step) {
  double h = 0.0;
  for (const Vec2& p : DenseBoundary(a, step)) h = std::max(h, DistanceToRing(p, b));
  for (const Vec2& p : DenseBoundary(b, step)) h = std::max(h, DistanceToRing(p, a));
  return h;
}

// Wedge of x by linear scan: the unique i with x strictly clockwise-or-on
// d_i and strictly counter-clockwise of d_{i+1}.
inline int LinearScanWedge(const std::vector<Vec2>& dirs, const Vec2& x) {
  const int n = static_cast<int>(dirs.size());
  for (int i = 0; i < n; ++i) {
    const Vec2& l = dirs[i];
    const Vec2& r = dirs[(i + 1) % n];
    const double cl = l.x * x.y - l.y * x.x;  // l cross x
    const double xr = x.x * r.y - x.y * r.x;  // x cross r
    const bool on_l = std::abs(cl) <= 1e-15 * std::hypot(x.x, x.y) && l.x * x.x + l.y * x.y > 0;
    if (on_l || (cl < 0 && xr < 0)) return i;
  }
  return -1;
}

// s(x) from the vertex form (x cross v_r + v_l cross x) / (v_l cross v_r).
inline double VertexFormS(const std::vector<Vec2>& dirs, const std::vector<double>& radii,
                          const Vec2& x) {
  const int n = static_cast<int>(dirs.size());
  const int l = LinearScanWedge(dirs, x);
  const int r = (l + 1) % n;
  const Vec2 vl{dirs[l].x * radii[l], dirs[l].y * radii[l]};
  const Vec2 vr{dirs[r].x * radii[r], dirs[r].y * radii[r]};
  const auto cross = [](const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; };
  return (cross(x, vr) + cross(vl, x)) / cross(vl, vr);
}

struct OracleLoss {
  double coverage = 0.0;
  double accuracy = 0.0;
  double tightness = 0.0;
  double total = 0.0;
};

inline OracleLoss ComputeOracleLoss(const std::vector<Vec2>& dirs, const std::vector<double>& radii,
                                    const std::vector<Vec2>& cover,
                                    const std::vector<Vec2>& boundary, double w_acc,
                                    double w_tight) {
  OracleLoss o;
  for (const Vec2& x : cover) o.coverage += std::max(VertexFormS(dirs, radii, x) - 1.0, 0.0);
  for (const Vec2& x : boundary) o.accuracy += std::abs(VertexFormS(dirs, radii, x) - 1.0);
  for (double c : radii) o.tightness += std::abs(c);
  o.coverage /= cover.size();
  o.accuracy /= boundary.size();
  o.tightness /= radii.size();
  o.total = o.coverage + w_acc * o.accuracy + w_tight * o.tightness;
  return o;
}

struct OracleOutcome {
  double score;
  bool tp;
  double weight;  // applied to the TP or FP count
};

// AP by brute force: every distinct score is tried as a threshold and the
// counts are recomputed from scratch by filtering.
inline double ExhaustiveThresholdAp(const std::vector<OracleOutcome>& outcomes, double gt_weight) {
  std::vector<double> thresholds;
  for (const OracleOutcome& o : outcomes) thresholds.push_back(o.score);
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  std::vector<double> precision, recall;
  for (double tau : thresholds) {
    double tp = 0.0, fp = 0.0;
    for (const OracleOutcome& o : outcomes) {
      if (o.score < tau) continue;
      (o.tp ? tp : fp) += o.weight;
    }
    precision.push_back(tp + fp > 0 ? tp / (tp + fp) : 0.0);
    recall.push_back(std::min(tp / gt_weight, 1.0));
  }
  // Interpolated precision: best precision at this or any lower threshold.
  std::vector<double> interp(precision.size());
  for (std::size_t i = 0; i < precision.size(); ++i) {
    interp[i] = *std::max_element(precision.begin() + i, precision.end());
  }
  double area = 0.0;
  for (std::size_t i = 0; i < interp.size(); ++i) {
    const double r0 = i == 0 ? 0.0 : recall[i - 1];
    const double p0 = i == 0 ? interp[0] : interp[i - 1];
    area += (recall[i] - r0) * (interp[i] + p0) / 2.0;
  }
  return area;
}

// Straight ego drive along +x.
inline std::vector<EgoPose> StraightEgo(int frames, double speed, double period = 0.1) {
  std::vector<EgoPose> ego;
  for (int f = 0; f < frames; ++f) ego.push_back({f * period, {speed * f * period, 0.0}, 0.0});
  return ego;
}

// Track that moves with constant velocity and heading, with perimeter
// samples of its first box as aggregated points and the full outline as
// per-frame points.
inline TrackedObject ConstantVelocityTrack(const std::string& id, const OrientedBox2& box0,
                                           const Vec2& velocity, int frames, double period = 0.1,
                                           int samples = 128) {
  TrackedObject t;
  t.track_id = id;
  for (int f = 0; f < frames; ++f) {
    const OrientedBox2 box(box0.center() + velocity * (f * period), box0.length(), box0.width(),
                           box0.heading());
    t.frames.emplace(f, ObjectFrame{box, SamplePerimeter(box.Footprint(), samples)});
  }
  t.aggregated_points = SamplePerimeter(box0.Footprint(), samples);
  return t;
}

}  // namespace egosde::testing

#endif  // EGOSDE_TESTS_TEST_UTIL_H_
