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
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "egosde/error.h"
#include "egosde/scene.h"

namespace egosde {
namespace {

// Distribution helpers built directly on the engine's bits so that scenes are
// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  double Normal(double sigma) {
    if (sigma == 0.0) return 0.0;
    const double u1 = 1.0 - Uniform();  // (0, 1]
    const double u2 = Uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  bool Bernoulli(double p) { return Uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// Arc-length parameterized reference path shared by the ego and the lanes.
struct Path {
  double curvature;

  double Heading(double s) const { return curvature * s; }
  Vec2 Point(double s) const {
    if (std::abs(curvature) < 1e-12) return {s, 0.0};
    return {std::sin(curvature * s) / curvature, (1.0 - std::cos(curvature * s)) / curvature};
  }
  Vec2 Offset(double s, double lateral) const {
    const double h = Heading(s);
    return Point(s) + Vec2{-std::sin(h), std::cos(h)} * lateral;
  }
};

struct Lane {
  double lat_lo;
  double lat_hi;
  double side;
  double speed = 0.0;
};

struct ObjectPlan {
  int lane;
  double s0;
  double lateral;
  double length;
  double width;
  double heading_offset;
};

constexpr double kMinSpacing = 8.0;  // m between objects sharing a lane

}  // namespace

void SynthConfig::SetNoise(double level) {
  translation_noise = level;
  size_noise = level;
  heading_noise = 0.2 * level;
}

void SynthConfig::Validate() const {
  const auto fail = [](const std::string& what) { throw InvalidConfig(what); };
  if (num_objects <= 0) fail("num_objects must be > 0");
  if (num_frames <= 0) fail("num_frames must be > 0");
  if (!(frame_period > 0)) fail("frame_period must be > 0");
  if (!(ego_speed >= 0) || !std::isfinite(ego_speed)) fail("ego_speed must be >= 0");
  if (!std::isfinite(ego_curvature)) fail("ego_curvature must be finite");
  for (double v :
       {translation_noise, heading_noise, size_noise, far_noise_gain, false_positive_rate}) {
    if (!(v >= 0) || !std::isfinite(v)) fail("noise parameters must be finite and >= 0");
  }
  if (!std::isfinite(size_bias)) fail("size_bias must be finite");
  if (!(miss_rate >= 0 && miss_rate < 1)) fail("miss_rate must be in [0, 1)");
  if (aggregated_samples <= 0) fail("aggregated_samples must be > 0");
  if (visible_samples <= 0) fail("visible_samples must be > 0");
  if (!(near_lane_fraction >= 0 && near_lane_fraction <= 1)) {
    fail("near_lane_fraction must be in [0, 1]");
  }
}

Scene SynthScene(const SynthConfig& config, std::uint64_t seed) {
  config.Validate();
  Rng rng(seed);
  const Path path{config.ego_curvature};
  const double duration = config.frame_period * (config.num_frames - 1);

  Scene scene;
  scene.ego.reserve(config.num_frames);
  for (int f = 0; f < config.num_frames; ++f) {
    const double t = f * config.frame_period;
    const double s = config.ego_speed * t;
    scene.ego.push_back({t, path.Point(s), WrapAngle(path.Heading(s))});
  }
  scene.frame_period = DeriveFramePeriod(scene.ego);

  // Near lanes graze the extended ego footprint; the others are clear of it.
  std::vector<Lane> lanes = {{2.2, 3.2, 1.0},  {2.2, 3.2, -1.0},  {6.0, 7.6, 1.0},
                             {6.0, 7.6, -1.0}, {10.5, 15.0, 1.0}, {10.5, 15.0, -1.0}};
  for (Lane& lane : lanes) lane.speed = rng.Uniform(0.0, 0.8 * config.ego_speed);

  const double s_lo = -15.0;
  const double s_hi = std::max(60.0, config.ego_speed * duration + 15.0);
  std::vector<ObjectPlan> plans;
  for (int i = 0; i < config.num_objects; ++i) {
    const bool near = rng.Bernoulli(config.near_lane_fraction);
    const int side = rng.Bernoulli(0.5) ? 0 : 1;
    int lane = near ? side : 2 + 2 * static_cast<int>(rng.Uniform() < 0.5) + side;
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const double s0 = rng.Uniform(s_lo, s_hi);
      const bool clear = std::none_of(plans.begin(), plans.end(), [&](const ObjectPlan& p) {
        return p.lane == lane && std::abs(p.s0 - s0) < kMinSpacing;
      });
      if (!clear) {
        // Spill over to another lane of the same kind before retrying.
        if (attempt % 10 == 9) lane = near ? (lane ^ 1) : 2 + (lane - 1) % 4;
        continue;
      }
      const Lane& l = lanes[lane];
      plans.push_back({lane, s0, l.side * rng.Uniform(l.lat_lo, l.lat_hi), rng.Uniform(3.8, 5.2),
                       rng.Uniform(1.7, 2.1), rng.Normal(0.03)});
      placed = true;
    }
    if (!placed) throw InvalidConfig("too many objects for the synthetic road layout");
  }

  for (std::size_t i = 0; i < plans.size(); ++i) {
    const ObjectPlan& plan = plans[i];
    TrackedObject obj;
    obj.track_id = "obj_" + std::to_string(i);
    for (int f = 0; f < config.num_frames; ++f) {
      const double s = plan.s0 + lanes[plan.lane].speed * f * config.frame_period;
      const OrientedBox2 box(path.Offset(s, plan.lateral), plan.length, plan.width,
                             path.Heading(s) + plan.heading_offset);
      const PointSet perimeter =
          SamplePerimeter(box.Footprint(), config.visible_samples, rng.Uniform());
      PointSet visible;
      const Vec2 to_ego = scene.ego[f].center - box.center();
      for (const Vec2& p : perimeter) {
        if (!config.half_visible || Dot(p - box.center(), to_ego) >= 0.0) visible.push_back(p);
      }
      obj.frames.emplace(f, ObjectFrame{box, std::move(visible)});
    }
    obj.aggregated_points =
        SamplePerimeter(obj.frames.begin()->second.box.Footprint(), config.aggregated_samples);
    scene.objects.push_back(std::move(obj));
  }

  for (int f = 0; f < config.num_frames; ++f) {
    const EgoPose& ego = scene.ego[f];
    for (const TrackedObject& obj : scene.objects) {
      if (config.miss_rate > 0 && rng.Bernoulli(config.miss_rate)) continue;
      const OrientedBox2& gt = obj.frames.at(f).box;
      const double range = Norm(gt.center() - ego.center);
      const double gain = 1.0 + config.far_noise_gain * range / 20.0;
      const Vec2 dc{rng.Normal(gain * config.translation_noise),
                    rng.Normal(gain * config.translation_noise)};
      const double dh = rng.Normal(gain * config.heading_noise);
      const double dl = config.size_bias + rng.Normal(gain * config.size_noise);
      const double dw = config.size_bias + rng.Normal(gain * config.size_noise);
      const OrientedBox2 box(gt.center() + dc, std::max(0.5, gt.length() + dl),
                             std::max(0.5, gt.width() + dw), gt.heading() + dh);
      // Scores fall off with the displacement of the box boundary.
      const double error =
          Norm(dc) + 0.5 * (std::abs(dl) + std::abs(dw)) + 0.5 * gt.length() * std::abs(dh);
      const double score = 0.05 + 0.9 * std::exp(-error / 0.3) + 0.05 * rng.Uniform();
      scene.detections.push_back({f, box, std::min(score, 1.0), std::nullopt});
    }
    const double fp_rate = config.false_positive_rate;
    const int fp_count =
        static_cast<int>(std::floor(fp_rate)) + (rng.Bernoulli(fp_rate - std::floor(fp_rate)));
    for (int k = 0; k < fp_count; ++k) {
      const double range = rng.Uniform(5.0, 40.0);
      const double bearing = rng.Uniform(-std::numbers::pi, std::numbers::pi);
      const OrientedBox2 box(ego.center + Vec2{std::cos(bearing), std::sin(bearing)} * range,
                             rng.Uniform(3.8, 5.2), rng.Uniform(1.7, 2.1),
                             rng.Uniform(-std::numbers::pi, std::numbers::pi));
      scene.detections.push_back({f, box, rng.Uniform(0.05, 0.4), std::nullopt});
    }
  }
  ValidateScene(scene);
  return scene;
}

}  // namespace egosde
