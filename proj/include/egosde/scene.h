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
#ifndef EGOSDE_SCENE_H_
#define EGOSDE_SCENE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "egosde/geom.h"

namespace egosde {

// Crop padding applied along both box dimensions when gathering object
// points from a detection box.
inline constexpr double kDefaultCropPadding = 0.30;
inline constexpr double kDefaultFramePeriod = 0.1;
// Perimeter samples used as the ground-truth boundary when a track has no
// aggregated points.
inline constexpr int kFallbackBoundarySamples = 256;

struct EgoPose {
  double t = 0.0;
  Vec2 center;
  double heading = 0.0;

  // Line through the ego center along the heading.
  Line2 LateralLine() const { return Line2::FromHeading(center, heading); }
  // Line through the ego center perpendicular to the heading.
  Line2 LongitudinalLine() const { return Line2(center, {-std::sin(heading), std::cos(heading)}); }

  bool operator==(const EgoPose&) const = default;
};

struct ObjectFrame {
  OrientedBox2 box;
  PointSet points;  // sensor-visible points at this frame, world frame

  bool operator==(const ObjectFrame&) const = default;
};

struct TrackedObject {
  std::string track_id;
  std::map<int, ObjectFrame> frames;
  // World-frame surface points accumulated over the whole track, registered
  // at ReferenceFrame() (the first annotated frame).
  PointSet aggregated_points;

  int ReferenceFrame() const { return frames.begin()->first; }
  const ObjectFrame* FrameAt(int frame) const {
    const auto it = frames.find(frame);
    return it == frames.end() ? nullptr : &it->second;
  }

  bool operator==(const TrackedObject&) const = default;
};

struct Detection {
  int frame_index = 0;
  OrientedBox2 box;
  double score = 0.0;
  std::optional<Polygon2> contour;

  // Contour when present, otherwise the box footprint.
  Polygon2 Shape() const { return contour ? *contour : box.Footprint(); }

  bool operator==(const Detection&) const = default;
};

struct Scene {
  std::vector<EgoPose> ego;  // index == frame index
  std::vector<TrackedObject> objects;
  std::vector<Detection> detections;
  double frame_period = kDefaultFramePeriod;

  int num_frames() const { return static_cast<int>(ego.size()); }

  // Frame whose timestamp is `t` seconds after `frame`, if any.
  std::optional<int> FrameAtOffset(int frame, double t) const;

  // Indices into `detections`, grouped by frame.
  std::vector<std::vector<int>> DetectionsByFrame() const;

  // Union of all objects' visible points at `frame` (the frame point cloud).
  PointSet FramePoints(int frame) const;

  bool operator==(const Scene&) const = default;
};

// Index of the pose whose timestamp is `t` seconds after ego[frame], matched
// within 1e-6 s (relative above 1 s).
std::optional<int> FrameAtOffset(std::span<const EgoPose> ego, int frame, double t);

// Mean spacing of the ego timestamps; kDefaultFramePeriod for a single pose.
double DeriveFramePeriod(std::span<const EgoPose> ego);

// Motion m with m(a.center) == b.center and rotation == wrapped heading delta.
RigidMotion2 RigidMotionBetween(const OrientedBox2& a, const OrientedBox2& b);

// Ground-truth boundary surrogate of `track` at `frame`: aggregated points
// moved by the track's box motion, or box perimeter samples when the track
// has none. Throws MissingFrame if the track has no box at `frame`.
PointSet GtBoundaryPoints(const TrackedObject& track, int frame);

// JSONL scene I/O. Parsing throws ParseError (with line number) for malformed
// records and ValidationError (with field path) for invariant breaches.
Scene ParseScene(std::istream& in);
Scene LoadScene(const std::filesystem::path& path);
void WriteScene(const Scene& scene, std::ostream& out);
std::string SerializeScene(const Scene& scene);
void SaveScene(const Scene& scene, const std::filesystem::path& path);

// Checks cross-record invariants; throws ValidationError.
void ValidateScene(const Scene& scene);

struct SynthConfig {
  int num_objects = 20;
  int num_frames = 100;
  double frame_period = kDefaultFramePeriod;
  double ego_speed = 8.0;      // m/s
  double ego_curvature = 0.0;  // 1/m; 0 drives straight

  // Detection perturbation (standard deviations).
  double translation_noise = 0.0;  // m
  double heading_noise = 0.0;      // rad
  double size_noise = 0.0;         // m
  double size_bias = 0.0;          // m added to length and width
  // Noise is multiplied by 1 + far_noise_gain * range / 20 m.
  double far_noise_gain = 0.0;
  double false_positive_rate = 0.0;  // expected spurious boxes per frame
  double miss_rate = 0.0;

  // Only the half of each object facing the ego is visible when set.
  bool half_visible = true;
  int aggregated_samples = 256;
  int visible_samples = 64;  // perimeter samples per frame before culling
  double near_lane_fraction = 0.5;

  // Sets translation/size noise to `level` meters and heading noise to
  // 0.2 * level radians.
  void SetNoise(double level);
  void Validate() const;  // throws InvalidConfig
};

// Deterministic for a given (config, seed).
Scene SynthScene(const SynthConfig& config, std::uint64_t seed);

}  // namespace egosde

#endif  // EGOSDE_SCENE_H_
