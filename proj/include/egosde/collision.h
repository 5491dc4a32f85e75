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
#ifndef EGOSDE_COLLISION_H_
#define EGOSDE_COLLISION_H_

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "egosde/geom.h"
#include "egosde/scene.h"

namespace egosde {

struct EgoDims {
  double length = 4.8;  // m
  double width = 2.0;   // m

  void Validate() const;  // throws InvalidConfig
};

struct CollisionConfig {
  double ego_scale = 1.8;  // the ego footprint is grown by 80%
  double horizon = 10.0;   // s
  double step = 1.0;       // s

  void Validate() const;  // throws InvalidConfig
  // 0, step, 2 step, ... up to and including the horizon.
  std::vector<double> Offsets() const;
};

enum class EventKind { kGt, kPredicted };

// A collision between the extended ego and one object, `t_offset` seconds
// after the detection frame `frame`.
struct CollisionEvent {
  std::string track_id;
  int frame = 0;
  EventKind kind = EventKind::kGt;
  double t_offset = 0.0;

  bool operator==(const CollisionEvent&) const = default;
};

// Ego footprint at `pose`, both dimensions multiplied by `scale`.
OrientedBox2 ExtendedEgoBox(const EgoPose& pose, const EgoDims& dims, double scale);

// Boundary-inclusive (1e-9 m) containment in the extended ego box.
bool PointsHitEgo(std::span<const Vec2> points, const OrientedBox2& ego_box);

// Detection index matched to each (track, frame), by nearest center within
// 2 m in descending score order; -1 when unmatched. Indexed as
// [object][frame].
std::vector<std::vector<int>> MatchTracks(const Scene& scene, int* unmatched_detections = nullptr,
                                          int jobs = 0);

// Events for every (track, frame, t) whose future frame exists and carries a
// box: GT iff a ground-truth boundary point at frame + t lies in the extended
// ego box at that frame. Ordered by track, frame, t.
std::vector<CollisionEvent> GtCollisions(const Scene& scene, const EgoDims& dims,
                                         const CollisionConfig& cfg, int jobs = 0);

// As above, for the matched detection's shape (index-aligned `shapes`)
// carried forward by the track's box motion and tested for overlap with the
// extended ego box. Detections matched to no track are skipped and counted.
std::vector<CollisionEvent> PredCollisions(const Scene& scene, std::span<const Polygon2> shapes,
                                           const EgoDims& dims, const CollisionConfig& cfg,
                                           int jobs = 0, int* unmatched_detections = nullptr);

// One (track, frame, t) evaluation.
struct PairOutcome {
  std::string track_id;
  int frame = 0;
  double t_offset = 0.0;
  bool gt = false;
  bool pred = false;
  int detection = -1;  // matched detection, -1 if none
  double iou = std::numeric_limits<double>::quiet_NaN();
  double sde = std::numeric_limits<double>::quiet_NaN();       // at the detection frame
  double sde_at_t = std::numeric_limits<double>::quiet_NaN();  // at frame + t
};

struct GroupStats {
  std::string name;
  int events = 0;
  int with_detection = 0;  // events that carry IoU/SDE values
  double mean_iou = std::numeric_limits<double>::quiet_NaN();
  double median_iou = std::numeric_limits<double>::quiet_NaN();
  double mean_sde = std::numeric_limits<double>::quiet_NaN();
  double median_sde = std::numeric_limits<double>::quiet_NaN();
  double mean_sde_at_t = std::numeric_limits<double>::quiet_NaN();
  double median_sde_at_t = std::numeric_limits<double>::quiet_NaN();

  bool empty() const { return with_detection == 0; }
};

struct TimeRow {
  double t = 0.0;
  int pairs = 0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double cda = std::numeric_limits<double>::quiet_NaN();  // tp / (tp + fp + fn)
  double mean_iou = std::numeric_limits<double>::quiet_NaN();
  double mean_sde = std::numeric_limits<double>::quiet_NaN();  // SDE at frame + t
};

struct CollisionStudy {
  std::vector<PairOutcome> pairs;  // ordered by track, frame, t
  GroupStats tp_group;
  GroupStats fp_fn_group;
  std::vector<TimeRow> per_t;
  int unmatched_detections = 0;
  int pairs_beyond_scene = 0;  // future frame past the last ego pose
  int pairs_beyond_track = 0;  // track has no box at the future frame
};

CollisionStudy RunCollisionStudy(const Scene& scene, std::span<const Polygon2> shapes,
                                 const EgoDims& dims, const CollisionConfig& cfg, int jobs = 0);

// CSV columns: group,events,with_detection,mean_iou,median_iou,mean_sde,
// median_sde,mean_sde_at_t,median_sde_at_t,empty
void WriteGroupCsv(std::ostream& out, const CollisionStudy& study);
// CSV columns: t,cda,mean_iou,mean_sde,tp,fp,fn,pairs
void WriteTimeCsv(std::ostream& out, const CollisionStudy& study);

}  // namespace egosde

#endif  // EGOSDE_COLLISION_H_
