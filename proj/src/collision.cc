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
#include "egosde/collision.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>

#include "egosde/apeval.h"
#include "egosde/error.h"
#include "egosde/parallel.h"
#include "egosde/sde.h"

namespace egosde {
namespace {

constexpr double kContainmentTolerance = 1e-9;

double Mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double Median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct PairSweep {
  // [frame] -> pairs of that detection frame, ordered by track then t.
  std::vector<std::vector<PairOutcome>> by_frame;
  int beyond_scene = 0;
  int beyond_track = 0;
};

// Shared walk over (track, frame, t). `shapes` may be empty, in which case
// only GT labels are produced.
PairSweep SweepPairs(const Scene& scene, std::span<const Polygon2> shapes,
                     const std::vector<std::vector<int>>& matches, const EgoDims& dims,
                     const CollisionConfig& cfg, bool with_metrics, int jobs) {
  dims.Validate();
  cfg.Validate();
  const int num_frames = scene.num_frames();
  const int num_objects = static_cast<int>(scene.objects.size());
  const std::vector<double> offsets = cfg.Offsets();

  std::vector<OrientedBox2> ego_boxes;
  std::vector<Polygon2> ego_polys;
  for (const EgoPose& pose : scene.ego) {
    ego_boxes.push_back(ExtendedEgoBox(pose, dims, cfg.ego_scale));
    ego_polys.push_back(ego_boxes.back().Footprint());
  }

  // GT labels depend only on the future frame, so compute them once.
  std::vector<std::vector<char>> gt_hit(num_objects, std::vector<char>(num_frames, 0));
  ParallelFor(num_frames, jobs, [&](int f) {
    for (int o = 0; o < num_objects; ++o) {
      if (scene.objects[o].FrameAt(f) == nullptr) continue;
      gt_hit[o][f] = PointsHitEgo(GtBoundaryPoints(scene.objects[o], f), ego_boxes[f]);
    }
  });

  PairSweep sweep;
  sweep.by_frame.resize(num_frames);
  std::vector<int> beyond_scene(num_frames, 0);
  std::vector<int> beyond_track(num_frames, 0);
  ParallelFor(num_frames, jobs, [&](int f0) {
    for (int o = 0; o < num_objects; ++o) {
      const TrackedObject& track = scene.objects[o];
      const ObjectFrame* start = track.FrameAt(f0);
      if (start == nullptr) continue;
      const int det = matches.empty() ? -1 : matches[o][f0];
      std::optional<Boundary> pred_boundary;
      double iou = std::numeric_limits<double>::quiet_NaN();
      double sde0 = std::numeric_limits<double>::quiet_NaN();
      if (det >= 0) {
        pred_boundary = Boundary::Poly(shapes[det]);
        if (with_metrics) {
          iou = BoxIouBev(scene.detections[det].box, start->box);
          sde0 = SdeAt(*pred_boundary, track, scene.ego, f0, 0.0).sde;
        }
      }
      for (double t : offsets) {
        const std::optional<int> f = scene.FrameAtOffset(f0, t);
        if (!f) {
          ++beyond_scene[f0];
          continue;
        }
        const ObjectFrame* end = track.FrameAt(*f);
        if (end == nullptr) {
          ++beyond_track[f0];
          continue;
        }
        PairOutcome p;
        p.track_id = track.track_id;
        p.frame = f0;
        p.t_offset = t;
        p.gt = gt_hit[o][*f] != 0;
        p.detection = det;
        if (det >= 0) {
          const RigidMotion2 motion = RigidMotionBetween(start->box, end->box);
          p.pred = PolygonsOverlap(ApplyMotion(motion, shapes[det]), ego_polys[*f]);
          if (with_metrics) {
            p.iou = iou;
            p.sde = sde0;
            p.sde_at_t = t == 0.0 ? sde0 : SdeAt(*pred_boundary, track, scene.ego, f0, t).sde;
          }
        }
        sweep.by_frame[f0].push_back(std::move(p));
      }
    }
  });
  for (int f = 0; f < num_frames; ++f) {
    sweep.beyond_scene += beyond_scene[f];
    sweep.beyond_track += beyond_track[f];
  }
  return sweep;
}

// Reorders the per-frame sweep into (track, frame, t) order.
std::vector<PairOutcome> TrackMajor(const Scene& scene, PairSweep& sweep) {
  std::vector<std::vector<PairOutcome>> by_track(scene.objects.size());
  std::map<std::string, std::size_t> index;
  for (std::size_t o = 0; o < scene.objects.size(); ++o) index[scene.objects[o].track_id] = o;
  for (auto& frame : sweep.by_frame) {
    for (PairOutcome& p : frame) by_track[index.at(p.track_id)].push_back(std::move(p));
  }
  std::vector<PairOutcome> out;
  for (auto& pairs : by_track) {
    for (PairOutcome& p : pairs) out.push_back(std::move(p));
  }
  return out;
}

std::vector<CollisionEvent> EventsOf(const std::vector<PairOutcome>& pairs, EventKind kind) {
  std::vector<CollisionEvent> events;
  for (const PairOutcome& p : pairs) {
    if (kind == EventKind::kGt ? p.gt : p.pred) {
      events.push_back({p.track_id, p.frame, kind, p.t_offset});
    }
  }
  return events;
}

GroupStats Summarize(std::string name, const std::vector<const PairOutcome*>& members) {
  GroupStats g;
  g.name = std::move(name);
  g.events = static_cast<int>(members.size());
  std::vector<double> iou, sde, sde_t;
  for (const PairOutcome* p : members) {
    if (p->detection < 0) continue;
    ++g.with_detection;
    iou.push_back(p->iou);
    sde.push_back(p->sde);
    sde_t.push_back(p->sde_at_t);
  }
  g.mean_iou = Mean(iou);
  g.median_iou = Median(iou);
  g.mean_sde = Mean(sde);
  g.median_sde = Median(sde);
  g.mean_sde_at_t = Mean(sde_t);
  g.median_sde_at_t = Median(sde_t);
  return g;
}

}  // namespace

void EgoDims::Validate() const {
  if (!(length > 0) || !(width > 0) || !std::isfinite(length) || !std::isfinite(width)) {
    throw InvalidConfig("ego length and width must be finite and > 0");
  }
}

void CollisionConfig::Validate() const {
  if (!(ego_scale >= 1) || !std::isfinite(ego_scale)) {
    throw InvalidConfig("ego scale must be finite and >= 1");
  }
  if (!(horizon > 0) || !std::isfinite(horizon)) {
    throw InvalidConfig("horizon must be finite and > 0");
  }
  if (!(step > 0) || !std::isfinite(step)) throw InvalidConfig("step must be finite and > 0");
}

std::vector<double> CollisionConfig::Offsets() const {
  Validate();
  const int count = static_cast<int>(std::floor(horizon / step + 1e-9));
  std::vector<double> out;
  out.reserve(count + 1);
  for (int k = 0; k <= count; ++k) out.push_back(k * step);
  return out;
}

OrientedBox2 ExtendedEgoBox(const EgoPose& pose, const EgoDims& dims, double scale) {
  return OrientedBox2(pose.center, dims.length * scale, dims.width * scale, pose.heading);
}

bool PointsHitEgo(std::span<const Vec2> points, const OrientedBox2& ego_box) {
  const double hx = 0.5 * ego_box.length() + kContainmentTolerance;
  const double hy = 0.5 * ego_box.width() + kContainmentTolerance;
  return std::any_of(points.begin(), points.end(), [&](const Vec2& p) {
    const Vec2 local = ego_box.ToLocal(p);
    return std::abs(local.x) <= hx && std::abs(local.y) <= hy;
  });
}

std::vector<std::vector<int>> MatchTracks(const Scene& scene, int* unmatched_detections, int jobs) {
  const int num_frames = scene.num_frames();
  std::vector<std::vector<int>> matches(scene.objects.size(), std::vector<int>(num_frames, -1));
  const std::vector<std::vector<int>> by_frame = scene.DetectionsByFrame();
  std::vector<int> unmatched(num_frames, 0);
  MatchConfig cfg;
  cfg.criterion = Criterion::kIou;
  ParallelFor(num_frames, jobs, [&](int f) {
    std::vector<MatchGt> gts;
    std::vector<int> object_of;
    for (std::size_t o = 0; o < scene.objects.size(); ++o) {
      if (const ObjectFrame* frame = scene.objects[o].FrameAt(f)) {
        gts.push_back({frame->box, {}, RigidMotion2::Identity()});
        object_of.push_back(static_cast<int>(o));
      }
    }
    std::vector<MatchDetection> dets;
    for (int i : by_frame[f]) {
      const Detection& d = scene.detections[i];
      dets.push_back({i, d.score, d.box, d.box.Footprint()});
    }
    for (const MatchRecord& r : Match(dets, gts, cfg, scene.ego[f])) {
      if (r.gt >= 0) {
        matches[object_of[r.gt]][f] = r.detection;
      } else {
        ++unmatched[f];
      }
    }
  });
  if (unmatched_detections != nullptr) {
    *unmatched_detections = 0;
    for (int u : unmatched) *unmatched_detections += u;
  }
  return matches;
}

std::vector<CollisionEvent> GtCollisions(const Scene& scene, const EgoDims& dims,
                                         const CollisionConfig& cfg, int jobs) {
  PairSweep sweep = SweepPairs(scene, {}, {}, dims, cfg, false, jobs);
  return EventsOf(TrackMajor(scene, sweep), EventKind::kGt);
}

std::vector<CollisionEvent> PredCollisions(const Scene& scene, std::span<const Polygon2> shapes,
                                           const EgoDims& dims, const CollisionConfig& cfg,
                                           int jobs, int* unmatched_detections) {
  if (shapes.size() != scene.detections.size()) {
    throw InvalidArgument("one shape per detection required");
  }
  const auto matches = MatchTracks(scene, unmatched_detections, jobs);
  PairSweep sweep = SweepPairs(scene, shapes, matches, dims, cfg, false, jobs);
  return EventsOf(TrackMajor(scene, sweep), EventKind::kPredicted);
}

CollisionStudy RunCollisionStudy(const Scene& scene, std::span<const Polygon2> shapes,
                                 const EgoDims& dims, const CollisionConfig& cfg, int jobs) {
  if (shapes.size() != scene.detections.size()) {
    throw InvalidArgument("one shape per detection required");
  }
  CollisionStudy study;
  const auto matches = MatchTracks(scene, &study.unmatched_detections, jobs);
  PairSweep sweep = SweepPairs(scene, shapes, matches, dims, cfg, true, jobs);
  study.pairs_beyond_scene = sweep.beyond_scene;
  study.pairs_beyond_track = sweep.beyond_track;
  study.pairs = TrackMajor(scene, sweep);

  std::vector<const PairOutcome*> tp, fp_fn;
  for (const PairOutcome& p : study.pairs) {
    if (p.gt && p.pred) {
      tp.push_back(&p);
    } else if (p.gt != p.pred) {
      fp_fn.push_back(&p);
    }
  }
  study.tp_group = Summarize("tp", tp);
  study.fp_fn_group = Summarize("fp_fn", fp_fn);

  for (double t : cfg.Offsets()) {
    TimeRow row;
    row.t = t;
    std::vector<double> iou, sde;
    for (const PairOutcome& p : study.pairs) {
      if (p.t_offset != t) continue;
      ++row.pairs;
      row.tp += p.gt && p.pred;
      row.fp += !p.gt && p.pred;
      row.fn += p.gt && !p.pred;
      if (p.detection >= 0) {
        iou.push_back(p.iou);
        sde.push_back(p.sde_at_t);
      }
    }
    const int events = row.tp + row.fp + row.fn;
    if (events > 0) row.cda = static_cast<double>(row.tp) / events;
    row.mean_iou = Mean(iou);
    row.mean_sde = Mean(sde);
    study.per_t.push_back(row);
  }
  return study;
}

void WriteGroupCsv(std::ostream& out, const CollisionStudy& study) {
  out << "group,events,with_detection,mean_iou,median_iou,mean_sde,median_sde,mean_sde_at_t,"
         "median_sde_at_t,empty\n";
  for (const GroupStats* g : {&study.tp_group, &study.fp_fn_group}) {
    out << g->name << ',' << g->events << ',' << g->with_detection << ','
        << FormatNumber(g->mean_iou) << ',' << FormatNumber(g->median_iou) << ','
        << FormatNumber(g->mean_sde) << ',' << FormatNumber(g->median_sde) << ','
        << FormatNumber(g->mean_sde_at_t) << ',' << FormatNumber(g->median_sde_at_t) << ','
        << (g->empty() ? "true" : "false") << '\n';
  }
}

void WriteTimeCsv(std::ostream& out, const CollisionStudy& study) {
  out << "t,cda,mean_iou,mean_sde,tp,fp,fn,pairs\n";
  for (const TimeRow& r : study.per_t) {
    out << FormatNumber(r.t) << ',' << FormatNumber(r.cda) << ',' << FormatNumber(r.mean_iou) << ','
        << FormatNumber(r.mean_sde) << ',' << r.tp << ',' << r.fp << ',' << r.fn << ',' << r.pairs
        << '\n';
  }
}

}  // namespace egosde
