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
#ifndef EGOSDE_APEVAL_H_
#define EGOSDE_APEVAL_H_

#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "egosde/geom.h"
#include "egosde/scene.h"

namespace egosde {

enum class Criterion { kSde, kIou };

struct MatchConfig {
  Criterion criterion = Criterion::kSde;
  double sde_threshold = 0.20;  // m; a detection is TP iff SDE < threshold
  double iou_threshold = 0.70;  // TP iff IoU >= threshold
  double match_radius = 2.0;    // m; center distance gate for IoU matching

  void Validate() const;  // throws InvalidConfig
};

struct WeightConfig {
  double beta = 3.0;

  void Validate() const;  // throws InvalidConfig
};

// Manhattan distances below this are clamped before weighting.
inline constexpr double kMinWeightDistance = 0.5;

// |dx| + |dy| of `p` relative to the ego center, in the ego's own axes.
double ManhattanDistance(const Vec2& p, const EgoPose& ego);
// max(d, kMinWeightDistance)^-beta.
double DistanceWeight(double manhattan, double beta);

struct MatchDetection {
  int index = 0;  // caller's identifier, echoed in MatchRecord
  double score = 0.0;
  OrientedBox2 box;
  Polygon2 shape;
};

struct MatchGt {
  OrientedBox2 box;
  PointSet boundary;  // ground-truth surface points at the detection frame
  // Carries detection-frame geometry to the evaluation frame.
  RigidMotion2 motion = RigidMotion2::Identity();
};

struct MatchRecord {
  int detection = 0;  // MatchDetection::index
  int gt = -1;        // index into the GT span, -1 when unmatched
  double quality = std::numeric_limits<double>::quiet_NaN();  // SDE or IoU
  bool tp = false;
};

// Greedy one-to-one matching. Detections are visited by descending score
// (input order breaks ties); each takes the unmatched GT with the smallest
// SDE at `eval_pose` (accepted only when below the threshold) or, for the IoU
// criterion, the nearest unmatched GT center within the match radius.
// Records come back in visiting order.
std::vector<MatchRecord> Match(std::span<const MatchDetection> detections,
                               std::span<const MatchGt> gts, const MatchConfig& cfg,
                               const EgoPose& eval_pose);

// One evaluated detection.
struct EvalOutcome {
  int detection = 0;  // index into scene.detections
  int frame = 0;
  double score = 0.0;
  bool tp = false;
  bool matched = false;
  double quality = std::numeric_limits<double>::quiet_NaN();
  double range = 0.0;      // Euclidean range used for bucketing
  double manhattan = 0.0;  // distance used for weighting
};

struct EvalGt {
  std::string track_id;
  int frame = 0;
  double range = 0.0;
  double manhattan = 0.0;
};

// Match results pooled over every frame that has a pose `t` seconds ahead.
struct EvalSet {
  MatchConfig config;
  double t = 0.0;
  std::vector<EvalOutcome> outcomes;
  std::vector<EvalGt> gts;
  int frames_evaluated = 0;
  int gts_without_future = 0;  // no box at the evaluation frame
  int gts_without_points = 0;  // no aggregated points
  int detections_ignored = 0;  // unmatched, next to an excluded GT
};

// `shapes` are index-aligned with scene.detections. GT without a box at the
// evaluation frame or without aggregated points is excluded, and unmatched
// detections within the match radius of such a GT are ignored. Throws
// MissingFrame when no frame has a pose `t` seconds ahead.
EvalSet Evaluate(const Scene& scene, std::span<const Polygon2> shapes, const MatchConfig& cfg,
                 double t = 0.0, int jobs = 0);

struct Bucket {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  bool Contains(double range) const { return range >= lo && range < hi; }
  std::string Label() const;  // "0-5", "20-inf"; "all" for [0, inf)
  bool operator==(const Bucket&) const = default;
};

struct PrPoint {
  double precision = 0.0;
  double recall = 0.0;
  double score = 0.0;  // threshold: detections with score >= this are kept
};

struct APResult {
  double ap = std::numeric_limits<double>::quiet_NaN();
  std::vector<PrPoint> pr_points;  // by descending threshold
  std::string key;
  bool defined = false;  // false when the bucket holds no GT weight
  double gt_weight = 0.0;
  int num_gt = 0;
  int num_tp = 0;  // at the lowest threshold
  int num_fp = 0;
  int capped = 0;  // instances whose weight distance was clamped
};

struct ScoredOutcome {
  double score = 0.0;
  double tp_weight = 0.0;
  double fp_weight = 0.0;
};

// Precision/recall at every distinct score threshold, monotone precision
// envelope, trapezoidal area over recall starting from recall 0 at the
// first envelope precision.
APResult ApFromOutcomes(std::vector<ScoredOutcome> outcomes, double gt_weight);

// Unweighted when `beta` is empty, otherwise inverse-distance weighted.
APResult Accumulate(const EvalSet& set, std::optional<double> beta, const Bucket& bucket = {});

// Convenience wrappers over Evaluate with each detection's stored shape
// (contour when present, box footprint otherwise).
APResult Ap(const Scene& scene, const MatchConfig& cfg, double t = 0.0);
APResult Apd(const Scene& scene, const MatchConfig& cfg, const WeightConfig& w, double t = 0.0);

enum class MetricKind { kSdeAp, kSdeApd, kIouAp, kIouApd };

// "sde-ap", "sde-apd", "iou-ap", "iou-apd"; throws InvalidConfig.
MetricKind ParseMetric(std::string_view name);
std::string MetricName(MetricKind kind);

struct ReportSpec {
  std::vector<MetricKind> metrics = {MetricKind::kSdeAp};
  std::vector<Bucket> buckets = {Bucket{}};
  std::vector<double> t_list = {0.0};
  std::vector<double> deltas = {0.20};
  std::vector<double> betas = {3.0};
  double iou_threshold = 0.70;
  double match_radius = 2.0;

  void Validate() const;  // throws InvalidConfig
};

struct ReportRow {
  MetricKind metric = MetricKind::kSdeAp;
  Bucket bucket;
  double t = 0.0;
  double delta = 0.0;  // SDE threshold, or the IoU threshold for IoU metrics
  std::optional<double> beta;
  APResult result;
};

// One row per metric x t x threshold x beta x bucket (in that nesting order).
// Thresholds come from `deltas` for SDE metrics; IoU metrics use the single
// IoU threshold. Beta applies to weighted metrics only.
std::vector<ReportRow> BreakdownReport(const Scene& scene, std::span<const Polygon2> shapes,
                                       const ReportSpec& spec, int jobs = 0);

// Parses "0,5,10,20,40" into consecutive half-open buckets; "inf" is allowed
// as the last edge. Throws InvalidConfig.
std::vector<Bucket> ParseBuckets(std::string_view edges);

// CSV columns: metric,bucket,t,delta,beta,ap
void WriteApCsv(std::ostream& out, std::span<const ReportRow> rows);
// CSV columns: metric,bucket,t,delta,beta,score,precision,recall
void WritePrCsv(std::ostream& out, std::span<const ReportRow> rows);

// Shortest round-trip-safe decimal form; "nan" and "inf" for non-finite.
std::string FormatNumber(double v);

}  // namespace egosde

#endif  // EGOSDE_APEVAL_H_
