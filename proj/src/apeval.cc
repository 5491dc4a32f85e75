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
#include "egosde/apeval.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "egosde/error.h"
#include "egosde/parallel.h"
#include "egosde/sde.h"

namespace egosde {
namespace {

// Ego pose as seen from the detection frame: measuring moved geometry
// against `pose` equals measuring unmoved geometry against the pulled-back
// pose, because support distances are rigid invariants.
EgoPose PullBack(const RigidMotion2& motion, const EgoPose& pose) {
  return {pose.t, motion.Inverse().Apply(pose.center), pose.heading - motion.rotation};
}

double SdeFromDistances(const SupportDistances& gt, const SupportDistances& pred) {
  return std::max(std::abs(gt.lat - pred.lat), std::abs(gt.lon - pred.lon));
}

bool IsWeighted(MetricKind kind) {
  return kind == MetricKind::kSdeApd || kind == MetricKind::kIouApd;
}

bool IsSde(MetricKind kind) { return kind == MetricKind::kSdeAp || kind == MetricKind::kSdeApd; }

double ParseNumber(std::string_view text, const std::string& what) {
  std::string s(text);
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidConfig(what + ": '" + s + "' is not a number");
  }
  return v;
}

}  // namespace

void MatchConfig::Validate() const {
  if (!(sde_threshold > 0) || !std::isfinite(sde_threshold)) {
    throw InvalidConfig("SDE threshold must be finite and > 0");
  }
  if (!(iou_threshold > 0 && iou_threshold <= 1)) {
    throw InvalidConfig("IoU threshold must be in (0, 1]");
  }
  if (!(match_radius > 0) || !std::isfinite(match_radius)) {
    throw InvalidConfig("match radius must be finite and > 0");
  }
}

void WeightConfig::Validate() const {
  if (!(beta >= 0) || !std::isfinite(beta)) throw InvalidConfig("beta must be finite and >= 0");
}

double ManhattanDistance(const Vec2& p, const EgoPose& ego) {
  const Vec2 local = Rotate(p - ego.center, -ego.heading);
  return std::abs(local.x) + std::abs(local.y);
}

double DistanceWeight(double manhattan, double beta) {
  return std::pow(std::max(manhattan, kMinWeightDistance), -beta);
}

std::vector<MatchRecord> Match(std::span<const MatchDetection> detections,
                               std::span<const MatchGt> gts, const MatchConfig& cfg,
                               const EgoPose& eval_pose) {
  cfg.Validate();
  std::vector<int> order(detections.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return detections[a].score > detections[b].score; });

  const bool sde = cfg.criterion == Criterion::kSde;
  std::vector<EgoPose> pulled;
  std::vector<SupportDistances> gt_sd;
  if (sde) {
    for (const MatchGt& g : gts) {
      pulled.push_back(PullBack(g.motion, eval_pose));
      gt_sd.push_back(ComputeSupportDistances(Boundary::Points(g.boundary), pulled.back()));
    }
  }

  std::vector<bool> taken(gts.size(), false);
  std::vector<MatchRecord> records;
  records.reserve(detections.size());
  for (int di : order) {
    const MatchDetection& det = detections[di];
    MatchRecord rec;
    rec.detection = det.index;
    int best = -1;
    double best_value = std::numeric_limits<double>::infinity();
    if (sde) {
      const Boundary shape = Boundary::Poly(det.shape);
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (taken[g]) continue;
        const double v = SdeFromDistances(gt_sd[g], ComputeSupportDistances(shape, pulled[g]));
        if (v < best_value) {
          best_value = v;
          best = static_cast<int>(g);
        }
      }
      if (best >= 0 && best_value < cfg.sde_threshold) {
        rec.gt = best;
        rec.quality = best_value;
        rec.tp = true;
      }
    } else {
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (taken[g]) continue;
        const double d = Norm(gts[g].box.center() - det.box.center());
        if (d <= cfg.match_radius && d < best_value) {
          best_value = d;
          best = static_cast<int>(g);
        }
      }
      if (best >= 0) {
        rec.gt = best;
        rec.quality = BoxIouBev(det.box, gts[best].box);
        rec.tp = rec.quality >= cfg.iou_threshold;
      }
    }
    if (rec.gt >= 0) taken[rec.gt] = true;
    records.push_back(rec);
  }
  return records;
}

EvalSet Evaluate(const Scene& scene, std::span<const Polygon2> shapes, const MatchConfig& cfg,
                 double t, int jobs) {
  cfg.Validate();
  if (!std::isfinite(t) || t < 0) throw InvalidConfig("evaluation offset t must be >= 0");
  if (shapes.size() != scene.detections.size()) {
    throw InvalidArgument("one shape per detection required");
  }
  const int num_frames = scene.num_frames();
  std::vector<std::optional<int>> future(num_frames);
  int supported = 0;
  for (int f = 0; f < num_frames; ++f) {
    future[f] = scene.FrameAtOffset(f, t);
    supported += future[f].has_value();
  }
  if (supported == 0) {
    throw MissingFrame("no frame has an ego pose " + FormatNumber(t) + " s ahead");
  }
  const std::vector<std::vector<int>> by_frame = scene.DetectionsByFrame();

  struct FrameResult {
    std::vector<EvalOutcome> outcomes;
    std::vector<EvalGt> gts;
    int without_future = 0;
    int without_points = 0;
    int ignored = 0;
  };
  std::vector<FrameResult> results(num_frames);
  ParallelFor(num_frames, jobs, [&](int f0) {
    if (!future[f0]) return;
    const int f = *future[f0];
    const EgoPose& pose0 = scene.ego[f0];
    const EgoPose& pose = scene.ego[f];
    FrameResult& out = results[f0];

    std::vector<MatchGt> gts;
    std::vector<const ObjectFrame*> gt_future;
    std::vector<Vec2> excluded;  // detection-frame centers of excluded GT
    for (const TrackedObject& track : scene.objects) {
      const ObjectFrame* start = track.FrameAt(f0);
      if (start == nullptr) continue;
      const ObjectFrame* end = track.FrameAt(f);
      if (end == nullptr || track.aggregated_points.empty()) {
        ++(end == nullptr ? out.without_future : out.without_points);
        excluded.push_back(start->box.center());
        continue;
      }
      gts.push_back(
          {start->box, GtBoundaryPoints(track, f0), RigidMotionBetween(start->box, end->box)});
      gt_future.push_back(end);
      const Vec2 c = end->box.center();
      out.gts.push_back({track.track_id, f0, Norm(c - pose.center), ManhattanDistance(c, pose)});
    }

    std::vector<MatchDetection> dets;
    for (int i : by_frame[f0]) {
      const Detection& d = scene.detections[i];
      dets.push_back({i, d.score, d.box, shapes[i]});
    }
    for (const MatchRecord& rec : Match(dets, gts, cfg, pose)) {
      const Detection& d = scene.detections[rec.detection];
      EvalOutcome o;
      o.detection = rec.detection;
      o.frame = f0;
      o.score = d.score;
      o.tp = rec.tp;
      o.quality = rec.quality;
      if (rec.gt >= 0) {
        o.matched = true;
        const Vec2 gt_center = gt_future[rec.gt]->box.center();
        o.range = Norm(gt_center - pose.center);
        o.manhattan = rec.tp ? ManhattanDistance(gt_center, pose)
                             : ManhattanDistance(gts[rec.gt].motion.Apply(d.box.center()), pose);
      } else {
        const bool near_excluded = std::any_of(excluded.begin(), excluded.end(), [&](Vec2 c) {
          return Norm(c - d.box.center()) <= cfg.match_radius;
        });
        if (near_excluded) {
          ++out.ignored;
          continue;
        }
        o.range = Norm(d.box.center() - pose0.center);
        o.manhattan = ManhattanDistance(d.box.center(), pose0);
      }
      out.outcomes.push_back(o);
    }
  });

  EvalSet set;
  set.config = cfg;
  set.t = t;
  set.frames_evaluated = supported;
  for (FrameResult& r : results) {
    set.outcomes.insert(set.outcomes.end(), r.outcomes.begin(), r.outcomes.end());
    set.gts.insert(set.gts.end(), r.gts.begin(), r.gts.end());
    set.gts_without_future += r.without_future;
    set.gts_without_points += r.without_points;
    set.detections_ignored += r.ignored;
  }
  return set;
}

std::string Bucket::Label() const {
  if (lo == 0.0 && std::isinf(hi)) return "all";
  return FormatNumber(lo) + "-" + FormatNumber(hi);
}

namespace {

// Neumaier-compensated sum. Matched weights are summed in score order but
// the GT total in GT order; compensation keeps full recall at exactly 1.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    compensation_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace

APResult ApFromOutcomes(std::vector<ScoredOutcome> outcomes, double gt_weight) {
  APResult r;
  r.gt_weight = gt_weight;
  for (const ScoredOutcome& o : outcomes) {
    r.num_tp += o.tp_weight > 0;
    r.num_fp += o.fp_weight > 0;
  }
  if (!(gt_weight > 0)) return r;
  r.defined = true;
  std::stable_sort(
      outcomes.begin(), outcomes.end(),
      [](const ScoredOutcome& a, const ScoredOutcome& b) { return a.score > b.score; });
  CompensatedSum tp_sum;
  CompensatedSum fp_sum;
  for (std::size_t i = 0; i < outcomes.size();) {
    const double score = outcomes[i].score;
    for (; i < outcomes.size() && outcomes[i].score == score; ++i) {
      tp_sum.Add(outcomes[i].tp_weight);
      fp_sum.Add(outcomes[i].fp_weight);
    }
    const double tp = tp_sum.value();
    const double fp = fp_sum.value();
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    r.pr_points.push_back({precision, std::min(tp / gt_weight, 1.0), score});
  }
  std::vector<double> envelope(r.pr_points.size());
  double running = 0.0;
  for (std::size_t i = r.pr_points.size(); i-- > 0;) {
    running = std::max(running, r.pr_points[i].precision);
    envelope[i] = running;
  }
  double area = 0.0;
  double prev_recall = 0.0;
  double prev_precision = envelope.empty() ? 0.0 : envelope.front();
  for (std::size_t i = 0; i < envelope.size(); ++i) {
    area += (r.pr_points[i].recall - prev_recall) * 0.5 * (envelope[i] + prev_precision);
    prev_recall = r.pr_points[i].recall;
    prev_precision = envelope[i];
  }
  r.ap = std::clamp(area, 0.0, 1.0);
  return r;
}

APResult Accumulate(const EvalSet& set, std::optional<double> beta, const Bucket& bucket) {
  if (beta) WeightConfig{*beta}.Validate();
  const auto weight = [&](double d, int& capped) {
    if (!beta) return 1.0;
    capped += d < kMinWeightDistance;
    return DistanceWeight(d, *beta);
  };
  int capped = 0;
  CompensatedSum gt_sum;
  int num_gt = 0;
  for (const EvalGt& g : set.gts) {
    if (!bucket.Contains(g.range)) continue;
    gt_sum.Add(weight(g.manhattan, capped));
    ++num_gt;
  }
  std::vector<ScoredOutcome> outcomes;
  for (const EvalOutcome& o : set.outcomes) {
    if (!bucket.Contains(o.range)) continue;
    const double w = weight(o.manhattan, capped);
    outcomes.push_back({o.score, o.tp ? w : 0.0, o.tp ? 0.0 : w});
  }
  APResult r = ApFromOutcomes(std::move(outcomes), gt_sum.value());
  r.num_gt = num_gt;
  r.capped = capped;
  r.key = bucket.Label();
  return r;
}

APResult Ap(const Scene& scene, const MatchConfig& cfg, double t) {
  std::vector<Polygon2> shapes;
  for (const Detection& d : scene.detections) shapes.push_back(d.Shape());
  return Accumulate(Evaluate(scene, shapes, cfg, t), std::nullopt);
}

APResult Apd(const Scene& scene, const MatchConfig& cfg, const WeightConfig& w, double t) {
  w.Validate();
  std::vector<Polygon2> shapes;
  for (const Detection& d : scene.detections) shapes.push_back(d.Shape());
  return Accumulate(Evaluate(scene, shapes, cfg, t), w.beta);
}

MetricKind ParseMetric(std::string_view name) {
  if (name == "sde-ap") return MetricKind::kSdeAp;
  if (name == "sde-apd") return MetricKind::kSdeApd;
  if (name == "iou-ap") return MetricKind::kIouAp;
  if (name == "iou-apd") return MetricKind::kIouApd;
  throw InvalidConfig("unknown metric '" + std::string(name) +
                      "' (expected sde-ap, sde-apd, iou-ap or iou-apd)");
}

std::string MetricName(MetricKind kind) {
  switch (kind) {
    case MetricKind::kSdeAp:
      return "sde-ap";
    case MetricKind::kSdeApd:
      return "sde-apd";
    case MetricKind::kIouAp:
      return "iou-ap";
    case MetricKind::kIouApd:
      return "iou-apd";
  }
  return "unknown";
}

void ReportSpec::Validate() const {
  if (metrics.empty() || buckets.empty() || t_list.empty() || deltas.empty() || betas.empty()) {
    throw InvalidConfig("report grids must be non-empty");
  }
  for (const Bucket& b : buckets) {
    if (!(b.lo >= 0) || !(b.hi > b.lo)) throw InvalidConfig("buckets need 0 <= lo < hi");
  }
  for (double t : t_list) {
    if (!(t >= 0) || !std::isfinite(t)) throw InvalidConfig("t must be finite and >= 0");
  }
  for (double d : deltas) MatchConfig{Criterion::kSde, d, iou_threshold, match_radius}.Validate();
  for (double b : betas) WeightConfig{b}.Validate();
}

std::vector<ReportRow> BreakdownReport(const Scene& scene, std::span<const Polygon2> shapes,
                                       const ReportSpec& spec, int jobs) {
  spec.Validate();
  std::vector<ReportRow> rows;
  for (MetricKind metric : spec.metrics) {
    const bool sde = IsSde(metric);
    const std::vector<double> thresholds = sde ? spec.deltas : std::vector{spec.iou_threshold};
    std::vector<std::optional<double>> betas;
    if (IsWeighted(metric)) {
      betas.assign(spec.betas.begin(), spec.betas.end());
    } else {
      betas.push_back(std::nullopt);
    }
    for (double t : spec.t_list) {
      for (double threshold : thresholds) {
        MatchConfig cfg;
        cfg.criterion = sde ? Criterion::kSde : Criterion::kIou;
        if (sde) cfg.sde_threshold = threshold;
        cfg.iou_threshold = spec.iou_threshold;
        cfg.match_radius = spec.match_radius;
        const EvalSet set = Evaluate(scene, shapes, cfg, t, jobs);
        for (const std::optional<double>& beta : betas) {
          for (const Bucket& bucket : spec.buckets) {
            rows.push_back({metric, bucket, t, threshold, beta, Accumulate(set, beta, bucket)});
          }
        }
      }
    }
  }
  return rows;
}

std::vector<Bucket> ParseBuckets(std::string_view edges) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= edges.size()) {
    const std::size_t comma = std::min(edges.find(',', start), edges.size());
    values.push_back(ParseNumber(edges.substr(start, comma - start), "bucket edge"));
    start = comma + 1;
  }
  if (values.size() < 2) throw InvalidConfig("buckets need at least two edges");
  std::vector<Bucket> buckets;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (!(values[i] >= 0) || !(values[i + 1] > values[i])) {
      throw InvalidConfig("bucket edges must be >= 0 and strictly increasing");
    }
    buckets.push_back({values[i], values[i + 1]});
  }
  return buckets;
}

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void WriteApCsv(std::ostream& out, std::span<const ReportRow> rows) {
  out << "metric,bucket,t,delta,beta,ap\n";
  for (const ReportRow& r : rows) {
    out << MetricName(r.metric) << ',' << r.bucket.Label() << ',' << FormatNumber(r.t) << ','
        << FormatNumber(r.delta) << ','
        << FormatNumber(r.beta ? *r.beta : std::numeric_limits<double>::quiet_NaN()) << ','
        << FormatNumber(r.result.defined ? r.result.ap : std::numeric_limits<double>::quiet_NaN())
        << '\n';
  }
}

void WritePrCsv(std::ostream& out, std::span<const ReportRow> rows) {
  out << "metric,bucket,t,delta,beta,score,precision,recall\n";
  for (const ReportRow& r : rows) {
    std::ostringstream prefix;
    prefix << MetricName(r.metric) << ',' << r.bucket.Label() << ',' << FormatNumber(r.t) << ','
           << FormatNumber(r.delta) << ','
           << FormatNumber(r.beta ? *r.beta : std::numeric_limits<double>::quiet_NaN()) << ',';
    for (const PrPoint& p : r.result.pr_points) {
      out << prefix.str() << FormatNumber(p.score) << ',' << FormatNumber(p.precision) << ','
          << FormatNumber(p.recall) << '\n';
    }
  }
}

}  // namespace egosde
