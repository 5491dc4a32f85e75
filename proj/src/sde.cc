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
#include "egosde/sde.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "egosde/error.h"

namespace egosde {
namespace {

double BoundaryLineDistance(const Boundary& boundary, const Line2& line) {
  if (boundary.is_polygon()) {
    const auto& v = boundary.polygon().vertices();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
      best = std::min(best, SegmentLineDistance(v[i], v[(i + 1) % v.size()], line));
      if (best == 0.0) break;
    }
    return best;
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Vec2& p : boundary.points()) {
    const double d = line.SignedDistance(p);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  if (lo <= 0.0 && hi >= 0.0) return 0.0;
  return lo > 0.0 ? lo : -hi;
}

double Median(std::vector<double> values) {
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

SupportDistances ComputeSupportDistances(const Boundary& boundary, const EgoPose& ego) {
  return {BoundaryLineDistance(boundary, ego.LateralLine()),
          BoundaryLineDistance(boundary, ego.LongitudinalLine())};
}

SdeRecord ComputeSde(const Boundary& pred, const Boundary& gt, const EgoPose& ego) {
  const SupportDistances p = ComputeSupportDistances(pred, ego);
  const SupportDistances g = ComputeSupportDistances(gt, ego);
  SdeRecord r;
  r.sde_lat_signed = g.lat - p.lat;
  r.sde_lon_signed = g.lon - p.lon;
  r.sde = std::max(std::abs(r.sde_lat_signed), std::abs(r.sde_lon_signed));
  r.flagged = p.lat == 0.0 && p.lon == 0.0 && g.lat == 0.0 && g.lon == 0.0;
  return r;
}

SdeRecord SdeAt(const Boundary& pred, const TrackedObject& gt_track, std::span<const EgoPose> ego,
                int frame0, double t) {
  const std::optional<int> future = FrameAtOffset(ego, frame0, t);
  if (!future) {
    throw MissingFrame("no ego pose " + std::to_string(t) + " s after frame " +
                       std::to_string(frame0));
  }
  const ObjectFrame* start = gt_track.FrameAt(frame0);
  const ObjectFrame* end = gt_track.FrameAt(*future);
  if (start == nullptr || end == nullptr) {
    throw MissingFrame("track " + gt_track.track_id + " lacks a box at frame " +
                       std::to_string(start == nullptr ? frame0 : *future));
  }
  const RigidMotion2 motion = RigidMotionBetween(start->box, end->box);
  const Boundary gt = Boundary::Points(GtBoundaryPoints(gt_track, frame0));
  SdeRecord r = ComputeSde(ApplyMotion(motion, pred), ApplyMotion(motion, gt), ego[*future]);
  r.t_offset = t;
  return r;
}

double SignedSde(const SdeRecord& r) {
  return std::abs(r.sde_lat_signed) >= std::abs(r.sde_lon_signed) ? r.sde_lat_signed
                                                                  : r.sde_lon_signed;
}

SdeSummary SdeStats(std::span<const SdeRecord> records, const HistogramSpec& spec) {
  if (records.empty()) throw EmptyInput("SDE statistics need at least one record");
  if (spec.bins <= 0 || !(spec.hi > spec.lo)) {
    throw InvalidArgument("histogram needs bins > 0 and hi > lo");
  }
  const std::size_t n = records.size();
  std::vector<double> lat, lon, sde, signed_sde;
  lat.reserve(n);
  lon.reserve(n);
  sde.reserve(n);
  signed_sde.reserve(n);
  SdeSummary s;
  s.count = n;
  s.histogram_spec = spec;
  s.histogram.assign(spec.bins, 0);
  std::size_t lat_wins = 0;
  std::size_t lon_wins = 0;
  for (const SdeRecord& r : records) {
    lat.push_back(std::abs(r.sde_lat_signed));
    lon.push_back(std::abs(r.sde_lon_signed));
    sde.push_back(r.sde);
    signed_sde.push_back(SignedSde(r));
    if (lat.back() > lon.back()) ++lat_wins;
    if (lon.back() > lat.back()) ++lon_wins;

    const double v = signed_sde.back();
    if (v < spec.lo) {
      ++s.underflow;
    } else if (v >= spec.hi) {
      ++s.overflow;
    } else {
      const int bin = static_cast<int>((v - spec.lo) / (spec.hi - spec.lo) * spec.bins);
      ++s.histogram[std::min(bin, spec.bins - 1)];
    }
  }
  const auto mean = [n](const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(n);
  };
  s.mean_abs_lat = mean(lat);
  s.mean_abs_lon = mean(lon);
  s.mean_sde = mean(sde);
  s.mean_signed = mean(signed_sde);
  s.median_abs_lat = Median(lat);
  s.median_abs_lon = Median(lon);
  s.median_sde = Median(sde);
  s.median_signed = Median(signed_sde);
  s.lat_contribution = static_cast<double>(lat_wins) / static_cast<double>(n);
  s.lon_contribution = static_cast<double>(lon_wins) / static_cast<double>(n);
  return s;
}

}  // namespace egosde
