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
#ifndef EGOSDE_SDE_H_
#define EGOSDE_SDE_H_

#include <span>
#include <vector>

#include "egosde/geom.h"
#include "egosde/scene.h"

namespace egosde {

// Distances from a boundary to the ego's lateral line (along the heading) and
// longitudinal line (perpendicular to it). Zero when the line crosses the
// boundary.
struct SupportDistances {
  double lat = 0.0;
  double lon = 0.0;
};

struct SdeRecord {
  // Ground-truth support distance minus predicted; positive when the
  // prediction protrudes towards the line.
  double sde_lat_signed = 0.0;
  double sde_lon_signed = 0.0;
  double sde = 0.0;  // max(|lat|, |lon|)
  double t_offset = 0.0;
  // Both lines cross both boundaries, so every support distance is 0 and the
  // record carries no information.
  bool flagged = false;
};

// Polygons are measured exactly over their edges. A point set counts as
// crossed when it has points on both sides of (or on) the line; otherwise the
// nearest point wins.
SupportDistances ComputeSupportDistances(const Boundary& boundary, const EgoPose& ego);

SdeRecord ComputeSde(const Boundary& pred, const Boundary& gt, const EgoPose& ego);

// SDE of a frame-`frame0` prediction evaluated `t` seconds later: prediction
// and ground-truth boundary are carried by the track's box motion and measured
// against the future ego pose. Throws MissingFrame when the future pose or
// either track box is unavailable.
SdeRecord SdeAt(const Boundary& pred, const TrackedObject& gt_track, std::span<const EgoPose> ego,
                int frame0, double t);

struct HistogramSpec {
  double lo = -1.0;
  double hi = 1.0;
  int bins = 40;
};

struct SdeSummary {
  std::size_t count = 0;
  double mean_abs_lat = 0.0;
  double median_abs_lat = 0.0;
  double mean_abs_lon = 0.0;
  double median_abs_lon = 0.0;
  double mean_sde = 0.0;
  double median_sde = 0.0;
  // Fraction of records where |lat| > |lon| (and the converse).
  double lat_contribution = 0.0;
  double lon_contribution = 0.0;
  // Signed SDE: the component with the larger magnitude, lateral on ties.
  double mean_signed = 0.0;
  double median_signed = 0.0;
  HistogramSpec histogram_spec;
  std::vector<int> histogram;  // bins over [lo, hi)
  int underflow = 0;
  int overflow = 0;
};

double SignedSde(const SdeRecord& r);

// Throws EmptyInput for an empty list.
SdeSummary SdeStats(std::span<const SdeRecord> records, const HistogramSpec& spec = {});

}  // namespace egosde

#endif  // EGOSDE_SDE_H_
