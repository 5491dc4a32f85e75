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
#include "egosde/contour.h"

#include <cmath>

#include "egosde/error.h"

namespace egosde {

void CropConfig::Validate() const {
  if (!(padding >= 0) || !std::isfinite(padding)) {
    throw InvalidConfig("crop padding must be finite and >= 0");
  }
}

PointSet CropPoints(const OrientedBox2& box, std::span<const Vec2> frame_points,
                    const CropConfig& cfg) {
  cfg.Validate();
  const double half_length = 0.5 * box.length() + cfg.padding;
  const double half_width = 0.5 * box.width() + cfg.padding;
  PointSet out;
  for (const Vec2& p : frame_points) {
    const Vec2 local = box.ToLocal(p);
    if (std::abs(local.x) <= half_length && std::abs(local.y) <= half_width) out.push_back(p);
  }
  return out;
}

Polygon2 ConvexVisibleContour(const OrientedBox2& box, std::span<const Vec2> frame_points,
                              const CropConfig& cfg) {
  const PointSet cropped = CropPoints(box, frame_points, cfg);
  try {
    return ConvexHull(cropped);
  } catch (const DegenerateInput& e) {
    throw InsufficientPoints("convex visible contour: " + std::string(e.what()));
  }
}

Polygon2 ConvexVisibleContourOrFootprint(const OrientedBox2& box,
                                         std::span<const Vec2> frame_points,
                                         const CropConfig& cfg) {
  try {
    return ConvexVisibleContour(box, frame_points, cfg);
  } catch (const InsufficientPoints&) {
    return box.Footprint();
  }
}

}  // namespace egosde
