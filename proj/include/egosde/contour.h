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
#ifndef EGOSDE_CONTOUR_H_
#define EGOSDE_CONTOUR_H_

#include <span>

#include "egosde/geom.h"
#include "egosde/scene.h"

namespace egosde {

struct CropConfig {
  double padding = kDefaultCropPadding;  // m, added on every side

  void Validate() const;
};

// Points whose box-frame coordinates fall within the box grown by
// `cfg.padding` along length and width. Order is preserved.
PointSet CropPoints(const OrientedBox2& box, std::span<const Vec2> frame_points,
                    const CropConfig& cfg = {});

// Convex visible contour: hull of the cropped current-frame points.
// Throws InsufficientPoints when fewer than 3 non-collinear points remain.
Polygon2 ConvexVisibleContour(const OrientedBox2& box, std::span<const Vec2> frame_points,
                              const CropConfig& cfg = {});

// As above, but falls back to the box footprint on degenerate crops.
Polygon2 ConvexVisibleContourOrFootprint(const OrientedBox2& box,
                                         std::span<const Vec2> frame_points,
                                         const CropConfig& cfg = {});

}  // namespace egosde

#endif  // EGOSDE_CONTOUR_H_
