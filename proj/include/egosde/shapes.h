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
#ifndef EGOSDE_SHAPES_H_
#define EGOSDE_SHAPES_H_

#include <string>
#include <string_view>
#include <vector>

#include "egosde/contour.h"
#include "egosde/geom.h"
#include "egosde/scene.h"
#include "egosde/starpoly.h"

namespace egosde {

// How a detection's boundary is represented when it is measured.
enum class Representation {
  kBox,       // oriented box footprint
  kContour,   // contour stored on the detection (e.g. written by `fit`)
  kCvc,       // convex visible contour from the frame points
  kStarPoly,  // per-instance StarPoly fit to the frame points
};

// Accepts "box", "contour", "cvc" and "starpoly"; throws InvalidConfig.
Representation ParseRepresentation(std::string_view name);
std::string RepresentationName(Representation rep);

struct ShapeOptions {
  CropConfig crop;
  LossWeights weights;
  FitOptions fit;
};

// Boundary polygon of every detection in `scene` (index-aligned with
// scene.detections). kContour throws ValidationError when a detection has no
// contour; kCvc falls back to the box footprint on degenerate crops.
std::vector<Polygon2> DetectionShapes(const Scene& scene, Representation rep, int jobs = 0,
                                      const ShapeOptions& options = {});

}  // namespace egosde

#endif  // EGOSDE_SHAPES_H_
