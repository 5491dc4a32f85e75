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
#include "egosde/shapes.h"

#include <optional>

#include "egosde/error.h"
#include "egosde/parallel.h"

namespace egosde {

Representation ParseRepresentation(std::string_view name) {
  if (name == "box") return Representation::kBox;
  if (name == "contour") return Representation::kContour;
  if (name == "cvc") return Representation::kCvc;
  if (name == "starpoly") return Representation::kStarPoly;
  throw InvalidConfig("unknown representation '" + std::string(name) +
                      "' (expected box, contour, cvc or starpoly)");
}

std::string RepresentationName(Representation rep) {
  switch (rep) {
    case Representation::kBox:
      return "box";
    case Representation::kContour:
      return "contour";
    case Representation::kCvc:
      return "cvc";
    case Representation::kStarPoly:
      return "starpoly";
  }
  return "unknown";
}

std::vector<Polygon2> DetectionShapes(const Scene& scene, Representation rep, int jobs,
                                      const ShapeOptions& options) {
  const int n = static_cast<int>(scene.detections.size());
  std::vector<Polygon2> shapes;
  shapes.reserve(n);
  if (rep == Representation::kBox || rep == Representation::kContour) {
    for (int i = 0; i < n; ++i) {
      const Detection& det = scene.detections[i];
      if (rep == Representation::kContour && !det.contour) {
        throw ValidationError("detections[" + std::to_string(i) +
                              "].contour: missing; run `fit` first");
      }
      shapes.push_back(det.Shape());
    }
    return shapes;
  }
  std::vector<PointSet> frame_points(scene.num_frames());
  for (int f = 0; f < scene.num_frames(); ++f) frame_points[f] = scene.FramePoints(f);
  std::vector<std::optional<Polygon2>> slots(n);
  ParallelFor(n, jobs, [&](int i) {
    const Detection& det = scene.detections[i];
    const PointSet& pts = frame_points.at(det.frame_index);
    if (rep == Representation::kCvc) {
      slots[i] = ConvexVisibleContourOrFootprint(det.box, pts, options.crop);
    } else {
      const PointSet crop = CropPoints(det.box, pts, options.crop);
      slots[i] = FitStarPoly(det.box, crop, options.weights, options.fit).polygon;
    }
  });
  for (auto& s : slots) shapes.push_back(std::move(*s));
  return shapes;
}

}  // namespace egosde
