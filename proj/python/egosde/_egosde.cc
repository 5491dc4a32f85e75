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
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "egosde/apeval.h"
#include "egosde/collision.h"
#include "egosde/contour.h"
#include "egosde/error.h"
#include "egosde/geom.h"
#include "egosde/scene.h"
#include "egosde/sde.h"
#include "egosde/shapes.h"
#include "egosde/starpoly.h"

namespace py = pybind11;

// Vec2 <-> any length-2 sequence of numbers (tuple on the way out).
namespace pybind11::detail {
template <>
struct type_caster<egosde::Vec2> {
  PYBIND11_TYPE_CASTER(egosde::Vec2, const_name("tuple[float, float]"));

  bool load(handle src, bool convert) {
    if (!isinstance<sequence>(src) || isinstance<str>(src)) return false;
    const auto seq = reinterpret_borrow<sequence>(src);
    if (seq.size() != 2) return false;
    make_caster<double> x, y;
    if (!x.load(seq[0], convert) || !y.load(seq[1], convert)) return false;
    value = egosde::Vec2(cast_op<double>(x), cast_op<double>(y));
    return true;
  }

  static handle cast(const egosde::Vec2& v, return_value_policy, handle) {
    return make_tuple(v.x, v.y).release();
  }
};
}  // namespace pybind11::detail

namespace egosde {
namespace {

// A Polygon2 or a sequence of points.
Boundary ToBoundary(const py::object& arg) {
  if (py::isinstance<Polygon2>(arg)) return Boundary::Poly(arg.cast<Polygon2>());
  return Boundary::Points(arg.cast<PointSet>());
}

py::dict ApResultDict(const APResult& r) {
  py::list pr;
  for (const PrPoint& p : r.pr_points) pr.append(py::make_tuple(p.score, p.precision, p.recall));
  py::dict d;
  d["ap"] = r.ap;
  d["defined"] = r.defined;
  d["gt_weight"] = r.gt_weight;
  d["num_gt"] = r.num_gt;
  d["num_tp"] = r.num_tp;
  d["num_fp"] = r.num_fp;
  d["pr_points"] = pr;
  return d;
}

py::dict GroupDict(const GroupStats& g) {
  py::dict d;
  d["events"] = g.events;
  d["with_detection"] = g.with_detection;
  d["mean_iou"] = g.mean_iou;
  d["median_iou"] = g.median_iou;
  d["mean_sde"] = g.mean_sde;
  d["median_sde"] = g.median_sde;
  d["mean_sde_at_t"] = g.mean_sde_at_t;
  d["median_sde_at_t"] = g.median_sde_at_t;
  return d;
}

template <typename E>
void RegisterError(py::module_& m, const char* name, py::handle base) {
  py::register_exception<E>(m, name, base);
}

}  // namespace
}  // namespace egosde

PYBIND11_MODULE(_egosde, m) {
  using namespace egosde;  // NOLINT(build/namespaces)
  m.doc() = "Support distance error, StarPoly contours and egocentric AP.";

  // Translators run newest first, so the base class is registered first.
  const auto& error = py::register_exception<Error>(m, "Error");
  RegisterError<InvalidArgument>(m, "InvalidArgument", error);
  RegisterError<DegenerateInput>(m, "DegenerateInput", error);
  RegisterError<NonConvexInput>(m, "NonConvexInput", error);
  RegisterError<ParseError>(m, "ParseError", error);
  RegisterError<ValidationError>(m, "ValidationError", error);
  RegisterError<InvalidConfig>(m, "InvalidConfig", error);
  RegisterError<MissingFrame>(m, "MissingFrame", error);
  RegisterError<EmptyInput>(m, "EmptyInput", error);
  RegisterError<InsufficientPoints>(m, "InsufficientPoints", error);
  RegisterError<DegenerateAtCenter>(m, "DegenerateAtCenter", error);
  RegisterError<IoError>(m, "IoError", error);

  // Geometry.
  py::class_<Polygon2>(m, "Polygon2")
      .def(py::init<std::vector<Vec2>>(), py::arg("vertices"))
      .def_property_readonly("vertices", &Polygon2::vertices)
      .def("area", &Polygon2::Area)
      .def("is_convex", &Polygon2::IsConvex)
      .def("__len__", &Polygon2::size)
      .def(py::self == py::self)
      .def("__repr__",
           [](const Polygon2& p) { return "Polygon2(" + std::to_string(p.size()) + " vertices)"; });

  py::class_<OrientedBox2>(m, "OrientedBox2")
      .def(py::init<Vec2, double, double, double>(), py::arg("center"), py::arg("length"),
           py::arg("width"), py::arg("heading") = 0.0)
      .def_property_readonly("center", &OrientedBox2::center)
      .def_property_readonly("length", &OrientedBox2::length)
      .def_property_readonly("width", &OrientedBox2::width)
      .def_property_readonly("heading", &OrientedBox2::heading)
      .def("corners",
           [](const OrientedBox2& b) {
             const auto c = b.Corners();
             return std::vector<Vec2>(c.begin(), c.end());
           })
      .def("footprint", &OrientedBox2::Footprint)
      .def("to_local", &OrientedBox2::ToLocal, py::arg("world"))
      .def("to_world", &OrientedBox2::ToWorld, py::arg("local"))
      .def(py::self == py::self);

  py::class_<EgoPose>(m, "EgoPose")
      .def(py::init(
               [](Vec2 center, double heading, double t) { return EgoPose{t, center, heading}; }),
           py::arg("center"), py::arg("heading") = 0.0, py::arg("t") = 0.0)
      .def_readwrite("t", &EgoPose::t)
      .def_readwrite("center", &EgoPose::center)
      .def_readwrite("heading", &EgoPose::heading);

  m.def("convex_hull", [](const PointSet& pts) { return ConvexHull(pts); }, py::arg("points"));
  m.def("polygon_intersection_area", &PolygonIntersectionArea, py::arg("p"), py::arg("q"));
  m.def("box_iou_bev", &BoxIouBev, py::arg("a"), py::arg("b"));
  m.def("point_in_polygon", &PointInPolygon, py::arg("point"), py::arg("polygon"));
  m.def("polygons_overlap", &PolygonsOverlap, py::arg("a"), py::arg("b"));
  m.def("sample_perimeter", &SamplePerimeter, py::arg("polygon"), py::arg("count"),
        py::arg("phase") = 0.0);

  // Support distance error.
  py::class_<SdeRecord>(m, "SdeRecord")
      .def_readonly("sde", &SdeRecord::sde)
      .def_readonly("sde_lat_signed", &SdeRecord::sde_lat_signed)
      .def_readonly("sde_lon_signed", &SdeRecord::sde_lon_signed)
      .def_readonly("t_offset", &SdeRecord::t_offset)
      .def_readonly("flagged", &SdeRecord::flagged);

  m.def(
      "support_distances",
      [](const py::object& boundary, const EgoPose& ego) {
        const SupportDistances d = ComputeSupportDistances(ToBoundary(boundary), ego);
        return py::make_tuple(d.lat, d.lon);
      },
      py::arg("boundary"), py::arg("ego"),
      "(lateral, longitudinal) distance of a polygon or point list to the ego lines.");
  m.def(
      "compute_sde",
      [](const py::object& pred, const py::object& gt, const EgoPose& ego) {
        return ComputeSde(ToBoundary(pred), ToBoundary(gt), ego);
      },
      py::arg("pred"), py::arg("gt"), py::arg("ego"));

  // Contours.
  m.def(
      "crop_points",
      [](const OrientedBox2& box, const PointSet& pts, double padding) {
        return CropPoints(box, pts, CropConfig{padding});
      },
      py::arg("box"), py::arg("points"), py::arg("padding") = kDefaultCropPadding);
  m.def(
      "convex_visible_contour",
      [](const OrientedBox2& box, const PointSet& pts, double padding) {
        return ConvexVisibleContour(box, pts, CropConfig{padding});
      },
      py::arg("box"), py::arg("points"), py::arg("padding") = kDefaultCropPadding);

  // StarPoly.
  py::class_<LossWeights>(m, "LossWeights")
      .def(py::init(
               [](double accuracy, double tightness) { return LossWeights{accuracy, tightness}; }),
           py::arg("accuracy") = 0.1, py::arg("tightness") = 0.1)
      .def_readwrite("accuracy", &LossWeights::accuracy)
      .def_readwrite("tightness", &LossWeights::tightness);

  py::class_<FitOptions>(m, "FitOptions")
      .def(py::init<>())
      .def_readwrite("resolution", &FitOptions::resolution)
      .def_readwrite("initial_step", &FitOptions::initial_step)
      .def_readwrite("shrink", &FitOptions::shrink)
      .def_readwrite("max_iterations", &FitOptions::max_iterations)
      .def_readwrite("relative_tolerance", &FitOptions::relative_tolerance)
      .def_readwrite("min_radius", &FitOptions::min_radius)
      .def_readwrite("symmetric_completion", &FitOptions::symmetric_completion);

  py::class_<LossTerms>(m, "LossTerms")
      .def_readonly("total", &LossTerms::total)
      .def_readonly("coverage", &LossTerms::coverage)
      .def_readonly("accuracy", &LossTerms::accuracy)
      .def_readonly("tightness", &LossTerms::tightness);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("polygon", &FitResult::polygon)
      .def_readonly("radii", &FitResult::radii)
      .def_readonly("loss_history", &FitResult::loss_history)
      .def_readonly("final_terms", &FitResult::final_terms)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("fell_back", &FitResult::fell_back);

  m.def(
      "fit_starpoly",
      [](const OrientedBox2& box, const PointSet& pts, const LossWeights& weights,
         const FitOptions& options) {
        py::gil_scoped_release release;
        return FitStarPoly(box, pts, weights, options);
      },
      py::arg("box"), py::arg("points"), py::arg("weights") = LossWeights{},
      py::arg("options") = FitOptions{});
  m.def(
      "starpoly_loss",
      [](const std::vector<double>& radii, const PointSet& points, const PointSet& visible_boundary,
         const LossWeights& weights) {
        CanonicalCloud cloud;
        cloud.points = points;
        cloud.visible_boundary = visible_boundary;
        const StarPolygon sp(DirectionSet::Square(static_cast<int>(radii.size())), radii);
        return py::make_tuple(Loss(sp, cloud, weights), LossGradient(sp, cloud, weights));
      },
      py::arg("radii"), py::arg("points"), py::arg("visible_boundary") = PointSet{},
      py::arg("weights") = LossWeights{},
      "Loss terms and gradient of a canonical-frame star polygon on the square "
      "direction fan of len(radii) directions.");

  // Scenes.
  py::class_<Detection>(m, "Detection")
      .def_readonly("frame_index", &Detection::frame_index)
      .def_readonly("box", &Detection::box)
      .def_readonly("score", &Detection::score)
      .def_readonly("contour", &Detection::contour);

  py::class_<Scene>(m, "Scene")
      .def_property_readonly("num_frames", &Scene::num_frames)
      .def_readonly("ego", &Scene::ego)
      .def_readonly("detections", &Scene::detections)
      .def_readonly("frame_period", &Scene::frame_period)
      .def_property_readonly("track_ids",
                             [](const Scene& s) {
                               std::vector<std::string> ids;
                               for (const TrackedObject& o : s.objects) ids.push_back(o.track_id);
                               return ids;
                             })
      .def("frame_points", &Scene::FramePoints, py::arg("frame"))
      .def("to_jsonl", &SerializeScene)
      .def(
          "save", [](const Scene& s, const std::string& path) { SaveScene(s, path); },
          py::arg("path"))
      .def(py::self == py::self);

  m.def("load_scene", [](const std::string& path) { return LoadScene(path); }, py::arg("path"));
  m.def(
      "parse_scene",
      [](const std::string& text) {
        std::istringstream in(text);
        return ParseScene(in);
      },
      py::arg("text"));

  py::class_<SynthConfig>(m, "SynthConfig")
      .def(py::init<>())
      .def_readwrite("num_objects", &SynthConfig::num_objects)
      .def_readwrite("num_frames", &SynthConfig::num_frames)
      .def_readwrite("frame_period", &SynthConfig::frame_period)
      .def_readwrite("ego_speed", &SynthConfig::ego_speed)
      .def_readwrite("ego_curvature", &SynthConfig::ego_curvature)
      .def_readwrite("translation_noise", &SynthConfig::translation_noise)
      .def_readwrite("heading_noise", &SynthConfig::heading_noise)
      .def_readwrite("size_noise", &SynthConfig::size_noise)
      .def_readwrite("size_bias", &SynthConfig::size_bias)
      .def_readwrite("far_noise_gain", &SynthConfig::far_noise_gain)
      .def_readwrite("false_positive_rate", &SynthConfig::false_positive_rate)
      .def_readwrite("miss_rate", &SynthConfig::miss_rate)
      .def_readwrite("half_visible", &SynthConfig::half_visible)
      .def_readwrite("aggregated_samples", &SynthConfig::aggregated_samples)
      .def_readwrite("visible_samples", &SynthConfig::visible_samples)
      .def_readwrite("near_lane_fraction", &SynthConfig::near_lane_fraction)
      .def("set_noise", &SynthConfig::SetNoise, py::arg("level"));

  m.def("synth_scene", &SynthScene, py::arg("config"), py::arg("seed") = 0);

  m.def(
      "detection_shapes",
      [](const Scene& scene, const std::string& rep, int jobs) {
        const Representation r = ParseRepresentation(rep);
        py::gil_scoped_release release;
        return DetectionShapes(scene, r, jobs);
      },
      py::arg("scene"), py::arg("rep") = "box", py::arg("jobs") = 0);

  // Evaluation.
  m.def(
      "evaluate",
      [](const Scene& scene, const std::string& rep, const std::vector<std::string>& metrics,
         const std::vector<double>& t_list, const std::vector<double>& deltas,
         const std::vector<double>& betas, const std::string& buckets, double iou_threshold,
         int jobs) {
        ReportSpec spec;
        spec.metrics.clear();
        for (const std::string& name : metrics) spec.metrics.push_back(ParseMetric(name));
        spec.t_list = t_list;
        spec.deltas = deltas;
        spec.betas = betas;
        spec.iou_threshold = iou_threshold;
        spec.buckets = {Bucket{}};
        if (!buckets.empty()) {
          for (const Bucket& b : ParseBuckets(buckets)) spec.buckets.push_back(b);
        }
        spec.Validate();
        const Representation r = ParseRepresentation(rep);
        std::vector<ReportRow> rows;
        {
          py::gil_scoped_release release;
          rows = BreakdownReport(scene, DetectionShapes(scene, r, jobs), spec, jobs);
        }
        py::list out;
        for (const ReportRow& row : rows) {
          py::dict d = ApResultDict(row.result);
          d["metric"] = MetricName(row.metric);
          d["bucket"] = row.bucket.Label();
          d["t"] = row.t;
          d["delta"] = row.delta;
          d["beta"] = row.beta ? py::object(py::float_(*row.beta)) : py::object(py::none());
          out.append(d);
        }
        return out;
      },
      py::arg("scene"), py::arg("rep") = "box",
      py::arg("metrics") = std::vector<std::string>{"sde-ap"},
      py::arg("t") = std::vector<double>{0.0}, py::arg("deltas") = std::vector<double>{0.20},
      py::arg("betas") = std::vector<double>{3.0}, py::arg("buckets") = "",
      py::arg("iou_threshold") = 0.70, py::arg("jobs") = 0,
      "One dict per metric, t, threshold, beta and bucket; bucket 'all' is always included.");

  m.def(
      "collision_study",
      [](const Scene& scene, const std::string& rep, double horizon, double step, double ego_scale,
         double ego_length, double ego_width, int jobs) {
        CollisionConfig cfg;
        cfg.horizon = horizon;
        cfg.step = step;
        cfg.ego_scale = ego_scale;
        const EgoDims dims{ego_length, ego_width};
        const Representation r = ParseRepresentation(rep);
        CollisionStudy study;
        {
          py::gil_scoped_release release;
          study = RunCollisionStudy(scene, DetectionShapes(scene, r, jobs), dims, cfg, jobs);
        }
        py::list per_t;
        for (const TimeRow& row : study.per_t) {
          py::dict d;
          d["t"] = row.t;
          d["cda"] = row.cda;
          d["mean_iou"] = row.mean_iou;
          d["mean_sde"] = row.mean_sde;
          d["tp"] = row.tp;
          d["fp"] = row.fp;
          d["fn"] = row.fn;
          d["pairs"] = row.pairs;
          per_t.append(d);
        }
        py::dict out;
        out["per_t"] = per_t;
        out["tp"] = GroupDict(study.tp_group);
        out["fp_fn"] = GroupDict(study.fp_fn_group);
        out["unmatched_detections"] = study.unmatched_detections;
        return out;
      },
      py::arg("scene"), py::arg("rep") = "box", py::arg("horizon") = 10.0, py::arg("step") = 1.0,
      py::arg("ego_scale") = 1.8, py::arg("ego_length") = 4.8, py::arg("ego_width") = 2.0,
      py::arg("jobs") = 0);
}
