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
#include "egosde/scene.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "egosde/error.h"
#include "json.hpp"

namespace egosde {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

constexpr double kTimeTolerance = 1e-6;
constexpr double kContainmentSlack = 1e-6;

std::string At(int line, const std::string& path) {
  return "line " + std::to_string(line) + ": " + path;
}

const Json& Field(const Json& rec, const char* key, int line, const std::string& prefix) {
  const auto it = rec.find(key);
  if (it == rec.end()) throw ParseError(At(line, prefix + key) + ": missing");
  return *it;
}

double Number(const Json& rec, const char* key, int line, const std::string& prefix = "") {
  const Json& v = Field(rec, key, line, prefix);
  if (!v.is_number()) throw ParseError(At(line, prefix + key) + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ValidationError(At(line, prefix + key) + ": must be finite");
  return d;
}

int FrameIndex(const Json& rec, int line) {
  const Json& v = Field(rec, "frame", line, "");
  if (!v.is_number_integer()) throw ParseError(At(line, "frame") + ": expected an integer");
  const auto f = v.get<std::int64_t>();
  if (f < 0 || f > std::numeric_limits<int>::max()) {
    throw ValidationError(At(line, "frame") + ": out of range");
  }
  return static_cast<int>(f);
}

std::string TrackId(const Json& rec, int line) {
  const Json& v = Field(rec, "track_id", line, "");
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw ParseError(At(line, "track_id") + ": expected a string or integer");
}

PointSet Points(const Json& rec, const char* key, int line, bool required) {
  const auto it = rec.find(key);
  if (it == rec.end()) {
    if (required) throw ParseError(At(line, key) + ": missing");
    return {};
  }
  if (!it->is_array()) throw ParseError(At(line, key) + ": expected an array of [x, y]");
  PointSet pts;
  pts.reserve(it->size());
  for (std::size_t i = 0; i < it->size(); ++i) {
    const Json& p = (*it)[i];
    const std::string path = std::string(key) + "[" + std::to_string(i) + "]";
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ParseError(At(line, path) + ": expected [x, y]");
    }
    const double x = p[0].get<double>();
    const double y = p[1].get<double>();
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw ValidationError(At(line, path) + ": must be finite");
    }
    pts.push_back({x, y});
  }
  return pts;
}

OrientedBox2 Box(const Json& rec, int line) {
  const Json& b = Field(rec, "box", line, "");
  if (!b.is_object()) throw ParseError(At(line, "box") + ": expected an object");
  const double cx = Number(b, "cx", line, "box.");
  const double cy = Number(b, "cy", line, "box.");
  const double length = Number(b, "length", line, "box.");
  const double width = Number(b, "width", line, "box.");
  const double heading = Number(b, "heading", line, "box.");
  if (!(length > 0)) throw ValidationError(At(line, "box.length") + ": must be > 0");
  if (!(width > 0)) throw ValidationError(At(line, "box.width") + ": must be > 0");
  return OrientedBox2({cx, cy}, length, width, heading);
}

OrderedJson BoxJson(const OrientedBox2& box) {
  OrderedJson b;
  b["cx"] = box.center().x;
  b["cy"] = box.center().y;
  b["length"] = box.length();
  b["width"] = box.width();
  b["heading"] = box.heading();
  return b;
}

OrderedJson PointsJson(std::span<const Vec2> pts) {
  OrderedJson arr = OrderedJson::array();
  for (const Vec2& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

}  // namespace

std::optional<int> FrameAtOffset(std::span<const EgoPose> ego, int frame, double t) {
  if (frame < 0 || frame >= static_cast<int>(ego.size())) return std::nullopt;
  const double target = ego[frame].t + t;
  const double tol = kTimeTolerance * std::max(1.0, std::abs(target));
  const auto it = std::lower_bound(ego.begin(), ego.end(), target - tol,
                                   [](const EgoPose& e, double value) { return e.t < value; });
  if (it == ego.end() || std::abs(it->t - target) > tol) return std::nullopt;
  return static_cast<int>(it - ego.begin());
}

std::optional<int> Scene::FrameAtOffset(int frame, double t) const {
  return egosde::FrameAtOffset(ego, frame, t);
}

std::vector<std::vector<int>> Scene::DetectionsByFrame() const {
  std::vector<std::vector<int>> by_frame(ego.size());
  for (std::size_t i = 0; i < detections.size(); ++i) {
    by_frame.at(detections[i].frame_index).push_back(static_cast<int>(i));
  }
  return by_frame;
}

PointSet Scene::FramePoints(int frame) const {
  PointSet out;
  for (const TrackedObject& obj : objects) {
    if (const ObjectFrame* f = obj.FrameAt(frame)) {
      out.insert(out.end(), f->points.begin(), f->points.end());
    }
  }
  return out;
}

double DeriveFramePeriod(std::span<const EgoPose> ego) {
  if (ego.size() < 2) return kDefaultFramePeriod;
  return (ego.back().t - ego.front().t) / static_cast<double>(ego.size() - 1);
}

RigidMotion2 RigidMotionBetween(const OrientedBox2& a, const OrientedBox2& b) {
  const double rotation = WrapAngle(b.heading() - a.heading());
  return {rotation, b.center() - Rotate(a.center(), rotation)};
}

PointSet GtBoundaryPoints(const TrackedObject& track, int frame) {
  const ObjectFrame* target = track.FrameAt(frame);
  if (target == nullptr) {
    throw MissingFrame("track " + track.track_id + " has no box at frame " + std::to_string(frame));
  }
  if (track.aggregated_points.empty()) {
    return SamplePerimeter(target->box.Footprint(), kFallbackBoundarySamples);
  }
  const ObjectFrame& ref = track.frames.begin()->second;
  return ApplyMotion(RigidMotionBetween(ref.box, target->box),
                     std::span<const Vec2>(track.aggregated_points));
}

Scene ParseScene(std::istream& in) {
  Scene scene;
  std::unordered_map<std::string, std::size_t> track_index;
  const auto track = [&](const std::string& id) -> TrackedObject& {
    const auto [it, inserted] = track_index.emplace(id, scene.objects.size());
    if (inserted) scene.objects.push_back(TrackedObject{id, {}, {}});
    return scene.objects[it->second];
  };
  std::vector<int> detection_lines;
  std::map<std::string, int> agg_line;

  std::string text;
  int line = 0;
  int records = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json rec;
    try {
      rec = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ParseError(At(line, "") + "malformed JSON: " + e.what());
    }
    if (!rec.is_object()) throw ParseError(At(line, "") + "record must be a JSON object");
    const Json& kind_json = Field(rec, "kind", line, "");
    if (!kind_json.is_string()) throw ParseError(At(line, "kind") + ": expected a string");
    const std::string kind = kind_json.get<std::string>();
    ++records;

    if (kind == "ego") {
      const double t = Number(rec, "t", line);
      const double x = Number(rec, "x", line);
      const double y = Number(rec, "y", line);
      const double heading = Number(rec, "heading", line);
      if (!scene.ego.empty() && !(t > scene.ego.back().t)) {
        throw ValidationError(At(line, "t") + ": ego timestamps must strictly increase");
      }
      scene.ego.push_back({t, {x, y}, WrapAngle(heading)});
    } else if (kind == "object_frame") {
      const std::string id = TrackId(rec, line);
      const int frame = FrameIndex(rec, line);
      OrientedBox2 box = Box(rec, line);
      PointSet pts = Points(rec, "points", line, false);
      const OrientedBox2 padded(box.center(), box.length() + 2 * kDefaultCropPadding,
                                box.width() + 2 * kDefaultCropPadding, box.heading());
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec2 local = box.ToLocal(pts[i]);
        if (std::abs(local.x) > 0.5 * padded.length() + kContainmentSlack ||
            std::abs(local.y) > 0.5 * padded.width() + kContainmentSlack) {
          throw ValidationError(At(line, "points[" + std::to_string(i) + "]") +
                                ": outside the padded box");
        }
      }
      TrackedObject& obj = track(id);
      if (!obj.frames.emplace(frame, ObjectFrame{box, std::move(pts)}).second) {
        throw ValidationError(At(line, "frame") + ": duplicate frame for track " + id);
      }
    } else if (kind == "object_agg") {
      const std::string id = TrackId(rec, line);
      PointSet pts = Points(rec, "points", line, true);
      TrackedObject& obj = track(id);
      if (!agg_line.emplace(id, line).second) {
        throw ValidationError(At(line, "track_id") + ": duplicate object_agg for track " + id);
      }
      obj.aggregated_points = std::move(pts);
    } else if (kind == "detection") {
      const int frame = FrameIndex(rec, line);
      OrientedBox2 box = Box(rec, line);
      const double score = Number(rec, "score", line);
      if (score < 0.0 || score > 1.0) {
        throw ValidationError(At(line, "score") + ": must be in [0, 1]");
      }
      std::optional<Polygon2> contour;
      if (rec.contains("contour") && !rec["contour"].is_null()) {
        try {
          contour.emplace(Points(rec, "contour", line, true));
        } catch (const InvalidArgument& e) {
          throw ValidationError(At(line, "contour") + ": " + e.what());
        }
      }
      scene.detections.push_back({frame, box, score, std::move(contour)});
      detection_lines.push_back(line);
    } else {
      throw ParseError(At(line, "kind") + ": unknown record kind '" + kind + "'");
    }
  }
  if (records == 0) throw ParseError("line 0: scene file contains no records");

  for (std::size_t i = 0; i < scene.detections.size(); ++i) {
    if (scene.detections[i].frame_index >= scene.num_frames()) {
      throw ValidationError(At(detection_lines[i], "frame") + ": no ego pose for frame " +
                            std::to_string(scene.detections[i].frame_index));
    }
  }
  scene.frame_period = DeriveFramePeriod(scene.ego);
  ValidateScene(scene);
  return scene;
}

Scene LoadScene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene file " + path.string());
  return ParseScene(in);
}

void ValidateScene(const Scene& scene) {
  if (scene.ego.empty()) throw ValidationError("ego: scene has no ego poses");
  if (!(scene.frame_period > 0)) throw ValidationError("frame_period: must be > 0");
  for (std::size_t i = 1; i < scene.ego.size(); ++i) {
    if (!(scene.ego[i].t > scene.ego[i - 1].t)) {
      throw ValidationError("ego[" + std::to_string(i) + "].t: timestamps must strictly increase");
    }
  }
  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    const TrackedObject& obj = scene.objects[k];
    const std::string path = "objects[" + obj.track_id + "]";
    if (obj.frames.empty()) throw ValidationError(path + ".frames: track has no boxes");
    for (const auto& [frame, _] : obj.frames) {
      if (frame >= scene.num_frames()) {
        throw ValidationError(path + ".frames[" + std::to_string(frame) +
                              "]: no ego pose for this frame");
      }
    }
  }
  for (std::size_t i = 0; i < scene.detections.size(); ++i) {
    const Detection& d = scene.detections[i];
    const std::string path = "detections[" + std::to_string(i) + "]";
    if (d.frame_index < 0 || d.frame_index >= scene.num_frames()) {
      throw ValidationError(path + ".frame: out of range");
    }
    if (!std::isfinite(d.score) || d.score < 0 || d.score > 1) {
      throw ValidationError(path + ".score: must be in [0, 1]");
    }
  }
}

void WriteScene(const Scene& scene, std::ostream& out) {
  for (const EgoPose& e : scene.ego) {
    OrderedJson r;
    r["kind"] = "ego";
    r["t"] = e.t;
    r["x"] = e.center.x;
    r["y"] = e.center.y;
    r["heading"] = e.heading;
    out << r.dump() << '\n';
  }
  for (const TrackedObject& obj : scene.objects) {
    for (const auto& [frame, f] : obj.frames) {
      OrderedJson r;
      r["kind"] = "object_frame";
      r["track_id"] = obj.track_id;
      r["frame"] = frame;
      r["box"] = BoxJson(f.box);
      r["points"] = PointsJson(f.points);
      out << r.dump() << '\n';
    }
    if (!obj.aggregated_points.empty()) {
      OrderedJson r;
      r["kind"] = "object_agg";
      r["track_id"] = obj.track_id;
      r["points"] = PointsJson(obj.aggregated_points);
      out << r.dump() << '\n';
    }
  }
  for (const Detection& d : scene.detections) {
    OrderedJson r;
    r["kind"] = "detection";
    r["frame"] = d.frame_index;
    r["box"] = BoxJson(d.box);
    r["score"] = d.score;
    if (d.contour) r["contour"] = PointsJson(d.contour->vertices());
    out << r.dump() << '\n';
  }
}

std::string SerializeScene(const Scene& scene) {
  std::ostringstream out;
  WriteScene(scene, out);
  return out.str();
}

void SaveScene(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write scene file " + path.string());
  WriteScene(scene, out);
  if (!out) throw IoError("failed writing scene file " + path.string());
}

}  // namespace egosde
