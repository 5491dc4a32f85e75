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
// egosde: synthetic scenes, contour fitting, egocentric AP evaluation and the
// collision study from the command line.

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "egosde/apeval.h"
#include "egosde/collision.h"
#include "egosde/contour.h"
#include "egosde/error.h"
#include "egosde/parallel.h"
#include "egosde/scene.h"
#include "egosde/shapes.h"
#include "egosde/starpoly.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace egosde {
namespace {

constexpr char kToolVersion[] = "0.1.0";

std::string Sha256Hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << bytes;
  if (!out) throw IoError("cannot write " + path.string());
}

// Provenance record written next to every output.
class Manifest {
 public:
  explicit Manifest(std::string command) : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["tool_version"] = kToolVersion;
    doc_["config"] = json::object();
    doc_["inputs"] = json::object();
    doc_["outputs"] = json::object();
    doc_["seed"] = nullptr;
  }

  json& config() { return doc_["config"]; }
  void set_seed(std::uint64_t seed) { doc_["seed"] = seed; }
  void AddInput(const fs::path& path, const std::string& bytes) {
    doc_["inputs"][path.string()] = Sha256Hex(bytes);
  }
  void AddOutput(const std::string& name, const std::string& bytes) {
    doc_["outputs"][name] = Sha256Hex(bytes);
  }

  void Write(const fs::path& path) {
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start_;
    doc_["wall_time_s"] = wall.count();
    WriteFile(path, doc_.dump(2) + "\n");
  }

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

Scene LoadInput(const fs::path& path, Manifest& manifest) {
  const std::string bytes = ReadFile(path);
  manifest.AddInput(path, bytes);
  std::istringstream in(bytes);
  return ParseScene(in);
}

fs::path SceneManifestPath(const fs::path& output) {
  return fs::path(output.string() + ".manifest.json");
}

void SaveWithManifest(const Scene& scene, const fs::path& output, Manifest& manifest) {
  const std::string bytes = SerializeScene(scene);
  WriteFile(output, bytes);
  manifest.AddOutput(output.filename().string(), bytes);
  manifest.Write(SceneManifestPath(output));
}

struct CommonOptions {
  int jobs = 0;
  bool json_errors = false;
};

// --- synth -----------------------------------------------------------------

struct SynthOptions {
  SynthConfig config;
  double noise = 0.0;
  std::uint64_t seed = 0;
  bool full_visible = false;
  std::string output;
};

void RunSynth(const SynthOptions& opt) {
  SynthConfig config = opt.config;
  config.SetNoise(opt.noise);
  config.half_visible = !opt.full_visible;
  Manifest manifest("synth");
  manifest.set_seed(opt.seed);
  json& c = manifest.config();
  c["objects"] = config.num_objects;
  c["frames"] = config.num_frames;
  c["frame_period"] = config.frame_period;
  c["ego_speed"] = config.ego_speed;
  c["ego_curvature"] = config.ego_curvature;
  c["noise"] = opt.noise;
  c["size_bias"] = config.size_bias;
  c["far_noise_gain"] = config.far_noise_gain;
  c["false_positive_rate"] = config.false_positive_rate;
  c["miss_rate"] = config.miss_rate;
  c["half_visible"] = config.half_visible;
  const Scene scene = SynthScene(config, opt.seed);
  SaveWithManifest(scene, opt.output, manifest);
  std::cout << "wrote " << opt.output << ": " << scene.objects.size() << " objects, "
            << scene.num_frames() << " frames, " << scene.detections.size() << " detections\n";
}

// --- fit -------------------------------------------------------------------

struct FitCliOptions {
  std::string input;
  std::string output;
  std::string rep = "starpoly";
  double padding = kDefaultCropPadding;
  LossWeights weights;
  FitOptions fit;
};

void RunFit(const FitCliOptions& opt, const CommonOptions& common) {
  const Representation rep = ParseRepresentation(opt.rep);
  if (rep != Representation::kStarPoly && rep != Representation::kCvc) {
    throw InvalidConfig("fit --rep must be starpoly or cvc");
  }
  CropConfig crop{opt.padding};
  crop.Validate();
  opt.weights.Validate();
  opt.fit.Validate();

  Manifest manifest("fit");
  json& c = manifest.config();
  c["rep"] = opt.rep;
  c["padding"] = opt.padding;
  c["accuracy_weight"] = opt.weights.accuracy;
  c["tightness_weight"] = opt.weights.tightness;
  c["resolution"] = opt.fit.resolution;
  c["max_iterations"] = opt.fit.max_iterations;
  c["symmetric_completion"] = opt.fit.symmetric_completion;
  Scene scene = LoadInput(opt.input, manifest);

  const int n = static_cast<int>(scene.detections.size());
  std::vector<PointSet> frame_points(scene.num_frames());
  for (int f = 0; f < scene.num_frames(); ++f) frame_points[f] = scene.FramePoints(f);
  std::vector<std::optional<Polygon2>> contours(n);
  std::vector<LossTerms> terms(n);
  std::vector<int> iterations(n, 0);
  std::vector<char> fell_back(n, 0);
  ParallelFor(n, common.jobs, [&](int i) {
    const Detection& det = scene.detections[i];
    const PointSet crop_pts = CropPoints(det.box, frame_points[det.frame_index], crop);
    if (rep == Representation::kCvc) {
      try {
        contours[i] = ConvexHull(crop_pts);
      } catch (const DegenerateInput&) {
        contours[i] = det.box.Footprint();
        fell_back[i] = 1;
      }
      return;
    }
    FitResult r = FitStarPoly(det.box, crop_pts, opt.weights, opt.fit);
    contours[i] = std::move(r.polygon);
    terms[i] = r.final_terms;
    iterations[i] = r.iterations;
    fell_back[i] = r.fell_back;
  });

  int fallbacks = 0;
  LossTerms mean;
  long total_iterations = 0;
  for (int i = 0; i < n; ++i) {
    scene.detections[i].contour = std::move(contours[i]);
    if (fell_back[i]) {
      ++fallbacks;
      std::cerr << "fit: detection " << i << " (frame " << scene.detections[i].frame_index
                << ") has too few points; using the box footprint\n";
    }
    mean.total += terms[i].total / n;
    mean.coverage += terms[i].coverage / n;
    mean.accuracy += terms[i].accuracy / n;
    mean.tightness += terms[i].tightness / n;
    total_iterations += iterations[i];
  }
  SaveWithManifest(scene, opt.output, manifest);
  std::cout << "fitted " << n << " detections (" << opt.rep << "), " << fallbacks << " fallbacks\n";
  if (rep == Representation::kStarPoly && n > 0) {
    std::cout << "mean loss " << FormatNumber(mean.total) << " coverage "
              << FormatNumber(mean.coverage) << " accuracy " << FormatNumber(mean.accuracy)
              << " tightness " << FormatNumber(mean.tightness) << " iterations "
              << FormatNumber(static_cast<double>(total_iterations) / n) << "\n";
  }
}

// --- eval ------------------------------------------------------------------

struct EvalCliOptions {
  std::string input;
  std::string out_dir;
  std::vector<std::string> metrics = {"sde-ap"};
  std::vector<double> deltas = {0.20};
  std::vector<double> betas = {3.0};
  std::vector<double> t_list = {0.0};
  std::string buckets;
  std::string rep = "box";
  double iou_threshold = 0.70;
  double match_radius = 2.0;
};

void RunEval(const EvalCliOptions& opt, const CommonOptions& common) {
  ReportSpec spec;
  spec.metrics.clear();
  for (const std::string& m : opt.metrics) spec.metrics.push_back(ParseMetric(m));
  spec.deltas = opt.deltas;
  spec.betas = opt.betas;
  spec.t_list = opt.t_list;
  spec.iou_threshold = opt.iou_threshold;
  spec.match_radius = opt.match_radius;
  spec.buckets = {Bucket{}};
  if (!opt.buckets.empty()) {
    for (const Bucket& b : ParseBuckets(opt.buckets)) spec.buckets.push_back(b);
  }
  spec.Validate();
  const Representation rep = ParseRepresentation(opt.rep);

  Manifest manifest("eval");
  json& c = manifest.config();
  c["metrics"] = opt.metrics;
  c["deltas"] = opt.deltas;
  c["betas"] = opt.betas;
  c["t"] = opt.t_list;
  c["buckets"] = opt.buckets;
  c["rep"] = opt.rep;
  c["iou_threshold"] = opt.iou_threshold;
  c["match_radius"] = opt.match_radius;
  const Scene scene = LoadInput(opt.input, manifest);
  const std::vector<Polygon2> shapes = DetectionShapes(scene, rep, common.jobs);
  const std::vector<ReportRow> rows = BreakdownReport(scene, shapes, spec, common.jobs);

  std::ostringstream ap_csv, pr_csv;
  WriteApCsv(ap_csv, rows);
  WritePrCsv(pr_csv, rows);
  const fs::path dir(opt.out_dir);
  WriteFile(dir / "ap.csv", ap_csv.str());
  WriteFile(dir / "pr.csv", pr_csv.str());
  manifest.AddOutput("ap.csv", ap_csv.str());
  manifest.AddOutput("pr.csv", pr_csv.str());
  manifest.Write(dir / "manifest.json");

  std::printf("%-8s %-8s %6s %6s %6s %8s %6s %6s %6s\n", "metric", "bucket", "t", "delta", "beta",
              "ap", "gt", "tp", "fp");
  for (const ReportRow& r : rows) {
    std::printf(
        "%-8s %-8s %6s %6s %6s %8s %6d %6d %6d\n", MetricName(r.metric).c_str(),
        r.bucket.Label().c_str(), FormatNumber(r.t).c_str(), FormatNumber(r.delta).c_str(),
        r.beta ? FormatNumber(*r.beta).c_str() : "-",
        r.result.defined ? FormatNumber(std::round(r.result.ap * 1e4) / 1e4).c_str() : "undef",
        r.result.num_gt, r.result.num_tp, r.result.num_fp);
  }
}

// --- collide ---------------------------------------------------------------

struct CollideCliOptions {
  std::string input;
  std::string out_dir;
  std::string rep = "box";
  EgoDims dims;
  CollisionConfig config;
};

void RunCollide(const CollideCliOptions& opt, const CommonOptions& common) {
  opt.dims.Validate();
  opt.config.Validate();
  const Representation rep = ParseRepresentation(opt.rep);
  Manifest manifest("collide");
  json& c = manifest.config();
  c["rep"] = opt.rep;
  c["ego_length"] = opt.dims.length;
  c["ego_width"] = opt.dims.width;
  c["ego_scale"] = opt.config.ego_scale;
  c["horizon"] = opt.config.horizon;
  c["step"] = opt.config.step;
  const Scene scene = LoadInput(opt.input, manifest);
  const std::vector<Polygon2> shapes = DetectionShapes(scene, rep, common.jobs);
  const CollisionStudy study = RunCollisionStudy(scene, shapes, opt.dims, opt.config, common.jobs);

  std::ostringstream groups, per_t;
  WriteGroupCsv(groups, study);
  WriteTimeCsv(per_t, study);
  const fs::path dir(opt.out_dir);
  WriteFile(dir / "groups.csv", groups.str());
  WriteFile(dir / "per_t.csv", per_t.str());
  manifest.AddOutput("groups.csv", groups.str());
  manifest.AddOutput("per_t.csv", per_t.str());
  manifest.Write(dir / "manifest.json");

  for (const GroupStats* g : {&study.tp_group, &study.fp_fn_group}) {
    std::cout << g->name << ": " << g->events << " events";
    if (g->empty()) {
      std::cout << " (empty)\n";
    } else {
      std::cout << ", mean IoU " << FormatNumber(g->mean_iou) << ", mean SDE "
                << FormatNumber(g->mean_sde) << "\n";
    }
  }
  std::cout << study.unmatched_detections << " unmatched detections, " << study.pairs_beyond_track
            << " pairs past track end\n";
}

int ExitCodeFor(const Error& e) {
  const std::string& k = e.kind();
  if (k == "InvalidConfig" || k == "InvalidArgument" || k == "ParseError" ||
      k == "ValidationError" || k == "IoError" || k == "MissingFrame") {
    return 2;
  }
  return 1;
}

void ReportError(bool as_json, const std::string& kind, const std::string& message, int code) {
  if (as_json) {
    json j;
    j["error"] = kind;
    j["message"] = message;
    j["exit_code"] = code;
    std::cerr << j.dump() << "\n";
  } else {
    std::cerr << "egosde: " << kind << ": " << message << "\n";
  }
}

int Main(int argc, char** argv) {
  CLI::App app{"Egocentric perception metrics: SDE, StarPoly contours, SDE-AP and collisions"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  CommonOptions common;
  app.add_option("--jobs", common.jobs, "Worker threads (default: EGOSDE_JOBS or all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--json-errors", common.json_errors, "Report errors as one-line JSON on stderr");

  SynthOptions synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene");
  synth_cmd->add_option("--objects", synth.config.num_objects, "Tracked objects")
      ->capture_default_str();
  synth_cmd->add_option("--frames", synth.config.num_frames, "Frames")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--noise", synth.noise, "Detection noise level (m)")->capture_default_str();
  synth_cmd->add_option("--period", synth.config.frame_period, "Frame period (s)")
      ->capture_default_str();
  synth_cmd->add_option("--speed", synth.config.ego_speed, "Ego speed (m/s)")
      ->capture_default_str();
  synth_cmd->add_option("--curvature", synth.config.ego_curvature, "Ego path curvature (1/m)")
      ->capture_default_str();
  synth_cmd->add_option("--size-bias", synth.config.size_bias, "Box size bias (m)")
      ->capture_default_str();
  synth_cmd
      ->add_option("--far-noise-gain", synth.config.far_noise_gain,
                   "Noise growth per 20 m of range")
      ->capture_default_str();
  synth_cmd
      ->add_option("--fp-rate", synth.config.false_positive_rate, "Spurious detections per frame")
      ->capture_default_str();
  synth_cmd->add_option("--miss-rate", synth.config.miss_rate, "Missed detection probability")
      ->capture_default_str();
  synth_cmd->add_flag("--full-visible", synth.full_visible, "Observe whole object outlines");
  synth_cmd->add_option("-o,--output", synth.output, "Output scene (JSONL)")->required();

  FitCliOptions fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Annotate detections with contours");
  fit_cmd->add_option("-i,--input", fit.input, "Input scene")->required();
  fit_cmd->add_option("-o,--output", fit.output, "Output scene")->required();
  fit_cmd->add_option("--rep", fit.rep, "starpoly or cvc")->capture_default_str();
  fit_cmd->add_option("--padding", fit.padding, "Crop padding (m)")->capture_default_str();
  fit_cmd
      ->add_option("--accuracy-weight", fit.weights.accuracy, "Weight on the visible-boundary term")
      ->capture_default_str();
  fit_cmd->add_option("--tightness-weight", fit.weights.tightness, "Weight on the mean-radius term")
      ->capture_default_str();
  fit_cmd->add_option("--resolution", fit.fit.resolution, "StarPoly directions")
      ->capture_default_str();
  fit_cmd->add_option("--max-iterations", fit.fit.max_iterations, "Gradient steps per fit")
      ->capture_default_str();
  fit_cmd->add_flag("--symmetric-completion", fit.fit.symmetric_completion,
                    "Also cover visible points mirrored through the box center");

  EvalCliOptions eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Compute AP metrics and breakdowns");
  eval_cmd->add_option("-i,--input", eval.input, "Input scene")->required();
  eval_cmd->add_option("--out-dir", eval.out_dir, "Directory for ap.csv and pr.csv")->required();
  eval_cmd->add_option("--metric", eval.metrics, "sde-ap, sde-apd, iou-ap, iou-apd")
      ->delimiter(',');
  eval_cmd->add_option("--delta", eval.deltas, "SDE thresholds (m)")->delimiter(',');
  eval_cmd->add_option("--beta", eval.betas, "Distance weighting exponents")->delimiter(',');
  eval_cmd->add_option("--t", eval.t_list, "Future offsets (s)")->delimiter(',');
  eval_cmd->add_option("--buckets", eval.buckets, "Range bucket edges, e.g. 0,5,10,20,40");
  eval_cmd->add_option("--rep", eval.rep, "box, contour, cvc or starpoly")->capture_default_str();
  eval_cmd->add_option("--iou-threshold", eval.iou_threshold, "IoU needed for a true positive")
      ->capture_default_str();
  eval_cmd->add_option("--match-radius", eval.match_radius, "Center gate for IoU matching (m)")
      ->capture_default_str();

  CollideCliOptions collide;
  CLI::App* collide_cmd = app.add_subcommand("collide", "Run the collision study");
  collide_cmd->add_option("-i,--input", collide.input, "Input scene")->required();
  collide_cmd->add_option("--out-dir", collide.out_dir, "Directory for groups.csv, per_t.csv")
      ->required();
  collide_cmd->add_option("--rep", collide.rep, "box, contour, cvc or starpoly")
      ->capture_default_str();
  collide_cmd->add_option("--ego-length", collide.dims.length, "Ego footprint length (m)")
      ->capture_default_str();
  collide_cmd->add_option("--ego-width", collide.dims.width, "Ego footprint width (m)")
      ->capture_default_str();
  collide_cmd->add_option("--ego-scale", collide.config.ego_scale, "Ego footprint scale factor")
      ->capture_default_str();
  collide_cmd->add_option("--horizon", collide.config.horizon, "Seconds")->capture_default_str();
  collide_cmd->add_option("--step", collide.config.step, "Seconds")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    ReportError(common.json_errors, "UsageError", e.what(), 2);
    return 2;
  }

  try {
    if (*synth_cmd) {
      RunSynth(synth);
    } else if (*fit_cmd) {
      RunFit(fit, common);
    } else if (*eval_cmd) {
      RunEval(eval, common);
    } else if (*collide_cmd) {
      RunCollide(collide, common);
    }
  } catch (const Error& e) {
    const int code = ExitCodeFor(e);
    ReportError(common.json_errors, e.kind(), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    ReportError(common.json_errors, "InternalError", e.what(), 1);
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace egosde

int main(int argc, char** argv) { return egosde::Main(argc, argv); }
