#include "funcgraph/cli/commands.hpp"

#include "common/json_fields.hpp"
#include "funcgraph/bench/metrics.hpp"
#include "funcgraph/cli/io.hpp"
#include "funcgraph/error.hpp"
#include "funcgraph/graph/graph_io.hpp"
#include "funcgraph/views/view_selection.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace funcgraph::cli {

using detail::json;

namespace {

std::ostream& out(const Context& ctx) { return *ctx.out; }

void warn(const Context& ctx, const std::string& msg) {
  if (ctx.err != nullptr) *ctx.err << "warning: " << msg << "\n";
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(4) << v;
  return s.str();
}

// Reads every embedding once; all must share one dimension.
std::map<fs::path, Feature> load_embeddings(const DatasetManifest& m, int& feature_dim) {
  std::map<fs::path, Feature> out;
  for (const auto& e : m.embeddings) {
    if (out.contains(e.path)) continue;
    Feature f = io::read_embedding(e.path);
    if (feature_dim == 0) feature_dim = static_cast<int>(f.size());
    if (f.size() != feature_dim) {
      throw Error(ErrorCode::DimensionMismatch, e.path.string() + ": embedding has " + std::to_string(f.size()) +
                                                    " entries, expected " + std::to_string(feature_dim));
    }
    if (!(f.norm() > 0.0)) throw Error(ErrorCode::ParseError, e.path.string() + ": zero embedding");
    out.emplace(e.path, f.normalized());
  }
  return out;
}

// Clears mask pixels outside the rectangle the detector would have seen.
void clip_to_crop(MaskImage& mask, const PixelRect& r) {
  for (int v = 0; v < mask.height; ++v) {
    for (int u = 0; u < mask.width; ++u) {
      if (u < r.min_x || u > r.max_x || v < r.min_y || v > r.max_y) {
        mask.values[static_cast<std::size_t>(v) * mask.width + u] = 0;
      }
    }
  }
}

std::array<std::uint8_t, 3> node_color(NodeId id) {
  static constexpr std::array<std::array<std::uint8_t, 3>, 10> kPalette{{{31, 119, 180},
                                                                        {255, 127, 14},
                                                                        {44, 160, 44},
                                                                        {214, 39, 40},
                                                                        {148, 103, 189},
                                                                        {140, 86, 75},
                                                                        {227, 119, 194},
                                                                        {127, 127, 127},
                                                                        {188, 189, 34},
                                                                        {23, 190, 207}}};
  return kPalette[static_cast<std::size_t>(id % 10)];
}

SceneGraph load_graph(const fs::path& path) {
  try {
    return deserialize(io::read_text(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string node_label(const SceneGraph& g, NodeId id) {
  if (const ObjectNode* o = g.find_object(id)) return o->category_label;
  if (const ElementNode* e = g.find_element(id)) return e->functional_label;
  return "";
}

}  // namespace

InitResult build_initial_graph(const DatasetManifest& manifest, const PipelineConfig& config) {
  config.validate();
  int feature_dim = config.feature_dim;
  const std::map<fs::path, Feature> embeddings = load_embeddings(manifest, feature_dim);
  InitResult r{SceneGraph(feature_dim), 0, 0, 0, {}};
  SceneGraph& g = r.graph;

  const std::vector<FrameRecord> frames = load_frames(manifest.frames);
  std::map<int, const FrameRecord*> frame_by_id;
  for (const auto& f : frames) {
    f.validate();
    frame_by_id[f.frame_id] = &f;
  }

  std::vector<InstanceSegment> instances;
  for (const auto& in : manifest.instances) {
    InstanceSegment seg{in.id, in.label, io::read_ply_points(in.points)};
    if (seg.points.empty()) throw Error(ErrorCode::EmptyPointCloud, in.points.string() + ": no vertices");
    instances.push_back(std::move(seg));
  }
  const ObjectBuildResult built = build_object_nodes(g, instances, config.object_cluster);
  r.skipped_instances = built.skipped_instances.size();
  for (int id : built.skipped_instances) {
    r.warnings.push_back("instance " + std::to_string(id) + " is all noise after denoising; skipped");
  }

  // contribution scores and top-k views per object
  std::map<NodeId, std::map<int, double>> top_scores;
  for (const auto& [instance_id, node] : built.node_of_instance) {
    const ObjectNode& obj = *g.find_object(node);
    std::vector<ContributionScore> scores;
    for (const auto& f : frames) scores.push_back(frame_contribution(obj.points, f, config.depth_tol, node));
    std::map<int, double> by_frame;
    for (const auto& s : scores) by_frame[s.frame_id] = s.score;
    for (int fid : select_top_k(scores, config.top_k)) top_scores[node][fid] = by_frame[fid];
    if (top_scores[node].empty()) {
      r.warnings.push_back("object " + std::to_string(node) + " (instance " + std::to_string(instance_id) +
                           ") is not visible in any frame");
    }
  }

  std::vector<ElementMask> masks;
  for (const auto& mk : manifest.masks) {
    auto node_it = built.node_of_instance.find(mk.instance_id);
    if (node_it == built.node_of_instance.end()) {
      ++r.ignored_masks;
      continue;
    }
    const NodeId node = node_it->second;
    if (!top_scores[node].contains(mk.frame_id)) {
      ++r.ignored_masks;
      continue;
    }
    ElementMask em;
    em.frame_id = mk.frame_id;
    em.object_id = node;
    em.label = mk.label;
    em.detection_score = mk.score;
    em.mask = io::read_mask(mk.path);
    const FrameRecord& frame = *frame_by_id.at(mk.frame_id);
    if (em.mask.width != frame.intrinsics.width || em.mask.height != frame.intrinsics.height) {
      throw Error(ErrorCode::DimensionMismatch, mk.path.string() + ": mask is " + std::to_string(em.mask.width) +
                                                    "x" + std::to_string(em.mask.height) + ", frame " +
                                                    std::to_string(mk.frame_id) + " is " +
                                                    std::to_string(frame.intrinsics.width) + "x" +
                                                    std::to_string(frame.intrinsics.height));
    }
    clip_to_crop(em.mask, crop_rect(g.find_object(node)->points, frame, config.crop_expansion, config.depth_tol));
    masks.push_back(std::move(em));
  }
  const LiftResult lifted = lift_masks(masks, frames, config.lift_params());
  r.dropped_groups = lifted.dropped_groups;

  std::map<NodeId, int> instance_of_node;
  for (const auto& [instance_id, node] : built.node_of_instance) instance_of_node[node] = instance_id;

  const auto feature_from = [&](int instance_id, const std::optional<std::string>& label,
                                const std::map<int, double>& weight_of_frame) -> std::optional<Feature> {
    std::vector<Feature> fs;
    std::vector<double> ws;
    for (const auto& e : manifest.embeddings) {
      if (e.instance_id != instance_id || e.label != label) continue;
      auto w = weight_of_frame.find(e.frame_id);
      if (w == weight_of_frame.end()) continue;
      fs.push_back(embeddings.at(e.path));
      ws.push_back(w->second);
    }
    if (fs.empty()) return std::nullopt;
    try {
      return aggregate_features(fs, ws);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroWeightSum) throw;
      return std::nullopt;
    }
  };

  for (const auto& [node, instance_id] : instance_of_node) {
    if (feature_dim == 0) break;
    if (auto f = feature_from(instance_id, std::nullopt, top_scores[node])) g.set_feature(node, *f);
  }

  for (const auto& el : lifted.elements) {
    const NodeId id = g.add_element_node(el.object_id, el.label, el.points);
    if (feature_dim == 0) continue;
    std::map<int, double> weights;
    for (int fid : el.frame_ids) {
      weights[fid] = frame_contribution(el.points, *frame_by_id.at(fid), config.depth_tol, id).score;
    }
    if (auto f = feature_from(instance_of_node.at(el.object_id), el.label, weights)) {
      g.set_feature(id, *f);
    } else {
      r.warnings.push_back("element " + std::to_string(id) + " ('" + el.label + "') has no embedding");
    }
  }
  return r;
}

void cmd_init(const fs::path& manifest_path, const fs::path& output, const Context& ctx) {
  const DatasetManifest manifest = load_manifest(manifest_path);
  const InitResult r = build_initial_graph(manifest, ctx.config);
  for (const auto& w : r.warnings) warn(ctx, w);
  io::write_atomic(output, serialize(r.graph));
  const std::size_t edges = r.graph.edges().size();
  if (ctx.format == OutputFormat::Json) {
    out(ctx) << json{{"objects", r.graph.objects().size()},
                     {"elements", r.graph.elements().size()},
                     {"edges", edges},
                     {"skipped_instances", r.skipped_instances},
                     {"ignored_masks", r.ignored_masks},
                     {"dropped_groups", r.dropped_groups},
                     {"output", output.string()}}
                    .dump()
             << "\n";
  } else {
    out(ctx) << "objects " << r.graph.objects().size() << ", elements " << r.graph.elements().size()
             << ", edges " << edges << " -> " << output.string() << "\n";
  }
}

DemoTrack track_demo(const DatasetManifest& manifest, const std::string& demo_id, const PipelineConfig& config) {
  config.validate();
  const DemoEntry* demo = manifest.find_demo(demo_id);
  if (demo == nullptr) throw Error(ErrorCode::InvalidConfig, "manifest has no demo '" + demo_id + "'");
  if (!manifest.sphere) throw Error(ErrorCode::InvalidConfig, "manifest has no sphere model");
  const SphereModel sphere = io::read_sphere(*manifest.sphere);
  const std::vector<FrameRecord> frames = load_frames(demo->frames);
  for (const auto& f : frames) f.validate();
  const std::vector<MarkerDetection> detections = io::read_detections(demo->detections);
  DemoTrack d;
  try {
    d.track = track(detections, frames, sphere, config.track);
  } catch (const Error& e) {
    throw Error(e.code(), "demo '" + demo_id + "' (" + demo->detections.string() + "): " + e.what());
  }
  std::vector<Pose> poses;
  for (const auto& tp : d.track.trajectory) poses.push_back(tp.pose);
  d.verdict = select_joint(positions_of(poses), config.selection);
  return d;
}

void cmd_track(const fs::path& manifest_path, const std::string& demo_id, const fs::path& output_dir,
               const Context& ctx) {
  const DatasetManifest manifest = load_manifest(manifest_path);
  const DemoTrack d = track_demo(manifest, demo_id, ctx.config);
  for (const auto& w : d.track.warnings) warn(ctx, w);
  fs::create_directories(output_dir);
  const fs::path traj = output_dir / (demo_id + ".trajectory.jsonl");
  const fs::path verdict = output_dir / (demo_id + ".verdict.json");
  io::write_atomic(traj, io::format_trajectory(d.track.trajectory));
  io::write_atomic(verdict, io::format_verdict(d.verdict));
  const TrackStats& s = d.track.stats;
  if (ctx.format == OutputFormat::Json) {
    out(ctx) << json{{"demo", demo_id},
                     {"frames_total", s.frames_total},
                     {"frames_solved", s.frames_solved},
                     {"joint_type", std::string(to_string(d.verdict.joint_type))},
                     {"range", d.verdict.axis.range},
                     {"low_confidence", d.verdict.low_confidence},
                     {"trajectory", traj.string()},
                     {"verdict", verdict.string()}}
                    .dump()
             << "\n";
  } else {
    out(ctx) << "demo " << demo_id << ": " << s.frames_solved << "/" << s.frames_total << " frames solved, "
             << to_string(d.verdict.joint_type) << " ("
             << (d.verdict.joint_type == JointType::Prismatic ? "travel " + fixed(d.verdict.axis.range, 3) + " m"
                                                              : "sweep " + fixed(d.verdict.axis.range * 180.0 / std::numbers::pi, 1) + " deg")
             << (d.verdict.low_confidence ? ", low confidence" : "") << ")\n";
  }
}

std::vector<AssociationResult> cmd_refine(const fs::path& graph_path, const std::vector<DemoFiles>& demos,
                                          const fs::path& output, const Context& ctx) {
  SceneGraph g = load_graph(graph_path);
  std::vector<AssociationResult> results;
  json report = json::array();
  for (const auto& d : demos) {
    const std::vector<TimedPose> traj = io::read_trajectory(d.trajectory);
    const JointVerdict verdict = io::read_verdict(d.verdict);
    std::vector<Pose> poses;
    for (const auto& tp : traj) poses.push_back(tp.pose);
    AssociationResult r;
    try {
      r = register_demonstration(g, poses, verdict, ctx.config.refine);
    } catch (const Error& e) {
      throw Error(e.code(), d.trajectory.string() + ": " + e.what());
    }
    results.push_back(r);
    if (ctx.format == OutputFormat::Json) {
      report.push_back({{"trajectory", d.trajectory.string()},
                        {"kind", r.kind == AssociationKind::Matched ? "matched" : "new"},
                        {"element", r.element_id},
                        {"object", r.parent_object_id},
                        {"distance", std::isfinite(r.distance) ? json(r.distance) : json(nullptr)}});
    } else if (r.kind == AssociationKind::Matched) {
      out(ctx) << "matched element " << r.element_id << " (d=" << fixed(r.distance, 3) << " m)\n";
    } else {
      out(ctx) << "new element " << r.element_id << " under object " << r.parent_object_id << "\n";
    }
  }
  io::write_atomic(output, serialize(g));
  if (ctx.format == OutputFormat::Json) out(ctx) << report.dump() << "\n";
  return results;
}

void cmd_query(const fs::path& graph_path, const fs::path& embedding, int k, const Context& ctx) {
  const SceneGraph g = load_graph(graph_path);
  const Feature q = io::read_embedding(embedding);
  std::vector<QueryHit> hits;
  try {
    hits = g.query(q, k);
  } catch (const Error& e) {
    throw Error(e.code(), embedding.string() + ": " + e.what());
  }
  if (ctx.format == OutputFormat::Json) {
    json arr = json::array();
    for (std::size_t i = 0; i < hits.size(); ++i) {
      arr.push_back({{"rank", i + 1}, {"id", hits[i].id}, {"label", node_label(g, hits[i].id)}, {"score", hits[i].score}});
    }
    out(ctx) << arr.dump() << "\n";
    return;
  }
  for (std::size_t i = 0; i < hits.size(); ++i) {
    out(ctx) << (i + 1) << "\t" << hits[i].id << "\t" << node_label(g, hits[i].id) << "\t"
             << fixed(hits[i].score, 6) << "\n";
  }
}

int cmd_bench(const fs::path& dir, const Context& ctx) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<ScenarioOutcome> outcomes;
  std::size_t malformed = 0;
  std::size_t numerical = 0;
  json runs = json::array();
  json failures = json::array();
  const bool text = ctx.format == OutputFormat::Text;
  if (text) {
    out(ctx) << std::left << std::setw(28) << "scenario" << std::setw(6) << "seed" << std::setw(11) << "truth"
             << std::setw(11) << "verdict" << std::setw(13) << "T_err[m]" << std::setw(13) << "theta[deg]"
             << "d_err[m]\n";
  }
  for (const auto& file : files) {
    ScenarioConfig base;
    try {
      base = parse_scenario(io::read_text(file), file.string());
    } catch (const Error& e) {
      ++malformed;
      if (text) out(ctx) << "FAIL " << file.filename().string() << ": " << e.what() << "\n";
      failures.push_back({{"file", file.string()}, {"error", e.what()}});
      continue;
    }
    const std::uint64_t first_seed = ctx.seed.value_or(base.seed);
    for (int s = 0; s < ctx.config.bench_seeds; ++s) {
      ScenarioConfig c = base;
      c.seed = first_seed + static_cast<std::uint64_t>(s);
      BenchOptions opts;
      opts.selection = ctx.config.selection;
      TrackConfig tc = matched_track_config(c, ctx.config.track.filter);
      tc.pnp = ctx.config.track.pnp;
      opts.track = tc;
      try {
        const ScenarioOutcome o = run_scenario(c, opts);
        outcomes.push_back(o);
        if (text) {
          out(ctx) << std::left << std::setw(28) << o.name << std::setw(6) << o.seed << std::setw(11)
                   << to_string(o.gt_type) << std::setw(11) << to_string(o.verdict.joint_type) << std::setw(13)
                   << std::setprecision(4) << std::scientific << o.t_err << std::setw(13) << o.theta_err
                   << (o.d_err ? sci(*o.d_err) : std::string("-")) << std::defaultfloat << "\n";
        }
        runs.push_back({{"scenario", o.name},
                        {"file", file.string()},
                        {"seed", o.seed},
                        {"truth", std::string(to_string(o.gt_type))},
                        {"verdict", std::string(to_string(o.verdict.joint_type))},
                        {"t_err", o.t_err},
                        {"theta_err", o.theta_err},
                        {"d_err", o.d_err ? json(*o.d_err) : json(nullptr)},
                        {"frames_solved", o.frames_solved},
                        {"frames_total", o.frames_total}});
      } catch (const Error& e) {
        if (is_numerical(e.code())) {
          ++numerical;
        } else {
          ++malformed;
        }
        if (text) out(ctx) << "FAIL " << c.name << " seed " << c.seed << ": " << e.what() << "\n";
        failures.push_back({{"file", file.string()}, {"seed", c.seed}, {"error", e.what()}});
      }
    }
  }
  const BenchSummary s = summarize(outcomes, numerical);
  if (text) {
    out(ctx) << "runs " << s.runs << ", failures " << (numerical + malformed) << ", type accuracy "
             << fixed(100.0 * s.type_accuracy, 1) << "%, median T_err " << std::scientific << std::setprecision(3)
             << s.median_t_err << " m, median theta_err " << s.median_theta_err << " deg, median d_err "
             << (s.median_d_err ? sci(*s.median_d_err) + " m" : std::string("-")) << std::defaultfloat
             << "\n";
  } else {
    out(ctx) << json{{"runs", runs},
                     {"failures", failures},
                     {"summary",
                      {{"runs", s.runs},
                       {"failures", numerical + malformed},
                       {"type_accuracy", s.type_accuracy},
                       {"median_t_err", s.median_t_err},
                       {"median_theta_err", s.median_theta_err},
                       {"median_d_err", s.median_d_err ? json(*s.median_d_err) : json(nullptr)}}}}
                    .dump()
             << "\n";
  }
  if (malformed > 0) return 1;
  return numerical > 0 ? 2 : 0;
}

void cmd_bench_emit(const fs::path& dir, const NoiseSettings& noise, const Context& ctx) {
  fs::create_directories(dir);
  std::size_t n = 0;
  for (ViewSetting view : {ViewSetting::Static, ViewSetting::Dynamic}) {
    for (const auto& c : standard_suite(view, noise)) {
      io::write_atomic(dir / (c.name + ".json"), scenario_to_json(c));
      ++n;
    }
  }
  out(ctx) << "wrote " << n << " scenarios to " << dir.string() << "\n";
}

void cmd_bench_demo(const fs::path& scenario, const fs::path& output_dir, const Context& ctx) {
  ScenarioConfig c = parse_scenario(io::read_text(scenario), scenario.string());
  if (ctx.seed) c.seed = *ctx.seed;
  const SphereModel sphere = make_sphere(c.sphere);
  const SyntheticDemo demo = generate(c, sphere);
  fs::create_directories(output_dir);
  io::write_atomic(output_dir / "sphere.json", io::format_sphere(sphere));
  io::write_atomic(output_dir / "detections.jsonl", io::format_detections(demo.detections));
  io::write_atomic(output_dir / "ground_truth.jsonl", io::format_trajectory(demo.ground_truth));
  DatasetManifest m;
  m.sphere = "sphere.json";
  DemoEntry d;
  d.id = c.name;
  d.detections = "detections.jsonl";
  for (const auto& f : demo.frames) d.frames.push_back({f.frame_id, f.timestamp, f.intrinsics, f.cam_pose, std::nullopt});
  m.demos.push_back(d);
  io::write_atomic(output_dir / "manifest.json", manifest_to_json(m));
  out(ctx) << "demo " << c.name << ": " << demo.frames.size() << " frames, " << demo.detections.size()
           << " marker detections -> " << output_dir.string() << "\n";
}

void cmd_export(const fs::path& graph_path, const fs::path& output_dir, const Context& ctx) {
  const SceneGraph g = load_graph(graph_path);
  fs::create_directories(output_dir);

  std::vector<io::PlyVertex> objects;
  for (const auto& [id, o] : g.objects()) {
    for (const auto& p : o.points) objects.push_back({p, node_color(id), std::nullopt});
  }
  std::vector<io::PlyVertex> elements;
  std::vector<io::PlyVertex> axes;
  std::vector<std::pair<std::size_t, std::size_t>> axis_edges;
  std::vector<io::PlyVertex> trajectories;
  std::vector<std::pair<std::size_t, std::size_t>> trajectory_edges;
  for (const auto& [id, e] : g.elements()) {
    const auto color = node_color(id);
    for (const auto& p : e.points) elements.push_back({p, color, std::nullopt});
    if (e.articulation) {
      const ArticulationAxis& a = *e.articulation;
      const double half = a.joint_type == JointType::Prismatic ? std::max(0.5 * a.range, 0.05) : 0.25;
      axis_edges.emplace_back(axes.size(), axes.size() + 1);
      axes.push_back({a.center - half * a.direction, color, a.direction});
      axes.push_back({a.center + half * a.direction, color, a.direction});
    }
    if (e.trajectory) {
      const std::size_t first = trajectories.size();
      for (const auto& p : *e.trajectory) trajectories.push_back({p.position(), color, std::nullopt});
      for (std::size_t i = first + 1; i < trajectories.size(); ++i) trajectory_edges.emplace_back(i - 1, i);
    }
  }
  io::write_atomic(output_dir / "objects.ply", io::format_ply(objects));
  io::write_atomic(output_dir / "elements.ply", io::format_ply(elements));
  io::write_atomic(output_dir / "axes.ply", io::format_ply(axes, axis_edges));
  io::write_atomic(output_dir / "trajectories.ply", io::format_ply(trajectories, trajectory_edges));
  if (ctx.format == OutputFormat::Json) {
    out(ctx) << json{{"object_vertices", objects.size()},
                     {"element_vertices", elements.size()},
                     {"axes", axis_edges.size()},
                     {"trajectory_vertices", trajectories.size()}}
                    .dump()
             << "\n";
  } else {
    out(ctx) << "exported " << objects.size() << " object vertices, " << elements.size() << " element vertices, "
             << axis_edges.size() << " axes, " << trajectories.size() << " trajectory vertices to "
             << output_dir.string() << "\n";
  }
}

}  // namespace funcgraph::cli
