#include "funcgraph/cli/config.hpp"

#include "common/json_fields.hpp"
#include "funcgraph/cli/io.hpp"
#include "funcgraph/error.hpp"

namespace funcgraph {

using detail::Fields;
using detail::json;

namespace {

ClusterParams parse_cluster(Fields f, const ClusterParams& fallback) {
  ClusterParams c = fallback;
  c.eps = f.number("eps", c.eps);
  c.min_pts = static_cast<int>(f.integer("min_pts", c.min_pts));
  f.finish();
  return c;
}

json cluster_json(const ClusterParams& c) { return {{"eps", c.eps}, {"min_pts", c.min_pts}}; }

}  // namespace

void PipelineConfig::validate() const {
  const auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (top_k < 1) bad("top_k must be >= 1");
  if (!(depth_tol > 0.0)) bad("depth_tol must be > 0");
  element_cluster.validate();
  object_cluster.validate();
  if (!(crop_expansion >= 0.0)) bad("crop_expansion must be >= 0");
  if (!(split_eps > 0.0)) bad("split_eps must be > 0");
  if (!(min_detection_score >= 0.0 && min_detection_score <= 1.0)) bad("min_detection_score must be in [0, 1]");
  refine.validate();
  track.filter.validate();
  if (track.pnp.max_iterations < 1) bad("pnp.max_iterations must be >= 1");
  if (selection.lambda && !(*selection.lambda >= 0.0)) bad("lambda must be >= 0");
  if (feature_dim < 0) bad("feature_dim must be >= 0");
  if (bench_seeds < 1) bad("bench_seeds must be >= 1");
}

LiftParams PipelineConfig::lift_params() const {
  LiftParams p;
  p.cluster = element_cluster;
  p.split_eps = split_eps;
  p.min_detection_score = min_detection_score;
  return p;
}

PipelineConfig parse_config(std::string_view json_text, const std::string& where) {
  const json root = detail::parse_json(json_text, where);
  Fields f(root, where);
  PipelineConfig c;
  c.top_k = static_cast<int>(f.integer("top_k", c.top_k));
  c.depth_tol = f.number("depth_tol", c.depth_tol);
  if (f.has("element_cluster")) c.element_cluster = parse_cluster(f.object("element_cluster"), c.element_cluster);
  if (f.has("object_cluster")) c.object_cluster = parse_cluster(f.object("object_cluster"), c.object_cluster);
  c.crop_expansion = f.number("crop_expansion", c.crop_expansion);
  c.split_eps = f.number("split_eps", c.split_eps);
  c.min_detection_score = f.number("min_detection_score", c.min_detection_score);
  c.refine.threshold = f.number("association_threshold", c.refine.threshold);
  const std::string parent = f.text("parent_selection", "centroid");
  if (parent == "centroid") {
    c.refine.parent_selection = ParentSelection::Centroid;
  } else if (parent == "point_cloud") {
    c.refine.parent_selection = ParentSelection::PointCloud;
  } else {
    f.fail_at("parent_selection", "expected \"centroid\" or \"point_cloud\"");
  }
  c.refine.interaction_label = f.text("interaction_label", c.refine.interaction_label);
  if (f.has("filter")) {
    Fields k = f.object("filter");
    FilterConfig& fc = c.track.filter;
    fc.alpha = k.number("alpha", fc.alpha);
    fc.sigma_position = k.number("sigma_position", fc.sigma_position);
    fc.sigma_rotation = k.number("sigma_rotation", fc.sigma_rotation);
    fc.sigma_acc = k.number("sigma_acc", fc.sigma_acc);
    fc.sigma_ang_acc = k.number("sigma_ang_acc", fc.sigma_ang_acc);
    fc.initial_velocity_sigma = k.number("initial_velocity_sigma", fc.initial_velocity_sigma);
    fc.initial_angular_velocity_sigma = k.number("initial_angular_velocity_sigma", fc.initial_angular_velocity_sigma);
    fc.smooth = k.boolean("smooth", fc.smooth);
    k.finish();
  }
  if (f.has("pnp")) {
    Fields p = f.object("pnp");
    c.track.pnp.max_iterations = static_cast<int>(p.integer("max_iterations", c.track.pnp.max_iterations));
    c.track.pnp.step_tolerance = p.number("step_tolerance", c.track.pnp.step_tolerance);
    c.track.pnp.max_condition = p.number("max_condition", c.track.pnp.max_condition);
    p.finish();
  }
  if (const json* lambda = f.get("lambda"); lambda != nullptr && !lambda->is_null()) {
    c.selection.lambda = f.number("lambda");
  }
  c.feature_dim = static_cast<int>(f.integer("feature_dim", c.feature_dim));
  c.bench_seeds = static_cast<int>(f.integer("bench_seeds", c.bench_seeds));
  f.finish();
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  try {
    return parse_config(io::read_text(path), path.string());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) throw Error(e.code(), path.string() + ": " + e.what());
    throw;
  }
}

std::string config_to_json(const PipelineConfig& c) {
  const FilterConfig& fc = c.track.filter;
  json j = {
      {"top_k", c.top_k},
      {"depth_tol", c.depth_tol},
      {"element_cluster", cluster_json(c.element_cluster)},
      {"object_cluster", cluster_json(c.object_cluster)},
      {"crop_expansion", c.crop_expansion},
      {"split_eps", c.split_eps},
      {"min_detection_score", c.min_detection_score},
      {"association_threshold", c.refine.threshold},
      {"parent_selection", c.refine.parent_selection == ParentSelection::Centroid ? "centroid" : "point_cloud"},
      {"interaction_label", c.refine.interaction_label},
      {"filter",
       {{"alpha", fc.alpha},
        {"sigma_position", fc.sigma_position},
        {"sigma_rotation", fc.sigma_rotation},
        {"sigma_acc", fc.sigma_acc},
        {"sigma_ang_acc", fc.sigma_ang_acc},
        {"initial_velocity_sigma", fc.initial_velocity_sigma},
        {"initial_angular_velocity_sigma", fc.initial_angular_velocity_sigma},
        {"smooth", fc.smooth}}},
      {"pnp",
       {{"max_iterations", c.track.pnp.max_iterations},
        {"step_tolerance", c.track.pnp.step_tolerance},
        {"max_condition", c.track.pnp.max_condition}}},
      {"lambda", c.selection.lambda ? json(*c.selection.lambda) : json(nullptr)},
      {"feature_dim", c.feature_dim},
      {"bench_seeds", c.bench_seeds},
  };
  return j.dump(2) + "\n";
}

}  // namespace funcgraph
