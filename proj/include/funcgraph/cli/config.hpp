#pragma once

#include "funcgraph/articulation/articulation_fit.hpp"
#include "funcgraph/lifting/element_lifting.hpp"
#include "funcgraph/refinement/refinement.hpp"
#include "funcgraph/tracking/tracking.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace funcgraph {

// Every tunable of the pipeline. Missing keys keep their defaults; unknown keys
// are rejected.
struct PipelineConfig {
  int top_k = kDefaultTopK;
  double depth_tol = kDefaultDepthTolerance;
  ClusterParams element_cluster = kDefaultElementCluster;
  ClusterParams object_cluster = kDefaultObjectCluster;
  double crop_expansion = kDefaultCropExpansion;
  double split_eps = 0.15;
  double min_detection_score = 0.3;
  RefineConfig refine;
  TrackConfig track;
  SelectionConfig selection;
  int feature_dim = 0;  // 0: taken from the first embedding
  int bench_seeds = 1;

  // Throws InvalidConfig.
  void validate() const;
  LiftParams lift_params() const;
};

// Throws ParseError naming `where` and the offending key, InvalidConfig.
PipelineConfig parse_config(std::string_view json_text, const std::string& where = "config");
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& config);

}  // namespace funcgraph
