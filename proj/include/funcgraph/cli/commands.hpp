#pragma once

#include "funcgraph/bench/bench.hpp"
#include "funcgraph/bench/suite.hpp"
#include "funcgraph/cli/config.hpp"
#include "funcgraph/cli/manifest.hpp"
#include "funcgraph/graph/scene_graph.hpp"
#include "funcgraph/refinement/refinement.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace funcgraph::cli {

namespace fs = std::filesystem;

enum class OutputFormat { Text, Json };

struct Context {
  PipelineConfig config;
  std::optional<std::uint64_t> seed;
  OutputFormat format = OutputFormat::Text;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

struct InitResult {
  SceneGraph graph;
  std::size_t skipped_instances = 0;
  std::size_t ignored_masks = 0;  // on frames outside their object's top-k
  std::size_t dropped_groups = 0;
  std::vector<std::string> warnings;
};

// Object nodes -> contribution scores -> top-k -> mask lifting -> features.
InitResult build_initial_graph(const DatasetManifest& manifest, const PipelineConfig& config);
void cmd_init(const fs::path& manifest, const fs::path& output, const Context& ctx);

struct DemoTrack {
  TrackResult track;
  JointVerdict verdict;
};

DemoTrack track_demo(const DatasetManifest& manifest, const std::string& demo_id, const PipelineConfig& config);
// Writes <output_dir>/<demo>.trajectory.jsonl and <demo>.verdict.json.
void cmd_track(const fs::path& manifest, const std::string& demo_id, const fs::path& output_dir,
               const Context& ctx);

struct DemoFiles {
  fs::path trajectory;
  fs::path verdict;
};

std::vector<AssociationResult> cmd_refine(const fs::path& graph, const std::vector<DemoFiles>& demos,
                                          const fs::path& output, const Context& ctx);

void cmd_query(const fs::path& graph, const fs::path& embedding, int k, const Context& ctx);

// Runs every *.json scenario in `dir` (name order) for config.bench_seeds
// seeds. Returns the exit code: 1 if a scenario file is malformed, else 2 if a
// run failed numerically, else 0.
int cmd_bench(const fs::path& dir, const Context& ctx);
// Writes the standard scenario family as scenario files.
void cmd_bench_emit(const fs::path& dir, const NoiseSettings& noise, const Context& ctx);
// Generates one scenario and writes it in the pipeline's input formats:
// manifest.json (one demo), sphere.json, detections.jsonl, ground_truth.jsonl.
void cmd_bench_demo(const fs::path& scenario, const fs::path& output_dir, const Context& ctx);

// objects.ply, elements.ply, axes.ply, trajectories.ply in `output_dir`.
void cmd_export(const fs::path& graph, const fs::path& output_dir, const Context& ctx);

}  // namespace funcgraph::cli
