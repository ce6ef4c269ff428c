#include "funcgraph/cli/commands.hpp"
#include "funcgraph/error.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace funcgraph;
namespace fs = std::filesystem;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional scene graphs of articulated objects from posed observations and demonstrations"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string output;
  std::string format = "text";
  app.add_option("--config", config_path, "Pipeline config JSON")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Base random seed (bench)");
  app.add_option("-o,--output", output, "Output file or directory");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));

  auto* init = app.add_subcommand("init", "Build the initial scene graph from a dataset manifest")->fallthrough();
  std::string manifest;
  init->add_option("manifest", manifest, "Dataset manifest JSON")->required();

  auto* track = app.add_subcommand("track", "Track one demonstration and fit its joint")->fallthrough();
  std::string demo_id;
  track->add_option("manifest", manifest, "Dataset manifest JSON")->required();
  track->add_option("demo", demo_id, "Demo id in the manifest")->required();

  auto* refine = app.add_subcommand("refine", "Register demonstrations in a scene graph")->fallthrough();
  std::string graph;
  std::vector<std::string> demo_files;
  refine->add_option("graph", graph, "Scene graph JSON")->required();
  refine->add_option("demos", demo_files, "Pairs of TRAJECTORY.jsonl VERDICT.json")->required();

  auto* query = app.add_subcommand("query", "Rank graph nodes against an embedding")->fallthrough();
  std::string embedding;
  int k = 5;
  query->add_option("graph", graph, "Scene graph JSON")->required();
  query->add_option("embedding", embedding, "Query embedding JSON")->required();
  query->add_option("-k", k, "Number of results")->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "Run synthetic scenarios and report metrics")->fallthrough();
  std::string scenario_dir;
  std::string emit_dir;
  std::string demo_scenario;
  NoiseSettings noise;
  bench->add_option("scenarios", scenario_dir, "Directory of scenario JSON files");
  bench->add_option("--emit", emit_dir, "Write the standard scenario family to this directory");
  bench->add_option("--demo", demo_scenario, "Write one scenario as pipeline input files (to --output)");
  bench->add_option("--noise", noise.pixel_noise_sigma, "Corner noise sigma in pixels (with --emit)");
  bench->add_option("--dropout", noise.dropout_rate, "Marker dropout rate (with --emit)");

  auto* exp = app.add_subcommand("export", "Write point clouds, axes and trajectories as PLY")->fallthrough();
  exp->add_option("graph", graph, "Scene graph JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    cli::Context ctx;
    if (!config_path.empty()) ctx.config = load_config(config_path);
    if (seed_opt->count() > 0) ctx.seed = seed;
    ctx.format = format == "json" ? cli::OutputFormat::Json : cli::OutputFormat::Text;
    ctx.out = &std::cout;
    ctx.err = &std::cerr;
    noise.seed = ctx.seed.value_or(0);

    if (init->parsed()) {
      cli::cmd_init(manifest, output.empty() ? "scene_graph.json" : output, ctx);
    } else if (track->parsed()) {
      cli::cmd_track(manifest, demo_id, output.empty() ? "." : output, ctx);
    } else if (refine->parsed()) {
      if (demo_files.size() % 2 != 0) {
        std::cerr << "error: refine expects TRAJECTORY VERDICT pairs\n";
        return 1;
      }
      std::vector<cli::DemoFiles> demos;
      for (std::size_t i = 0; i < demo_files.size(); i += 2) demos.push_back({demo_files[i], demo_files[i + 1]});
      cli::cmd_refine(graph, demos, output.empty() ? graph : output, ctx);
    } else if (query->parsed()) {
      cli::cmd_query(graph, embedding, k, ctx);
    } else if (bench->parsed()) {
      if (!emit_dir.empty()) {
        cli::cmd_bench_emit(emit_dir, noise, ctx);
      } else if (!demo_scenario.empty()) {
        cli::cmd_bench_demo(demo_scenario, output.empty() ? "." : output, ctx);
      } else if (!scenario_dir.empty()) {
        return cli::cmd_bench(scenario_dir, ctx);
      } else {
        std::cerr << "error: bench needs a scenario directory, --emit or --demo\n";
        return 1;
      }
    } else if (exp->parsed()) {
      cli::cmd_export(graph, output.empty() ? "export" : output, ctx);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_numerical(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
