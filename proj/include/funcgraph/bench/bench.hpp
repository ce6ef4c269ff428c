#pragma once

#include "funcgraph/articulation/articulation_fit.hpp"
#include "funcgraph/bench/scenario.hpp"
#include "funcgraph/tracking/tracking.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace funcgraph {

// Filter measurement noise matched to the scenario's pixel noise: roughly
// 4 mm and 0.01 rad of pose error per pixel of corner noise, floored so that
// noiseless scenarios pass measurements through.
TrackConfig matched_track_config(const ScenarioConfig& config, const FilterConfig& base = {});

struct ScenarioOutcome {
  std::string name;
  std::uint64_t seed = 0;
  JointType gt_type = JointType::Prismatic;
  JointVerdict verdict;
  double t_err = 0.0;                 // m
  double theta_err = 0.0;             // deg
  std::optional<double> d_err;        // m, revolute ground truth with revolute verdict only
  bool type_correct = false;
  std::size_t frames_total = 0;
  std::size_t frames_solved = 0;
  std::size_t unaligned = 0;
};

struct BenchOptions {
  SelectionConfig selection;
  std::optional<TrackConfig> track;  // matched_track_config() when unset
};

// generate -> track -> select_joint -> metrics.
ScenarioOutcome run_scenario(const ScenarioConfig& config, const BenchOptions& options = {});

struct BenchSummary {
  std::size_t runs = 0;
  std::size_t failures = 0;
  double median_t_err = 0.0;
  double median_theta_err = 0.0;
  std::optional<double> median_d_err;
  double type_accuracy = 0.0;
};

double median(std::vector<double> values);
BenchSummary summarize(const std::vector<ScenarioOutcome>& outcomes, std::size_t failures = 0);

// Scenario files. Throws ParseError naming the offending field, InvalidConfig
// for values that parse but do not form a valid scenario.
ScenarioConfig parse_scenario(std::string_view json_text, const std::string& where = "scenario");
std::string scenario_to_json(const ScenarioConfig& config);

}  // namespace funcgraph
