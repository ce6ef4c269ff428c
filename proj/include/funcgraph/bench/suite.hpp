#pragma once

#include "funcgraph/bench/scenario.hpp"

#include <vector>

namespace funcgraph {

enum class ViewSetting { Static, Dynamic };

struct NoiseSettings {
  double pixel_noise_sigma = 0.0;
  double dropout_rate = 0.0;
  double frame_rate = 30.0;
  std::uint64_t seed = 0;
};

// One demonstration of the standard family. Prismatic joints slide `amount`
// meters along a horizontal direction; revolute joints turn `amount` radians
// at `radius` about a vertical (even index) or horizontal (odd index) hinge.
// The static camera watches the whole motion from a fixed pose; the dynamic
// camera orbits 60 degrees around it at the same distance while aiming at the
// tool, with small hand jitter.
ScenarioConfig suite_scenario(std::size_t index, JointType type, double amount, double radius,
                              ViewSetting view, const NoiseSettings& noise);

// 10 prismatic scenarios (travel 0.1 to 0.5 m) followed by 10 revolute ones
// (sweep 20 to 170 degrees, radius 0.2 to 0.8 m).
std::vector<ScenarioConfig> standard_suite(ViewSetting view, const NoiseSettings& noise);

}  // namespace funcgraph
