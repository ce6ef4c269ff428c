#pragma once

#include "funcgraph/articulation/articulation_fit.hpp"
#include "funcgraph/lifting/element_lifting.hpp"
#include "funcgraph/tracking/sphere_model.hpp"
#include "funcgraph/views/frame.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace funcgraph::io {

namespace fs = std::filesystem;

// Whole-file read. Throws IoError naming the path.
std::string read_text(const fs::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partial file. Throws IoError.
void write_atomic(const fs::path& path, std::string_view content);

// Raw little-endian float32, row-major, meters. Throws IoError, ParseError
// when the size does not match width * height.
DepthImage read_depth(const fs::path& path, int width, int height);
void write_depth(const fs::path& path, const DepthImage& depth);

// 8-bit single-channel PNG, non-zero = set. Throws IoError, ParseError.
MaskImage read_mask(const fs::path& path);
void write_mask(const fs::path& path, const MaskImage& mask);

// ASCII PLY vertices (x, y, z). Other properties and elements are skipped.
// Throws IoError, ParseError.
std::vector<Vec3> read_ply_points(const fs::path& path);

struct PlyVertex {
  Vec3 position = Vec3::Zero();
  std::array<std::uint8_t, 3> color{200, 200, 200};
  std::optional<Vec3> direction;  // u, v, w
};

// ASCII PLY with optional per-vertex direction and an optional edge list.
std::string format_ply(const std::vector<PlyVertex>& vertices,
                       const std::vector<std::pair<std::size_t, std::size_t>>& edges = {});

// JSON array of numbers.
Eigen::VectorXd read_embedding(const fs::path& path);

// JSON Lines, one {"frame_id", "marker_id", "corners": [[u, v] x 4]} per line.
std::vector<MarkerDetection> read_detections(const fs::path& path);
std::string format_detections(const std::vector<MarkerDetection>& detections);

// {"tip_offset": [7], "markers": [{"id", "corners": [[x, y, z] x 4]}]}
SphereModel read_sphere(const fs::path& path);
std::string format_sphere(const SphereModel& sphere);

// JSON Lines, one {"t", "pose": [7]} per line.
std::vector<TimedPose> read_trajectory(const fs::path& path);
std::string format_trajectory(const std::vector<TimedPose>& trajectory);

std::string format_verdict(const JointVerdict& verdict);
// Only the fields refinement needs: joint type, axis, scores, flag.
JointVerdict read_verdict(const fs::path& path);

}  // namespace funcgraph::io
