#pragma once

#include "funcgraph/views/frame.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace funcgraph {

struct FrameEntry {
  int id = 0;
  double timestamp = 0.0;
  CameraIntrinsics intrinsics;
  Pose cam_pose;  // T_world<-cam
  std::optional<std::filesystem::path> depth;
};

struct InstanceEntry {
  int id = 0;
  std::string label;
  std::filesystem::path points;  // ASCII PLY
};

struct MaskEntry {
  int frame_id = 0;
  int instance_id = 0;
  std::string label;
  double score = 0.0;
  std::filesystem::path path;  // PNG
};

// Crop embedding of an object (no label) or of one of its elements (label).
struct EmbeddingEntry {
  int frame_id = 0;
  int instance_id = 0;
  std::optional<std::string> label;
  std::filesystem::path path;
};

struct DemoEntry {
  std::string id;
  std::vector<FrameEntry> frames;
  std::filesystem::path detections;  // JSON Lines
};

// Dataset description. Relative paths resolve against the manifest's
// directory; every referenced file must exist when the manifest loads.
struct DatasetManifest {
  std::filesystem::path base_dir;
  std::vector<FrameEntry> frames;
  std::vector<InstanceEntry> instances;
  std::vector<MaskEntry> masks;
  std::vector<EmbeddingEntry> embeddings;
  std::optional<std::filesystem::path> sphere;
  std::vector<DemoEntry> demos;

  const DemoEntry* find_demo(const std::string& id) const;
};

// Throws ParseError (file and JSON pointer), IoError for missing files.
DatasetManifest load_manifest(const std::filesystem::path& path);

// Reads every frame, with its depth raster when listed. Throws IoError,
// ParseError, InvalidConfig.
std::vector<FrameRecord> load_frames(const std::vector<FrameEntry>& entries);

std::string manifest_to_json(const DatasetManifest& manifest);

}  // namespace funcgraph
