#pragma once

#include "funcgraph/graph/scene_graph.hpp"
#include "funcgraph/lifting/dbscan.hpp"
#include "funcgraph/views/frame.hpp"
#include "funcgraph/views/view_selection.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace funcgraph {

// Output of an external 3D instance segmenter.
struct InstanceSegment {
  int instance_id = 0;
  std::string label;
  std::vector<Vec3> points;
};

// Binary raster, row-major, non-zero = set.
struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;

  bool at(int u, int v) const { return values[static_cast<std::size_t>(v) * width + u] != 0; }
  std::size_t count() const;
};

// 2D functional-element mask from a detector + segmenter on one frame.
// object_id is the graph id of the object whose crop produced the mask.
struct ElementMask {
  int frame_id = 0;
  NodeId object_id = 0;
  std::string label;
  MaskImage mask;
  double detection_score = 0.0;
};

// Continuous pixel rectangle [min, max] in both axes.
struct PixelRect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
};

inline constexpr double kDefaultCropExpansion = 0.2;

inline constexpr ClusterParams kDefaultElementCluster{0.02, 10};
inline constexpr ClusterParams kDefaultObjectCluster{0.05, 20};

struct LiftParams {
  ClusterParams cluster = kDefaultElementCluster;
  // Same-label views farther apart than this are kept as separate elements.
  double split_eps = 0.15;
  // Groups whose best detection is below this are discarded.
  double min_detection_score = 0.3;
};

struct LiftedElement {
  NodeId object_id = 0;
  std::string label;
  std::vector<Vec3> points;
  Vec3 centroid = Vec3::Zero();
  double max_score = 0.0;       // best detection among the masks that contributed points
  std::vector<int> frame_ids;  // frames that contributed points, ascending
};

struct LiftResult {
  std::vector<LiftedElement> elements;  // ordered by (object_id, label, spatial cluster)
  std::size_t dropped_groups = 0;       // low confidence, no valid depth, or all noise
};

// Bounding box of the visible projections (visible_projection rule) grown by
// `expansion` of its size on each side and clamped to [0, width-1] x
// [0, height-1]. Throws NoVisiblePoints.
PixelRect crop_rect(std::span<const Vec3> object_points, const FrameRecord& frame,
                    double expansion = kDefaultCropExpansion,
                    double depth_tol = kDefaultDepthTolerance);

// Back-projects each mask's set pixels with valid depth, merges every view of
// an (object_id, label) group, separates spatially distinct parts at
// split_eps and keeps the largest density cluster of each part.
// Throws InvalidConfig when a mask references a missing frame or a frame has
// no depth, DimensionMismatch when a mask size differs from its frame.
LiftResult lift_masks(std::span<const ElementMask> masks, std::span<const FrameRecord> frames,
                      const LiftParams& params = {});

struct ObjectBuildResult {
  std::map<int, NodeId> node_of_instance;
  std::vector<int> skipped_instances;  // all noise after denoising
};

// Denoises every instance (largest cluster) and adds it as an object node, in
// input order.
ObjectBuildResult build_object_nodes(SceneGraph& graph, std::span<const InstanceSegment> instances,
                                     const ClusterParams& params = kDefaultObjectCluster);

}  // namespace funcgraph
