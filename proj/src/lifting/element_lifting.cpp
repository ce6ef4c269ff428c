#include "funcgraph/lifting/element_lifting.hpp"

#include "funcgraph/error.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <tuple>

namespace funcgraph {

std::size_t MaskImage::count() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

PixelRect crop_rect(std::span<const Vec3> object_points, const FrameRecord& frame, double expansion,
                    double depth_tol) {
  if (expansion < 0.0) throw Error(ErrorCode::InvalidConfig, "crop expansion must be >= 0");
  constexpr double inf = std::numeric_limits<double>::infinity();
  PixelRect r{inf, inf, -inf, -inf};
  bool any = false;
  for (const auto& p : object_points) {
    auto proj = visible_projection(p, frame, depth_tol);
    if (!proj) continue;
    any = true;
    r.min_x = std::min(r.min_x, proj->pixel.x());
    r.min_y = std::min(r.min_y, proj->pixel.y());
    r.max_x = std::max(r.max_x, proj->pixel.x());
    r.max_y = std::max(r.max_y, proj->pixel.y());
  }
  if (!any) {
    throw Error(ErrorCode::NoVisiblePoints,
                "no object point is visible in frame " + std::to_string(frame.frame_id));
  }
  const double grow_x = expansion * (r.max_x - r.min_x);
  const double grow_y = expansion * (r.max_y - r.min_y);
  const double max_u = frame.intrinsics.width - 1.0;
  const double max_v = frame.intrinsics.height - 1.0;
  return {std::clamp(r.min_x - grow_x, 0.0, max_u), std::clamp(r.min_y - grow_y, 0.0, max_v),
          std::clamp(r.max_x + grow_x, 0.0, max_u), std::clamp(r.max_y + grow_y, 0.0, max_v)};
}

namespace {

bool lex_less(const Vec3& a, const Vec3& b) {
  return std::tie(a.x(), a.y(), a.z()) < std::tie(b.x(), b.y(), b.z());
}

void append_mask_points(const ElementMask& m, const FrameRecord& frame, std::vector<Vec3>& out) {
  if (m.mask.width != frame.intrinsics.width || m.mask.height != frame.intrinsics.height ||
      m.mask.values.size() != static_cast<std::size_t>(m.mask.width) * m.mask.height) {
    throw Error(ErrorCode::DimensionMismatch,
                "mask '" + m.label + "' size differs from frame " + std::to_string(frame.frame_id));
  }
  if (!frame.depth) {
    throw Error(ErrorCode::InvalidConfig, "frame " + std::to_string(frame.frame_id) + " has no depth");
  }
  for (int v = 0; v < m.mask.height; ++v) {
    for (int u = 0; u < m.mask.width; ++u) {
      if (!m.mask.at(u, v)) continue;
      const float d = frame.depth->at(u, v);
      if (!DepthImage::is_valid(d)) continue;
      out.push_back(backproject(Vec2(u, v), d, frame.cam_pose, frame.intrinsics));
    }
  }
}

}  // namespace

LiftResult lift_masks(std::span<const ElementMask> masks, std::span<const FrameRecord> frames,
                      const LiftParams& params) {
  params.cluster.validate();
  if (!(params.split_eps > 0.0)) throw Error(ErrorCode::InvalidConfig, "split_eps must be positive");

  std::map<int, const FrameRecord*> frame_by_id;
  for (const auto& f : frames) frame_by_id[f.frame_id] = &f;

  std::map<std::pair<NodeId, std::string>, std::vector<const ElementMask*>> groups;
  for (const auto& m : masks) {
    if (!frame_by_id.contains(m.frame_id)) {
      throw Error(ErrorCode::InvalidConfig, "mask '" + m.label + "' references missing frame " +
                                                std::to_string(m.frame_id));
    }
    groups[{m.object_id, m.label}].push_back(&m);
  }

  LiftResult result;
  for (const auto& [key, group] : groups) {
    double group_score = 0.0;
    // each point remembers the mask it came from
    std::vector<std::pair<Vec3, const ElementMask*>> merged;
    for (const ElementMask* m : group) {
      group_score = std::max(group_score, m->detection_score);
      std::vector<Vec3> pts;
      append_mask_points(*m, *frame_by_id.at(m->frame_id), pts);
      for (const auto& p : pts) merged.emplace_back(p, m);
    }
    if (group_score < params.min_detection_score || merged.empty()) {
      ++result.dropped_groups;
      continue;
    }
    // Canonical order makes the result independent of view order.
    std::sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) {
      if (lex_less(a.first, b.first)) return true;
      if (lex_less(b.first, a.first)) return false;
      return std::make_pair(a.second->frame_id, a.second->detection_score) <
             std::make_pair(b.second->frame_id, b.second->detection_score);
    });
    std::vector<Vec3> points;
    points.reserve(merged.size());
    for (const auto& entry : merged) points.push_back(entry.first);

    const std::vector<int> parts = dbscan(points, ClusterParams{params.split_eps, 1});
    const int n_parts = parts.empty() ? 0 : *std::max_element(parts.begin(), parts.end()) + 1;
    std::size_t kept = 0;
    for (int part = 0; part < n_parts; ++part) {
      std::vector<std::size_t> members;
      std::vector<Vec3> part_points;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (parts[i] == part) {
          members.push_back(i);
          part_points.push_back(points[i]);
        }
      }
      std::vector<std::size_t> keep;
      try {
        keep = largest_cluster(part_points, params.cluster);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::AllNoise) throw;
        continue;
      }
      LiftedElement el;
      el.object_id = key.first;
      el.label = key.second;
      std::set<int> frame_ids;
      for (std::size_t k : keep) {
        const auto& [point, mask] = merged[members[k]];
        el.points.push_back(point);
        frame_ids.insert(mask->frame_id);
        el.max_score = std::max(el.max_score, mask->detection_score);
      }
      el.centroid = mean_point(el.points);
      el.frame_ids.assign(frame_ids.begin(), frame_ids.end());
      result.elements.push_back(std::move(el));
      ++kept;
    }
    if (kept == 0) ++result.dropped_groups;
  }
  return result;
}

ObjectBuildResult build_object_nodes(SceneGraph& graph, std::span<const InstanceSegment> instances,
                                     const ClusterParams& params) {
  ObjectBuildResult out;
  for (const auto& inst : instances) {
    if (inst.points.empty()) {
      throw Error(ErrorCode::EmptyPointCloud, "instance " + std::to_string(inst.instance_id) + " has no points");
    }
    std::vector<Vec3> clean;
    try {
      clean = denoise_largest(inst.points, params);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AllNoise) throw;
      out.skipped_instances.push_back(inst.instance_id);
      continue;
    }
    out.node_of_instance[inst.instance_id] = graph.add_object_node(inst.label, std::move(clean));
  }
  return out;
}

}  // namespace funcgraph
