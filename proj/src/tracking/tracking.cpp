#include "funcgraph/tracking/tracking.hpp"

#include "funcgraph/error.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace funcgraph {

Pose to_world(const PnPResult& pnp, const Pose& cam_pose) { return compose(cam_pose, pnp.pose); }

std::vector<Pose> apply_tip_offset(std::span<const Pose> world_from_sphere, const SphereModel& model) {
  std::vector<Pose> out;
  out.reserve(world_from_sphere.size());
  for (const auto& p : world_from_sphere) out.push_back(compose(p, model.tip_offset()));
  return out;
}

TrackResult track(std::span<const MarkerDetection> detections, std::span<const FrameRecord> frames,
                  const SphereModel& model, const TrackConfig& config) {
  TrackResult result;
  result.stats.frames_total = frames.size();

  std::map<int, std::vector<const MarkerDetection*>> by_frame;
  for (const auto& d : detections) by_frame[d.frame_id].push_back(&d);

  std::vector<const FrameRecord*> ordered;
  std::set<int> frame_ids;
  for (const auto& f : frames) {
    ordered.push_back(&f);
    frame_ids.insert(f.frame_id);
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const FrameRecord* a, const FrameRecord* b) { return a->timestamp < b->timestamp; });
  for (const auto& [fid, dets] : by_frame) {
    if (!frame_ids.contains(fid)) {
      result.stats.detections_without_frame += dets.size();
      result.warnings.push_back("detections reference unknown frame " + std::to_string(fid));
    }
  }

  for (const FrameRecord* frame : ordered) {
    auto it = by_frame.find(frame->frame_id);
    if (it == by_frame.end()) continue;
    std::vector<Correspondence> cs;
    std::set<int> used_markers;
    for (const MarkerDetection* d : it->second) {
      const MarkerCorners* corners = model.find(d->marker_id);
      if (corners == nullptr) {
        ++result.stats.unknown_marker_detections;
        result.warnings.push_back("frame " + std::to_string(frame->frame_id) + ": unknown marker " +
                                  std::to_string(d->marker_id));
        continue;
      }
      if (!used_markers.insert(d->marker_id).second) {
        result.warnings.push_back("frame " + std::to_string(frame->frame_id) + ": duplicate marker " +
                                  std::to_string(d->marker_id));
        continue;
      }
      for (std::size_t c = 0; c < 4; ++c) cs.push_back({(*corners)[c], d->corners[c]});
    }
    if (cs.size() < 4) continue;
    ++result.stats.frames_with_enough_points;
    try {
      const PnPResult pnp = solve_pnp(cs, frame->intrinsics, config.pnp);
      result.raw.push_back({frame->timestamp, to_world(pnp, frame->cam_pose), pnp.reproj_rmse});
      ++result.stats.frames_solved;
    } catch (const Error& e) {
      if (!is_numerical(e.code())) throw;
      result.warnings.push_back("frame " + std::to_string(frame->frame_id) + ": " + e.what());
    }
  }

  // Same-time frames would break the filter; keep the first.
  std::vector<PoseMeasurement> unique;
  for (const auto& m : result.raw) {
    if (unique.empty() || m.timestamp > unique.back().timestamp) unique.push_back(m);
  }
  result.raw = unique;

  if (result.raw.size() < 2) {
    std::ostringstream msg;
    msg << "only " << result.raw.size() << " of " << result.stats.frames_total
        << " frames produced a pose (" << result.stats.frames_with_enough_points
        << " had >= 4 usable corners)";
    throw Error(ErrorCode::InsufficientTrack, msg.str());
  }

  const std::vector<FilteredPose> filtered = filter_trajectory(result.raw, config.filter);
  result.trajectory.reserve(filtered.size());
  for (const auto& f : filtered) {
    result.trajectory.push_back({f.timestamp, compose(f.pose, model.tip_offset())});
  }
  return result;
}

}  // namespace funcgraph
