#pragma once

#include "funcgraph/tracking/kalman.hpp"
#include "funcgraph/tracking/pnp.hpp"
#include "funcgraph/tracking/sphere_model.hpp"
#include "funcgraph/views/frame.hpp"

#include <span>
#include <string>
#include <vector>

namespace funcgraph {

// T_world<-sphere = T_world<-cam * T_cam<-sphere
Pose to_world(const PnPResult& pnp, const Pose& cam_pose);

// T_world<-tip = T_world<-sphere * T_sphere<-tip, elementwise.
std::vector<Pose> apply_tip_offset(std::span<const Pose> world_from_sphere, const SphereModel& model);

struct TrackConfig {
  FilterConfig filter;
  PnPOptions pnp;
};

struct TrackStats {
  std::size_t frames_total = 0;
  std::size_t frames_with_enough_points = 0;
  std::size_t frames_solved = 0;
  std::size_t unknown_marker_detections = 0;
  std::size_t detections_without_frame = 0;
};

struct TrackResult {
  std::vector<TimedPose> trajectory;      // smoothed T_world<-tip
  std::vector<PoseMeasurement> raw;       // unfiltered T_world<-sphere per solved frame
  TrackStats stats;
  std::vector<std::string> warnings;
};

// solve_pnp -> to_world -> filter_trajectory -> apply_tip_offset, frames in
// timestamp order. Frames with fewer than 4 usable corners or a failed PnP are
// skipped; the filter bridges them by prediction. Throws InsufficientTrack when
// fewer than 2 frames solve.
TrackResult track(std::span<const MarkerDetection> detections, std::span<const FrameRecord> frames,
                  const SphereModel& model, const TrackConfig& config = {});

}  // namespace funcgraph
