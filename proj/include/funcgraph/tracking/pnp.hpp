#pragma once

#include "funcgraph/geometry/camera.hpp"

#include <span>
#include <vector>

namespace funcgraph {

struct Correspondence {
  Vec3 object;  // model frame, meters
  Vec2 image;   // pixels
};

struct PnPOptions {
  int max_iterations = 100;
  double step_tolerance = 1e-10;
  double max_condition = 1e12;
};

struct PnPResult {
  Pose pose;  // T_cam<-model
  double reproj_rmse = 0.0;
  int n_points = 0;
  int iterations = 0;
  std::vector<double> rmse_history;  // initial estimate, then each accepted step
};

// Pose minimizing the summed squared pixel reprojection error. Initialized by a
// normalized DLT (or a plane homography when the model points are coplanar or
// too few for DLT), refined with Levenberg-Marquardt on a left SO(3) x R^3
// perturbation.
// Throws TooFewPoints (< 4), DegenerateConfiguration (collinear model points or
// normal-equation condition number above max_condition), NoConvergence.
PnPResult solve_pnp(std::span<const Correspondence> correspondences, const CameraIntrinsics& k,
                    const PnPOptions& options = {});

// Root-mean-square pixel distance of the projected model points (points behind
// the camera count as infinitely wrong).
double reprojection_rmse(std::span<const Correspondence> correspondences, const Pose& cam_from_model,
                         const CameraIntrinsics& k);

}  // namespace funcgraph
