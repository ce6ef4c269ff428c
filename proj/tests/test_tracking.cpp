#include "funcgraph/bench/metrics.hpp"
#include "funcgraph/bench/scenario.hpp"
#include "funcgraph/bench/suite.hpp"
#include "funcgraph/error.hpp"
#include "funcgraph/geometry/rotation.hpp"
#include "funcgraph/tracking/kalman.hpp"
#include "funcgraph/tracking/pnp.hpp"
#include "funcgraph/tracking/sphere_model.hpp"
#include "funcgraph/tracking/tracking.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace funcgraph;
using namespace testing_support;

namespace {

const CameraIntrinsics kCam{600.0, 600.0, 319.5, 239.5, 640, 480};

// Corners of the markers facing a camera at cam_from_model, projected.
std::vector<Correspondence> sphere_view(const SphereModel& s, const Pose& cam_from_model, Gen* noise = nullptr,
                                        double sigma = 0.0, std::size_t max_markers = 100,
                                        const CameraIntrinsics& cam = kCam) {
  std::vector<Correspondence> out;
  const Pose model_from_cam = invert(cam_from_model);
  std::size_t used = 0;
  for (const auto& [id, corners] : s.markers()) {
    if (s.normal(id).dot(model_from_cam.position() - s.center(id)) <= 0.0) continue;
    if (used++ >= max_markers) break;
    for (const auto& c : corners) {
      Vec2 px = project(c, invert(cam_from_model), cam).pixel;
      if (noise) px += Vec2(noise->normal(sigma), noise->normal(sigma));
      out.push_back({c, px});
    }
  }
  return out;
}

Pose random_view(Gen& g, double range) {
  const Vec3 eye = g.unit3() * range;
  // camera frame looking at the origin; returns T_cam<-model
  return invert(look_at(eye, Vec3::Zero(), std::abs(eye.normalized().z()) > 0.9 ? Vec3::UnitX() : Vec3::UnitZ()));
}

std::vector<PoseMeasurement> measurements(const std::vector<Pose>& poses, double dt, double rmse = 0.3) {
  std::vector<PoseMeasurement> out;
  for (std::size_t i = 0; i < poses.size(); ++i) out.push_back({dt * static_cast<double>(i), poses[i], rmse});
  return out;
}

}  // namespace

TEST(Sphere, PolyhedralSphereIsValid) {
  const SphereModel s = make_polyhedral_sphere(0.05, 0.03, Pose::translation(0, 0, -0.15));
  EXPECT_EQ(s.markers().size(), 26u);
  for (const auto& [id, corners] : s.markers()) {
    EXPECT_NEAR(s.center(id).norm(), 0.05, 1e-12);
    EXPECT_NEAR(s.normal(id).dot(s.center(id).normalized()), 1.0, 1e-12);
    EXPECT_NEAR((corners[1] - corners[0]).norm(), 0.03, 1e-12);
  }
}

TEST(Sphere, RejectsBadModels) {
  std::map<int, MarkerCorners> few;
  const SphereModel s = make_polyhedral_sphere(0.05, 0.03, Pose::identity());
  for (int i = 0; i < 5; ++i) few[i] = s.markers().at(i);
  EXPECT_EQ(error_code_of([&] { SphereModel(few, Pose::identity()); }), ErrorCode::InvalidConfig);
  auto bent = s.markers();
  bent[3][2] += Vec3(0.0, 0.0, 0.001) + s.normal(3) * 0.001;
  EXPECT_EQ(error_code_of([&] { SphereModel(bent, Pose::identity()); }), ErrorCode::InvalidConfig);
  auto flipped = s.markers();
  std::swap(flipped[4][1], flipped[4][3]);
  EXPECT_EQ(error_code_of([&] { SphereModel(flipped, Pose::identity()); }), ErrorCode::InvalidConfig);
}

TEST(PnP, ExactRecoveryFromSphereViews) {
  Gen g(41);
  const SphereModel s = make_polyhedral_sphere(0.05, 0.03, Pose::identity());
  for (int trial = 0; trial < 200; ++trial) {
    const Pose truth = random_view(g, g.uniform(0.3, 1.5));
    const auto corr = sphere_view(s, truth);
    const PnPResult r = solve_pnp(corr, kCam);
    EXPECT_LT((r.pose.position() - truth.position()).norm(), 1e-6);
    EXPECT_LT(geodesic_angle(r.pose.orientation(), truth.orientation()), 1e-6);
    EXPECT_LT(r.reproj_rmse, 1e-8);
    EXPECT_EQ(r.n_points, static_cast<int>(corr.size()));
  }
}

TEST(PnP, ExactRecoveryFromSingleMarker) {
  Gen g(42);
  const SphereModel s = make_polyhedral_sphere(0.05, 0.03, Pose::identity());
  for (int trial = 0; trial < 100; ++trial) {
    const Pose truth = random_view(g, g.uniform(0.3, 1.0));
    const auto corr = sphere_view(s, truth, nullptr, 0.0, 1);
    ASSERT_EQ(corr.size(), 4u);
    const PnPResult r = solve_pnp(corr, kCam);
    EXPECT_LT((r.pose.position() - truth.position()).norm(), 1e-6);
    EXPECT_LT(r.reproj_rmse, 1e-8);
  }
}

TEST(PnP, NoisyEightMarkersAtOneMeter) {
  // benchmark camera: 1280x960 at fx 1000
  const CameraIntrinsics cam{1000.0, 1000.0, 639.5, 479.5, 1280, 960};
  Gen g(43);
  const SphereModel s = make_polyhedral_sphere(0.05, 0.03, Pose::identity());
  std::vector<double> errors;
  for (int trial = 0; trial < 100; ++trial) {
    const Pose truth = random_view(g, 1.0);
    const auto corr = sphere_view(s, truth, &g, 0.5, 8, cam);
    ASSERT_EQ(corr.size(), 32u);
    errors.push_back((solve_pnp(corr, cam).pose.position() - truth.position()).norm());
  }
  std::sort(errors.begin(), errors.end());
  EXPECT_LT(errors[94], 0.005) << "95th percentile " << errors[94];
}

TEST(PnP, RmseNeverIncreasesAcrossIterations) {
  Gen g(44);
  const SphereModel s = make_polyhedral_sphere(0.05, 0.03, Pose::identity());
  for (int trial = 0; trial < 100; ++trial) {
    const auto corr = sphere_view(s, random_view(g, g.uniform(0.3, 1.5)), &g, 2.0);
    const PnPResult r = solve_pnp(corr, kCam);
    ASSERT_FALSE(r.rmse_history.empty());
    for (std::size_t i = 1; i < r.rmse_history.size(); ++i) EXPECT_LE(r.rmse_history[i], r.rmse_history[i - 1]);
    EXPECT_DOUBLE_EQ(r.rmse_history.back(), r.reproj_rmse);
  }
}

TEST(PnP, TooFewAndDegenerate) {
  const std::vector<Correspondence> three{{Vec3(0, 0, 0), Vec2(1, 1)}, {Vec3(1, 0, 0), Vec2(2, 1)}, {Vec3(0, 1, 0), Vec2(1, 2)}};
  EXPECT_EQ(error_code_of([&] { solve_pnp(three, kCam); }), ErrorCode::TooFewPoints);
  std::vector<Correspondence> line;
  for (int i = 0; i < 6; ++i) {
    const Vec3 p(0.01 * i, 0.0, 0.0);
    line.push_back({p, project(p, invert(Pose::translation(0, 0, 1)), kCam).pixel});
  }
  EXPECT_EQ(error_code_of([&] { solve_pnp(line, kCam); }), ErrorCode::DegenerateConfiguration);
}

TEST(Composition, ToWorldExamples) {
  PnPResult r;
  r.pose = Pose::translation(0, 0, 2);
  EXPECT_EQ(to_world(r, Pose::identity()).position(), Vec3(0, 0, 2));
  EXPECT_EQ(to_world(r, Pose::translation(1, 0, 0)).position(), Vec3(1, 0, 2));
  Gen g(45);
  for (int i = 0; i < 100; ++i) {
    r.pose = g.pose();
    const Pose cam = g.pose();
    const Pose w = to_world(r, cam);
    const Pose c = compose(cam, r.pose);
    EXPECT_LT((w.position() - c.position()).norm(), 1e-12);
    EXPECT_LT(geodesic_angle(w.orientation(), c.orientation()), 1e-12);
  }
}

TEST(Composition, TipOffset) {
  const std::vector<Pose> poses{Pose::translation(1, 2, 3), Pose::translation(0, 0, 0)};
  const SphereModel ident = make_polyhedral_sphere(0.05, 0.03, Pose::identity());
  const auto same = apply_tip_offset(poses, ident);
  EXPECT_EQ(same[0].position(), poses[0].position());
  const SphereModel down = make_polyhedral_sphere(0.05, 0.03, Pose::translation(0, 0, -0.1));
  const auto shifted = apply_tip_offset(poses, down);
  EXPECT_LT((shifted[0].position() - Vec3(1, 2, 2.9)).norm(), 1e-15);
  EXPECT_LT((shifted[1].position() - Vec3(0, 0, -0.1)).norm(), 1e-15);
  Gen g(46);
  const Pose offset = g.pose(0.2);
  const SphereModel any = make_polyhedral_sphere(0.05, 0.03, offset);
  std::vector<Pose> random;
  for (int i = 0; i < 50; ++i) random.push_back(g.pose());
  const auto out = apply_tip_offset(random, any);
  for (std::size_t i = 0; i < random.size(); ++i) {
    EXPECT_LT((out[i].position() - compose(random[i], offset).position()).norm(), 1e-12);
  }
}

TEST(Kalman, FirstOutputEqualsFirstMeasurement) {
  Gen g(47);
  const Pose first = g.pose();
  const auto out = filter_trajectory(measurements({first, g.pose(), g.pose()}, 0.1));
  EXPECT_LT((out[0].pose.position() - first.position()).norm(), 1e-15);
  EXPECT_LT(geodesic_angle(out[0].pose.orientation(), first.orientation()), 1e-12);
}

TEST(Kalman, ConstantInputStaysConstant) {
  const Pose p(Vec3(0.3, -0.2, 1.0), Quat(Eigen::AngleAxisd(0.7, Vec3(1, 1, 0).normalized())));
  const auto out = filter_trajectory(measurements(std::vector<Pose>(100, p), 1.0 / 30));
  for (const auto& f : out) {
    EXPECT_LT((f.pose.position() - p.position()).norm(), 1e-12);
    EXPECT_LT(geodesic_angle(f.pose.orientation(), p.orientation()), 1e-12);
  }
}

TEST(Kalman, ReducesVarianceOfNoisyConstantPose) {
  Gen g(48);
  std::vector<Pose> raw;
  for (int i = 0; i < 500; ++i) raw.push_back(Pose::translation(g.normal(0.005), g.normal(0.005), 1.0 + g.normal(0.005)));
  FilterConfig config;
  config.sigma_position = 0.005;
  const auto out = filter_trajectory(measurements(raw, 1.0 / 30), config);
  double raw_var = 0.0;
  double out_var = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw_var += (raw[i].position() - Vec3(0, 0, 1)).squaredNorm();
    out_var += (out[i].pose.position() - Vec3(0, 0, 1)).squaredNorm();
  }
  EXPECT_LT(out_var, raw_var);
}

TEST(Kalman, DownweightsHighRmseOutlier) {
  std::vector<PoseMeasurement> raw;
  const double dt = 1.0 / 30;
  for (int i = 0; i < 120; ++i) {
    const Vec3 truth(0.2 * i * dt, 0.0, 1.0);
    raw.push_back({i * dt, Pose(truth, Quat::Identity()), 0.3});
  }
  raw[80].pose = Pose(raw[80].pose.position() + Vec3(0, 0.05, 0), Quat::Identity());
  raw[80].reproj_rmse = 20.0;
  const auto out = filter_trajectory(raw);
  const Vec3 truth(0.2 * 80 * dt, 0.0, 1.0);
  EXPECT_LT((out[80].pose.position() - truth).norm(), 0.25 * 0.05);
}

TEST(Kalman, PassThroughWithoutAdaptationAndHugeProcessNoise) {
  Gen g(49);
  std::vector<PoseMeasurement> raw;
  Quat q = g.rotation();
  for (int i = 0; i < 200; ++i) {
    q = exp_map(g.gaussian3(0.05)) * q;
    raw.push_back({i / 30.0, Pose(g.vec3(-1, 1), q), g.uniform(0, 5)});
  }
  FilterConfig config;
  config.alpha = 0.0;
  config.sigma_acc = 1e8;
  config.sigma_ang_acc = 1e8;
  const auto out = filter_trajectory(raw, config);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    EXPECT_LT((out[i].pose.position() - raw[i].pose.position()).norm(), 1e-9);
    EXPECT_LT(geodesic_angle(out[i].pose.orientation(), raw[i].pose.orientation()), 1e-9);
  }
}

TEST(Kalman, UnwrapsAcrossPi) {
  std::vector<Pose> poses;
  for (int deg = 150; deg <= 230; deg += 2) poses.push_back(Pose::rotation(Vec3::UnitZ(), deg * kDeg));
  const auto out = filter_trajectory(measurements(poses, 1.0 / 30));
  for (std::size_t i = 1; i < out.size(); ++i) {
    EXPECT_LT((out[i].rotation_vector - out[i - 1].rotation_vector).norm(), kPi);
    EXPECT_GT(out[i].rotation_vector.z(), out[i - 1].rotation_vector.z());
  }
  EXPECT_GT(out.back().rotation_vector.z(), kPi);
}

TEST(Kalman, CovarianceStaysSymmetricPositiveDefinite) {
  Gen g(50);
  PoseKalmanFilter f(FilterConfig{});
  double t = 0.0;
  Quat q = Quat::Identity();
  Vec3 p = Vec3::Zero();
  for (int i = 0; i < 100000; ++i) {
    t += g.uniform(1e-4, 0.2);
    p += g.gaussian3(0.01);
    q = exp_map(g.gaussian3(0.05)) * q;
    f.step({t, Pose(p, q), g.uniform(0.0, 30.0)});
    if (i % 97 == 0) {
      const StateCovariance& c = f.state().covariance;
      ASSERT_LT((c - c.transpose()).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + c.cwiseAbs().maxCoeff()));
      Eigen::SelfAdjointEigenSolver<StateCovariance> es(c);
      ASSERT_GT(es.eigenvalues().minCoeff(), 0.0) << i;
    }
  }
}

TEST(Kalman, Errors) {
  const std::vector<PoseMeasurement> backwards{{1.0, Pose::identity(), 0.0}, {0.5, Pose::identity(), 0.0}};
  EXPECT_EQ(error_code_of([&] { filter_trajectory(backwards); }), ErrorCode::NonMonotonicTimestamps);
  EXPECT_EQ(error_code_of([&] { filter_trajectory({}); }), ErrorCode::EmptySequence);
  FilterConfig bad;
  bad.alpha = -1.0;
  EXPECT_EQ(error_code_of([&] { bad.validate(); }), ErrorCode::InvalidConfig);
}

TEST(Kalman, SmoothingPassKeepsEndpointAndReducesNoise) {
  Gen g(51);
  std::vector<Pose> raw;
  for (int i = 0; i < 300; ++i) raw.push_back(Pose::translation(0.1 * i / 30.0 + g.normal(0.004), g.normal(0.004), 1.0));
  FilterConfig causal;
  causal.sigma_position = 0.004;
  FilterConfig smooth = causal;
  smooth.smooth = true;
  const auto a = filter_trajectory(measurements(raw, 1.0 / 30), causal);
  const auto b = filter_trajectory(measurements(raw, 1.0 / 30), smooth);
  EXPECT_LT((a.back().pose.position() - b.back().pose.position()).norm(), 1e-12);
  double ea = 0.0;
  double eb = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const Vec3 truth(0.1 * static_cast<double>(i) / 30.0, 0, 1);
    ea += (a[i].pose.position() - truth).squaredNorm();
    eb += (b[i].pose.position() - truth).squaredNorm();
  }
  EXPECT_LT(eb, ea);
}

TEST(Track, NoiselessDrawerPullIsExact) {
  const ScenarioConfig config = suite_scenario(0, JointType::Prismatic, 0.3, 0.0, ViewSetting::Static, {});
  const SphereModel sphere = make_sphere(config.sphere);
  const SyntheticDemo demo = generate(config, sphere);
  FilterConfig passthrough;
  passthrough.sigma_position = 1e-9;
  passthrough.sigma_rotation = 1e-9;
  const TrackResult r = track(demo.detections, demo.frames, sphere, {passthrough, {}});
  EXPECT_EQ(r.stats.frames_solved, demo.frames.size());
  const AlignedRmse e = trajectory_rmse_aligned(r.trajectory, demo.ground_truth, 0.5 / config.frame_rate);
  EXPECT_LT(e.rmse, 1e-5);
  EXPECT_EQ(e.unmatched, 0u);
}

TEST(Track, WorldOutputIndependentOfCameraMotion) {
  FilterConfig passthrough;
  passthrough.sigma_position = 1e-9;
  passthrough.sigma_rotation = 1e-9;
  for (std::size_t index : {10u, 11u}) {
    ScenarioConfig a = suite_scenario(index, JointType::Revolute, 90 * kDeg, 0.4, ViewSetting::Static, {});
    ScenarioConfig b = suite_scenario(index, JointType::Revolute, 90 * kDeg, 0.4, ViewSetting::Dynamic, {});
    const SphereModel sphere = make_sphere(a.sphere);
    const SyntheticDemo da = generate(a, sphere);
    const SyntheticDemo db = generate(b, sphere);
    const TrackResult ra = track(da.detections, da.frames, sphere, {passthrough, {}});
    const TrackResult rb = track(db.detections, db.frames, sphere, {passthrough, {}});
    ASSERT_EQ(ra.trajectory.size(), rb.trajectory.size());
    for (std::size_t i = 0; i < ra.trajectory.size(); ++i) {
      EXPECT_LT((ra.trajectory[i].pose.position() - rb.trajectory[i].pose.position()).norm(), 1e-6);
    }
  }
}

TEST(Track, NoisyMovingCameraStaysUnderOneCentimeter) {
  std::vector<double> errs;
  for (std::uint64_t seed = 0; seed < 9; ++seed) {
    const ScenarioConfig config =
        suite_scenario(seed, seed % 2 ? JointType::Revolute : JointType::Prismatic, seed % 2 ? 1.2 : 0.3, 0.4,
                       ViewSetting::Dynamic, {0.5, 0.1, 30.0, seed});
    const SphereModel sphere = make_sphere(config.sphere);
    const SyntheticDemo demo = generate(config, sphere);
    FilterConfig matched;
    matched.sigma_position = 0.002;
    matched.sigma_rotation = 0.005;
    const TrackResult r = track(demo.detections, demo.frames, sphere, {matched, {}});
    errs.push_back(trajectory_rmse_aligned(r.trajectory, demo.ground_truth, 0.5 / config.frame_rate).rmse);
  }
  std::sort(errs.begin(), errs.end());
  EXPECT_LT(errs[errs.size() / 2], 0.01);
}

TEST(Track, GapsAreBridgedAndReported) {
  ScenarioConfig config = suite_scenario(0, JointType::Prismatic, 0.3, 0.0, ViewSetting::Static, {});
  const SphereModel sphere = make_sphere(config.sphere);
  SyntheticDemo demo = generate(config, sphere);
  std::erase_if(demo.detections, [](const MarkerDetection& d) { return d.frame_id % 3 == 1; });
  demo.detections.push_back({0, 999, {}});
  demo.detections.push_back({100000, 0, {}});
  const TrackResult r = track(demo.detections, demo.frames, sphere);
  EXPECT_EQ(r.stats.frames_total, demo.frames.size());
  EXPECT_LT(r.stats.frames_solved, demo.frames.size());
  EXPECT_EQ(r.stats.unknown_marker_detections, 1u);
  EXPECT_EQ(r.stats.detections_without_frame, 1u);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Track, InsufficientTrack) {
  const ScenarioConfig config = suite_scenario(0, JointType::Prismatic, 0.3, 0.0, ViewSetting::Static, {});
  const SphereModel sphere = make_sphere(config.sphere);
  const SyntheticDemo demo = generate(config, sphere);
  std::vector<MarkerDetection> sparse;
  for (const auto& d : demo.detections) {
    if (d.frame_id == demo.frames.front().frame_id) sparse.push_back(d);
  }
  EXPECT_EQ(error_code_of([&] { track(sparse, demo.frames, sphere); }), ErrorCode::InsufficientTrack);
  EXPECT_EQ(error_code_of([&] { track({}, demo.frames, sphere); }), ErrorCode::InsufficientTrack);
}
