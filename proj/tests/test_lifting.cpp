#include "funcgraph/error.hpp"
#include "funcgraph/lifting/dbscan.hpp"
#include "funcgraph/lifting/element_lifting.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace funcgraph;
using namespace testing_support;

namespace {

FrameRecord camera(int id, const Pose& cam) {
  FrameRecord f;
  f.frame_id = id;
  f.intrinsics = {400.0, 400.0, 159.5, 119.5, 320, 240};
  f.cam_pose = cam;
  return f;
}

// Depth of the world plane z = plane_z along each pixel ray.
void render_wall(FrameRecord& f, double plane_z) {
  f.depth = DepthImage(f.intrinsics.width, f.intrinsics.height);
  const Eigen::Matrix3d r = f.cam_pose.orientation().toRotationMatrix();
  for (int v = 0; v < f.intrinsics.height; ++v) {
    for (int u = 0; u < f.intrinsics.width; ++u) {
      const Vec3 ray((u - f.intrinsics.cx) / f.intrinsics.fx, (v - f.intrinsics.cy) / f.intrinsics.fy, 1.0);
      const double dz = (r * ray).z();
      const double s = (plane_z - f.cam_pose.position().z()) / dz;
      f.depth->at(u, v) = s > 0 ? static_cast<float>(s) : 0.0f;
    }
  }
}

// Mask of the pixels whose wall point falls inside the axis-aligned rectangle.
MaskImage rectangle_mask(const FrameRecord& f, const Vec3& lo, const Vec3& hi) {
  MaskImage m{f.intrinsics.width, f.intrinsics.height,
              std::vector<std::uint8_t>(static_cast<std::size_t>(f.intrinsics.width * f.intrinsics.height), 0)};
  for (int v = 0; v < m.height; ++v) {
    for (int u = 0; u < m.width; ++u) {
      const float d = f.depth->at(u, v);
      if (!DepthImage::is_valid(d)) continue;
      const Vec3 p = backproject(Vec2(u, v), d, f.cam_pose, f.intrinsics);
      if ((p.array() >= lo.array() - 1e-9).all() && (p.array() <= hi.array() + 1e-9).all()) {
        m.values[static_cast<std::size_t>(v * m.width + u)] = 1;
      }
    }
  }
  return m;
}

Pose looking_at_wall(const Vec3& eye, const Vec3& target) {
  const Vec3 z = (target - eye).normalized();
  const Vec3 x = z.cross(Vec3::UnitY()).normalized();
  const Vec3 y = z.cross(x);
  Eigen::Matrix3d r;
  r << x, y, z;
  return Pose(eye, Quat(r));
}

struct HandleScene {
  std::vector<FrameRecord> frames;
  std::vector<ElementMask> masks;
  Vec3 lo{-0.025, -0.01, 0.99};
  Vec3 hi{0.025, 0.01, 1.01};
};

HandleScene two_view_handle() {
  HandleScene s;
  s.frames.push_back(camera(0, looking_at_wall(Vec3(0, 0, 0.4), Vec3(0, 0, 1))));
  s.frames.push_back(camera(1, looking_at_wall(Vec3(0.15, 0.05, 0.45), Vec3(0, 0, 1))));
  for (auto& f : s.frames) {
    render_wall(f, 1.0);
    s.masks.push_back({f.frame_id, 0, "handle", rectangle_mask(f, s.lo, s.hi), 0.9});
  }
  return s;
}

}  // namespace

TEST(Dbscan, TwoSeparatedBlobs) {
  Gen g(31);
  std::vector<Vec3> pts = point_blob(g, Vec3(0, 0, 0), 0.01, 20);
  const auto other = point_blob(g, Vec3(1, 0, 0), 0.01, 20);
  pts.insert(pts.end(), other.begin(), other.end());
  const auto labels = dbscan(pts, {0.05, 5});
  for (int i = 0; i < 20; ++i) EXPECT_EQ(labels[static_cast<std::size_t>(i)], 0);
  for (int i = 20; i < 40; ++i) EXPECT_EQ(labels[static_cast<std::size_t>(i)], 1);
  EXPECT_TRUE(same_partition(labels, dbscan_reference(pts, 0.05, 5)));
}

TEST(Dbscan, IsolatedPointIsNoise) {
  const std::vector<Vec3> pts{Vec3(0, 0, 0)};
  EXPECT_EQ(dbscan(pts, {0.05, 2}), std::vector<int>{kNoise});
}

TEST(Dbscan, IdenticalPointsFormOneCluster) {
  const std::vector<Vec3> pts(7, Vec3(1, 2, 3));
  EXPECT_EQ(dbscan(pts, {0.01, 7}), std::vector<int>(7, 0));
  EXPECT_EQ(dbscan(pts, {0.01, 8}), std::vector<int>(7, kNoise));
}

TEST(Dbscan, EmptyInputAndBadParams) {
  EXPECT_TRUE(dbscan({}, {0.05, 3}).empty());
  const std::vector<Vec3> pts(3, Vec3::Zero());
  EXPECT_EQ(error_code_of([&] { dbscan(pts, {0.0, 3}); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(error_code_of([&] { dbscan(pts, {0.1, 0}); }), ErrorCode::InvalidConfig);
}

TEST(Dbscan, NeighborhoodIsInclusive) {
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(0.5, 0, 0)};
  EXPECT_EQ(dbscan(pts, {0.5, 2}), (std::vector<int>{0, 0}));
}

TEST(Dbscan, BorderPointJoinsLowestLabel) {
  // cores at both ends, the middle point is a border of both clusters
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(0.125, 0, 0), Vec3(0.25, 0, 0), Vec3(0.375, 0, 0), Vec3(0.5, 0, 0)};
  const auto labels = dbscan(pts, {0.125, 3});
  EXPECT_EQ(labels, dbscan_reference(pts, 0.125, 3));
  EXPECT_EQ(labels, (std::vector<int>{0, 0, 0, 0, 0}));
  const std::vector<Vec3> split{Vec3(0, 0, 0), Vec3(0.05, 0, 0), Vec3(0.15, 0, 0), Vec3(0.25, 0, 0), Vec3(0.3, 0, 0)};
  // 0,1 core (cluster 0); 3,4 core (cluster 1); 2 borders both -> 0
  EXPECT_EQ(dbscan(split, {0.1, 2}), (std::vector<int>{0, 0, 0, 0, 0}));
  EXPECT_EQ(dbscan(split, {0.1, 3}), dbscan_reference(split, 0.1, 3));
}

TEST(Dbscan, MatchesReferenceOnRandomSets) {
  Gen g(32);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = clustered_cloud(g, g.integer(0, 200));
    const double eps = g.uniform(0.02, 0.12);
    const int min_pts = g.integer(1, 12);
    EXPECT_EQ(dbscan(pts, {eps, min_pts}), dbscan_reference(pts, eps, min_pts)) << trial;
  }
}

TEST(Dbscan, InputOrderOnlyRenamesCoreClusters) {
  Gen g(33);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = clustered_cloud(g, 150);
    const ClusterParams params{0.05, 5};
    const auto base = dbscan(pts, params);
    std::vector<std::size_t> perm(pts.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g.engine());
    std::vector<Vec3> shuffled;
    for (std::size_t i : perm) shuffled.push_back(pts[i]);
    const auto labels = dbscan(shuffled, params);
    std::vector<int> back(pts.size());
    for (std::size_t i = 0; i < perm.size(); ++i) back[perm[i]] = labels[i];
    // noise set is order independent; core points keep their co-membership
    std::vector<int> core_base;
    std::vector<int> core_back;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EXPECT_EQ(base[i] == kNoise, back[i] == kNoise);
      int neighbors = 0;
      for (const auto& q : pts) neighbors += (q - pts[i]).norm() <= params.eps;
      if (neighbors >= params.min_pts) {
        core_base.push_back(base[i]);
        core_back.push_back(back[i]);
      }
    }
    EXPECT_TRUE(same_partition(core_base, core_back));
  }
}

TEST(Denoise, BlobWithOutliersKeepsBlob) {
  Gen g(34);
  std::vector<Vec3> pts = point_blob(g, Vec3(0, 0, 0), 0.005, 50);
  pts.emplace_back(1, 0, 0);
  pts.emplace_back(0, 1, 0);
  pts.emplace_back(0, 0, 1);
  const auto kept = largest_cluster(pts, kDefaultElementCluster);
  std::vector<std::size_t> expected(50);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(kept, expected);
}

TEST(Denoise, CleanBlobUnchanged) {
  Gen g(35);
  const auto pts = point_blob(g, Vec3(1, 1, 1), 0.003, 40);
  EXPECT_EQ(denoise_largest(pts, kDefaultElementCluster), pts);
}

TEST(Denoise, TooFewPointsIsAllNoise) {
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(0.001, 0, 0)};
  EXPECT_EQ(error_code_of([&] { denoise_largest(pts, {0.02, 5}); }), ErrorCode::AllNoise);
}

TEST(Denoise, TieGoesToLowestLabel) {
  Gen g(36);
  std::vector<Vec3> pts = point_blob(g, Vec3(0, 0, 0), 0.002, 12);
  const auto b = point_blob(g, Vec3(1, 0, 0), 0.002, 12);
  pts.insert(pts.end(), b.begin(), b.end());
  EXPECT_EQ(largest_cluster(pts, kDefaultElementCluster).front(), 0u);
}

TEST(Crop, ExpandedBoundingBox) {
  FrameRecord f = camera(0, Pose::identity());
  f.intrinsics = {100.0, 100.0, 150.0, 150.0, 1000, 1000};
  // projections at (100,100) and (200,200)
  const std::vector<Vec3> pts{Vec3(-0.5, -0.5, 1.0), Vec3(0.5, 0.5, 1.0)};
  const PixelRect r = crop_rect(pts, f, 0.2);
  EXPECT_NEAR(r.min_x, 80.0, 1e-12);
  EXPECT_NEAR(r.min_y, 80.0, 1e-12);
  EXPECT_NEAR(r.max_x, 220.0, 1e-12);
  EXPECT_NEAR(r.max_y, 220.0, 1e-12);
  const PixelRect tight = crop_rect(pts, f, 0.0);
  EXPECT_NEAR(tight.min_x, 100.0, 1e-12);
  EXPECT_NEAR(tight.max_y, 200.0, 1e-12);
}

TEST(Crop, ClampedAtBorder) {
  FrameRecord f = camera(0, Pose::identity());
  // projections at (0,0) and (300,230) in a 320x240 image
  const std::vector<Vec3> pts{Vec3(-159.5 / 400, -119.5 / 400, 1.0), Vec3(140.5 / 400, 110.5 / 400, 1.0)};
  const PixelRect r = crop_rect(pts, f, 0.2);
  EXPECT_EQ(r.min_x, 0.0);
  EXPECT_EQ(r.min_y, 0.0);
  EXPECT_EQ(r.max_x, 319.0);
  EXPECT_EQ(r.max_y, 239.0);
}

TEST(Crop, NothingVisibleThrows) {
  const FrameRecord f = camera(0, Pose::identity());
  const std::vector<Vec3> pts{Vec3(0, 0, -1)};
  EXPECT_EQ(error_code_of([&] { crop_rect(pts, f); }), ErrorCode::NoVisiblePoints);
}

TEST(Lift, TwoViewsOfOneHandleMerge) {
  const HandleScene s = two_view_handle();
  const LiftResult r = lift_masks(s.masks, s.frames, {{0.01, 5}, 0.15, 0.3});
  ASSERT_EQ(r.elements.size(), 1u);
  const LiftedElement& e = r.elements[0];
  EXPECT_EQ(e.label, "handle");
  EXPECT_EQ(e.frame_ids, (std::vector<int>{0, 1}));
  EXPECT_EQ(e.max_score, 0.9);
  EXPECT_LT((e.centroid - Vec3(0, 0, 1)).norm(), 0.01);
  EXPECT_GT(e.points.size(), s.masks[0].mask.count());
}

TEST(Lift, SingleViewEqualsDenoisedBackprojection) {
  const HandleScene s = two_view_handle();
  const std::vector<ElementMask> one{s.masks[0]};
  const LiftParams params{{0.01, 5}, 0.15, 0.3};
  const LiftResult r = lift_masks(one, s.frames, params);
  ASSERT_EQ(r.elements.size(), 1u);
  std::vector<Vec3> raw;
  const FrameRecord& f = s.frames[0];
  for (int v = 0; v < f.intrinsics.height; ++v) {
    for (int u = 0; u < f.intrinsics.width; ++u) {
      if (one[0].mask.at(u, v)) raw.push_back(backproject(Vec2(u, v), f.depth->at(u, v), f.cam_pose, f.intrinsics));
    }
  }
  const auto sorted = [](std::vector<Vec3> v) {
    std::sort(v.begin(), v.end(), [](const Vec3& a, const Vec3& b) {
      return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
    });
    return v;
  };
  EXPECT_EQ(sorted(r.elements[0].points), sorted(denoise_largest(raw, params.cluster)));
}

TEST(Lift, InvalidDepthGroupIsDropped) {
  HandleScene s = two_view_handle();
  for (auto& f : s.frames) std::fill(f.depth->values.begin(), f.depth->values.end(), 0.0f);
  const LiftResult r = lift_masks(s.masks, s.frames);
  EXPECT_TRUE(r.elements.empty());
  EXPECT_EQ(r.dropped_groups, 1u);
}

TEST(Lift, LowConfidenceGroupIsDropped) {
  HandleScene s = two_view_handle();
  for (auto& m : s.masks) m.detection_score = 0.2;
  const LiftResult r = lift_masks(s.masks, s.frames, {{0.01, 5}, 0.15, 0.3});
  EXPECT_TRUE(r.elements.empty());
  EXPECT_EQ(r.dropped_groups, 1u);
}

TEST(Lift, DistantSameLabelPartsAreSplit) {
  HandleScene s = two_view_handle();
  // the gap between the parts is 0.17 m, the second part is partly outside the view
  const Vec3 shift(0.22, 0.0, 0.0);
  const FrameRecord& f = s.frames[0];
  s.masks.push_back({f.frame_id, 0, "handle", rectangle_mask(f, s.lo + shift, s.hi + shift), 0.8});
  const LiftResult r = lift_masks(s.masks, s.frames, {{0.01, 5}, 0.15, 0.3});
  ASSERT_EQ(r.elements.size(), 2u);
  EXPECT_LT((r.elements[0].centroid - Vec3(0, 0, 1)).norm(), 0.01);
  EXPECT_GT(r.elements[1].centroid.x(), 0.19);
  EXPECT_EQ(r.elements[1].frame_ids, std::vector<int>{0});
  EXPECT_EQ(r.elements[1].max_score, 0.8);
  EXPECT_EQ(r.elements[0].max_score, 0.9);
}

TEST(Lift, ViewOrderInvariant) {
  HandleScene s = two_view_handle();
  const LiftParams params{{0.01, 5}, 0.15, 0.3};
  const LiftResult a = lift_masks(s.masks, s.frames, params);
  std::reverse(s.masks.begin(), s.masks.end());
  std::reverse(s.frames.begin(), s.frames.end());
  const LiftResult b = lift_masks(s.masks, s.frames, params);
  ASSERT_EQ(a.elements.size(), b.elements.size());
  for (std::size_t i = 0; i < a.elements.size(); ++i) {
    EXPECT_LT((a.elements[i].centroid - b.elements[i].centroid).norm(), 1e-12);
    EXPECT_EQ(a.elements[i].points.size(), b.elements[i].points.size());
    EXPECT_EQ(a.elements[i].frame_ids, b.elements[i].frame_ids);
  }
}

TEST(Lift, PointsLieInContributingFrustums) {
  const HandleScene s = two_view_handle();
  const LiftResult r = lift_masks(s.masks, s.frames, {{0.01, 5}, 0.15, 0.3});
  for (const auto& e : r.elements) {
    for (const auto& p : e.points) {
      bool inside = false;
      for (const auto& f : s.frames) {
        const auto proj = try_project(p, f.cam_pose, f.intrinsics);
        inside = inside || (proj && f.intrinsics.pixel_index(proj->pixel).has_value());
      }
      EXPECT_TRUE(inside);
    }
  }
}

TEST(Lift, BadInputs) {
  HandleScene s = two_view_handle();
  std::vector<ElementMask> masks = s.masks;
  masks[0].frame_id = 42;
  EXPECT_EQ(error_code_of([&] { lift_masks(masks, s.frames); }), ErrorCode::InvalidConfig);
  masks = s.masks;
  masks[0].mask.width = 10;
  EXPECT_EQ(error_code_of([&] { lift_masks(masks, s.frames); }), ErrorCode::DimensionMismatch);
  s.frames[1].depth.reset();
  EXPECT_EQ(error_code_of([&] { lift_masks(s.masks, s.frames); }), ErrorCode::InvalidConfig);
}

TEST(ObjectNodes, AllNoiseInstancesAreSkipped) {
  Gen g(37);
  SceneGraph graph;
  std::vector<InstanceSegment> inst{{4, "cabinet", point_blob(g, Vec3(0, 0, 0), 0.01, 60)},
                                    {5, "chair", {Vec3(5, 5, 5)}},
                                    {6, "table", point_blob(g, Vec3(2, 0, 0), 0.01, 60)}};
  const ObjectBuildResult r = build_object_nodes(graph, inst);
  EXPECT_EQ(r.skipped_instances, std::vector<int>{5});
  EXPECT_EQ(r.node_of_instance.at(4), 0);
  EXPECT_EQ(r.node_of_instance.at(6), 1);
  EXPECT_EQ(graph.find_object(1)->category_label, "table");
}
