#pragma once

#include "funcgraph/geometry/pose.hpp"

#include <span>
#include <vector>

namespace funcgraph {

inline constexpr int kNoise = -1;

struct ClusterParams {
  double eps = 0.02;  // meters, inclusive neighborhood radius
  int min_pts = 10;   // neighbors needed for a core point, the point itself included

  void validate() const;
};

// Density-based clustering. Labels are 0..C-1 in order of each cluster's
// lowest-index core point; noise is kNoise. Points are scanned in input order,
// so a border point reachable from several clusters joins the lowest label.
std::vector<int> dbscan(std::span<const Vec3> points, const ClusterParams& params);

// Indices of the most populated cluster (ties: lowest label). Throws AllNoise.
std::vector<std::size_t> largest_cluster(std::span<const Vec3> points, const ClusterParams& params);

// Points of largest_cluster(), in input order. Throws AllNoise.
std::vector<Vec3> denoise_largest(std::span<const Vec3> points, const ClusterParams& params);

}  // namespace funcgraph
