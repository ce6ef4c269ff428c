#include "funcgraph/lifting/dbscan.hpp"

#include "funcgraph/error.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <unordered_map>

namespace funcgraph {

namespace {

constexpr int kUnvisited = -2;

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// Uniform grid with cell size eps: all neighbors of a point lie in the 27
// surrounding cells.
class NeighborGrid {
 public:
  NeighborGrid(std::span<const Vec3> points, double eps) : points_(points), eps_(eps), eps2_(eps * eps) {
    for (std::size_t i = 0; i < points.size(); ++i) cells_[key(points[i])].push_back(i);
  }

  void neighbors(std::size_t i, std::vector<std::size_t>& out) const {
    out.clear();
    const CellKey c = key(points_[i]);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          auto it = cells_.find({c.x + dx, c.y + dy, c.z + dz});
          if (it == cells_.end()) continue;
          for (std::size_t j : it->second) {
            if ((points_[j] - points_[i]).squaredNorm() <= eps2_) out.push_back(j);
          }
        }
      }
    }
  }

 private:
  CellKey key(const Vec3& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() / eps_)),
            static_cast<std::int64_t>(std::floor(p.y() / eps_)),
            static_cast<std::int64_t>(std::floor(p.z() / eps_))};
  }

  std::span<const Vec3> points_;
  double eps_;
  double eps2_;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells_;
};

}  // namespace

void ClusterParams::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps) || min_pts < 1) {
    throw Error(ErrorCode::InvalidConfig, "cluster params need eps > 0 and min_pts >= 1");
  }
}

std::vector<int> dbscan(std::span<const Vec3> points, const ClusterParams& params) {
  params.validate();
  for (const auto& p : points) {
    if (!p.allFinite()) throw Error(ErrorCode::InvalidConfig, "dbscan input has non-finite points");
  }
  std::vector<int> labels(points.size(), kUnvisited);
  if (points.empty()) return labels;

  const NeighborGrid grid(points, params.eps);
  const auto min_pts = static_cast<std::size_t>(params.min_pts);
  std::vector<std::size_t> nbrs;
  std::vector<std::size_t> q_nbrs;
  std::deque<std::size_t> frontier;
  int cluster = 0;

  for (std::size_t i = 0; i < points.size(); ++i) {
    if (labels[i] != kUnvisited) continue;
    grid.neighbors(i, nbrs);
    if (nbrs.size() < min_pts) {
      labels[i] = kNoise;
      continue;
    }
    labels[i] = cluster;
    frontier.assign(nbrs.begin(), nbrs.end());
    while (!frontier.empty()) {
      const std::size_t q = frontier.front();
      frontier.pop_front();
      if (labels[q] == kNoise) labels[q] = cluster;  // border point
      if (labels[q] != kUnvisited) continue;
      labels[q] = cluster;
      grid.neighbors(q, q_nbrs);
      if (q_nbrs.size() >= min_pts) frontier.insert(frontier.end(), q_nbrs.begin(), q_nbrs.end());
    }
    ++cluster;
  }
  return labels;
}

std::vector<std::size_t> largest_cluster(std::span<const Vec3> points, const ClusterParams& params) {
  const std::vector<int> labels = dbscan(points, params);
  std::vector<std::size_t> counts;
  for (int l : labels) {
    if (l < 0) continue;
    if (static_cast<std::size_t>(l) >= counts.size()) counts.resize(static_cast<std::size_t>(l) + 1, 0);
    ++counts[static_cast<std::size_t>(l)];
  }
  if (counts.empty()) throw Error(ErrorCode::AllNoise, "every point was classified as noise");
  int best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  }
  std::vector<std::size_t> out;
  out.reserve(counts[static_cast<std::size_t>(best)]);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == best) out.push_back(i);
  }
  return out;
}

std::vector<Vec3> denoise_largest(std::span<const Vec3> points, const ClusterParams& params) {
  std::vector<Vec3> out;
  for (std::size_t i : largest_cluster(points, params)) out.push_back(points[i]);
  return out;
}

}  // namespace funcgraph
