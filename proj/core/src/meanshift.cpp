#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "safecorridor/error.hpp"
#include "safecorridor/gmm.hpp"

namespace safecorridor {

namespace {

// Hash grid over the leading (up to three) coordinates with cells as wide as
// the kernel support, so each kernel sum only visits neighbouring cells.
class NeighborGrid {
 public:
  static constexpr int kMaxGridDims = 3;
  using Key = std::array<long long, kMaxGridDims>;

  NeighborGrid(std::span<const Eigen::VectorXd> points, double cell)
      : points_(points), cell_(cell),
        grid_dims_(std::min<int>(kMaxGridDims, static_cast<int>(points.front().size()))) {
    for (std::size_t i = 0; i < points.size(); ++i) cells_[key(points[i])].push_back(i);
  }

  template <typename Visit>
  void for_each_near(const Eigen::VectorXd& y, Visit&& visit) const {
    const Key center = key(y);
    Key offset{};
    offset.fill(-1);
    for (int dim = grid_dims_; dim < kMaxGridDims; ++dim) offset[dim] = 0;
    while (true) {
      Key probe = center;
      for (int d = 0; d < grid_dims_; ++d) probe[d] += offset[d];
      if (auto it = cells_.find(probe); it != cells_.end()) {
        for (std::size_t idx : it->second) visit(points_[idx]);
      }
      int d = 0;
      for (; d < grid_dims_; ++d) {
        if (++offset[d] <= 1) break;
        offset[d] = -1;
      }
      if (d == grid_dims_) break;
    }
  }

 private:
  Key key(const Eigen::VectorXd& p) const {
    Key k{};
    for (int d = 0; d < grid_dims_; ++d) k[d] = static_cast<long long>(std::floor(p[d] / cell_));
    return k;
  }

  std::span<const Eigen::VectorXd> points_;
  double cell_;
  int grid_dims_;
  std::map<Key, std::vector<std::size_t>> cells_;
};

bool lexicographic_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

ClusterAssignment meanshift_cluster(std::span<const Eigen::VectorXd> samples, double bandwidth,
                                    const MeanShiftOptions& options) {
  if (samples.empty()) throw Error(ErrorCode::kNoSamples, "no samples");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw Error(ErrorCode::kInvalidArgument, "bandwidth must be positive");
  }
  const auto n = samples.front().size();
  for (const auto& p : samples) {
    if (p.size() != n || !p.allFinite()) throw Error(ErrorCode::kInvalidSample, "invalid sample");
  }

  const double cutoff = options.cutoff_factor * bandwidth;
  const double cutoff_sq = cutoff * cutoff;
  const double inv_two_b2 = 0.5 / (bandwidth * bandwidth);
  const double tol = options.tol_factor * bandwidth;
  const NeighborGrid grid(samples, cutoff);

  const double snap_sq = std::pow(options.snap_factor * bandwidth, 2);
  std::vector<Eigen::VectorXd> anchors;  // distinct converged locations seen so far
  auto nearby_anchor = [&](const Eigen::VectorXd& y) -> const Eigen::VectorXd* {
    for (const auto& a : anchors) {
      if ((a - y).squaredNorm() <= snap_sq) return &a;
    }
    return nullptr;
  };

  std::vector<Eigen::VectorXd> converged(samples.size());
  Eigen::VectorXd numerator(n);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Eigen::VectorXd y = samples[i];
    bool snapped = false;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
      if (snap_sq > 0.0) {
        if (const auto* a = nearby_anchor(y)) {
          y = *a;
          snapped = true;
          break;
        }
      }
      numerator.setZero();
      double denominator = 0.0;
      grid.for_each_near(y, [&](const Eigen::VectorXd& x) {
        const double d2 = (x - y).squaredNorm();
        if (d2 > cutoff_sq) return;
        const double w = std::exp(-d2 * inv_two_b2);
        numerator += w * x;
        denominator += w;
      });
      if (!(denominator > 0.0)) break;
      const Eigen::VectorXd next = numerator / denominator;
      const double shift = (next - y).norm();
      y = next;
      if (shift < tol) break;
    }
    if (!snapped && snap_sq > 0.0) anchors.push_back(y);
    converged[i] = std::move(y);
  }

  // Greedy merge of converged locations, then nearest-mode assignment.
  const double merge_sq = std::pow(options.merge_factor * bandwidth, 2);
  std::vector<Eigen::VectorXd> modes;
  for (const auto& y : converged) {
    const bool merged = std::any_of(modes.begin(), modes.end(), [&](const Eigen::VectorXd& m) {
      return (m - y).squaredNorm() <= merge_sq;
    });
    if (!merged) modes.push_back(y);
  }
  std::sort(modes.begin(), modes.end(), lexicographic_less);

  ClusterAssignment out;
  out.mode_per_point.resize(samples.size());
  std::vector<bool> used(modes.size(), false);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const double d2 = (modes[k] - converged[i]).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = static_cast<int>(k);
      }
    }
    out.mode_per_point[i] = best;
    used[best] = true;
  }

  // Drop modes that lost every point to a closer neighbour and reindex.
  std::vector<int> remap(modes.size(), -1);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (!used[k]) continue;
    remap[k] = static_cast<int>(out.modes.size());
    out.modes.push_back(modes[k]);
  }
  for (auto& m : out.mode_per_point) m = remap[m];
  return out;
}

}  // namespace safecorridor
