#include "hytrav/roughness.hpp"

#include "hytrav/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace hytrav {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Block {
  PixelRect rect;
  int level = 0;  // index into the side ladder
  std::size_t valid = 0;
  double median = 0.0;
  bool frozen = false;
};

class Partitioner {
 public:
  Partitioner(const DepthFrame& depth, const PatchPolicy& policy) : depth_(depth), policy_(policy) {
    for (int s = policy.s_max; s >= policy.s_min && s > 0; s /= 2) {
      sides_.push_back(s);
      if (s == 1) break;
    }
    if (sides_.empty()) sides_.push_back(policy.s_max);
  }

  std::vector<Patch> run() {
    for (int y = 0; y < depth_.height(); y += sides_[0]) {
      for (int x = 0; x < depth_.width(); x += sides_[0]) {
        admit(make_block({x, y, std::min(sides_[0], depth_.width() - x), std::min(sides_[0], depth_.height() - y)}, 0));
      }
    }
    // Refine by the size policy.
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      while (!blocks_[i].frozen && blocks_[i].level < target_level(blocks_[i].median)) {
        if (!split(i)) break;
      }
    }
    repair();
    return assemble();
  }

 private:
  int target_level(double median) const {
    const int want = policy_.side_for_depth(median);
    for (std::size_t l = 0; l < sides_.size(); ++l) {
      if (sides_[l] <= want) return static_cast<int>(l);
    }
    return static_cast<int>(sides_.size()) - 1;
  }

  Block make_block(PixelRect r, int level) const {
    Block b{r, level};
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(r.w) * r.h);
    for (int v = r.y; v < r.y + r.h; ++v) {
      for (int u = r.x; u < r.x + r.w; ++u) {
        if (depth_.valid(u, v)) d.push_back(depth_.at(u, v));
      }
    }
    b.valid = d.size();
    if (!d.empty()) {
      const std::size_t m = d.size() / 2;
      std::nth_element(d.begin(), d.begin() + m, d.end());
      b.median = d[m];
      if (d.size() % 2 == 0) b.median = 0.5 * (b.median + *std::max_element(d.begin(), d.begin() + m));
    }
    return b;
  }

  bool dense(const Block& b) const { return b.valid >= static_cast<std::size_t>(policy_.min_valid_pixels); }

  void admit(Block b) {
    if (b.valid == 0) return;
    if (dense(b)) {
      blocks_.push_back(b);
    } else {
      orphans_.push_back(b.rect);
    }
  }

  // Replaces block i by its children. Returns false (and freezes the block)
  // when it is at the smallest side or no child would be dense.
  bool split(std::size_t i) {
    Block& parent = blocks_[i];
    if (parent.level + 1 >= static_cast<int>(sides_.size())) {
      parent.frozen = true;
      return false;
    }
    const int side = sides_[parent.level];
    const int child = sides_[parent.level + 1];
    const int x_end = parent.rect.x + parent.rect.w;
    const int y_end = parent.rect.y + parent.rect.h;
    std::vector<Block> kids;
    for (int y = parent.rect.y; y < y_end && y < parent.rect.y + side; y += child) {
      for (int x = parent.rect.x; x < x_end && x < parent.rect.x + side; x += child) {
        kids.push_back(make_block({x, y, std::min(child, x_end - x), std::min(child, y_end - y)}, parent.level + 1));
      }
    }
    if (std::none_of(kids.begin(), kids.end(), [&](const Block& k) { return dense(k); })) {
      parent.frozen = true;
      return false;
    }
    // First dense child takes the parent's slot so outer iteration continues on it.
    auto first = std::find_if(kids.begin(), kids.end(), [&](const Block& k) { return dense(k); });
    blocks_[i] = *first;
    kids.erase(first);
    for (auto& k : kids) admit(k);
    return true;
  }

  // Nearer patches must not be smaller than farther ones.
  void repair() {
    for (;;) {
      std::vector<std::size_t> order(blocks_.size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return blocks_[a].median < blocks_[b].median || (blocks_[a].median == blocks_[b].median && a < b);
      });
      std::vector<std::size_t> violators;
      int min_side_nearer = std::numeric_limits<int>::max();
      std::size_t g = 0;
      while (g < order.size()) {
        std::size_t e = g;
        while (e < order.size() && blocks_[order[e]].median == blocks_[order[g]].median) ++e;
        int group_min = std::numeric_limits<int>::max();
        for (std::size_t j = g; j < e; ++j) {
          const Block& b = blocks_[order[j]];
          if (sides_[b.level] > min_side_nearer && !b.frozen) violators.push_back(order[j]);
          group_min = std::min(group_min, sides_[b.level]);
        }
        min_side_nearer = std::min(min_side_nearer, group_min);
        g = e;
      }
      if (violators.empty()) return;
      std::sort(violators.begin(), violators.end());
      for (std::size_t i : violators) split(i);
    }
  }

  std::vector<Patch> assemble() {
    std::vector<Patch> patches;
    patches.reserve(blocks_.size());
    for (const Block& b : blocks_) patches.push_back({b.rect, sides_[b.level], b.median, b.valid, {}});

    if (patches.empty()) {
      // Too few valid pixels anywhere for a dense patch: keep each block on its own.
      for (const PixelRect& r : orphans_) {
        Block b = make_block(r, static_cast<int>(sides_.size()) - 1);
        patches.push_back({r, sides_.back(), b.median, b.valid, {}});
      }
    } else {
      for (const PixelRect& r : orphans_) {
        const double cx = r.x + 0.5 * r.w, cy = r.y + 0.5 * r.h;
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < patches.size(); ++i) {
          const PixelRect& p = patches[i].rect;
          const double dx = p.x + 0.5 * p.w - cx, dy = p.y + 0.5 * p.h - cy;
          const double d2 = dx * dx + dy * dy;
          if (d2 < best_d) {
            best_d = d2;
            best = i;
          }
        }
        patches[best].merged.push_back(r);
      }
    }
    std::sort(patches.begin(), patches.end(), [](const Patch& a, const Patch& b) {
      return a.rect.y < b.rect.y || (a.rect.y == b.rect.y && a.rect.x < b.rect.x);
    });
    for (auto& p : patches) {
      std::sort(p.merged.begin(), p.merged.end(), [](const PixelRect& a, const PixelRect& b) {
        return a.y < b.y || (a.y == b.y && a.x < b.x);
      });
    }
    return patches;
  }

  const DepthFrame& depth_;
  const PatchPolicy& policy_;
  std::vector<int> sides_;
  std::vector<Block> blocks_;
  std::vector<PixelRect> orphans_;
};

}  // namespace

PlaneCoeffs fit_plane(std::span<const Eigen::Vector3d> points) {
  if (points.size() < 3) throw std::invalid_argument("fit_plane: need at least 3 points");
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d d = p - centroid;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const Eigen::Vector3d ev = es.eigenvalues();
  if (es.info() != Eigen::Success || !(ev[2] > 0.0) || ev[1] <= 1e-12 * ev[2]) {
    throw std::invalid_argument("fit_plane: points are collinear or coincident");
  }
  Eigen::Vector3d n = es.eigenvectors().col(0).normalized();
  if (n.z() < 0.0 || (n.z() == 0.0 && (n.y() < 0.0 || (n.y() == 0.0 && n.x() < 0.0)))) n = -n;

  PlaneCoeffs plane{n.x(), n.y(), n.z(), -n.dot(centroid), 0.0};
  double sq = 0.0;
  for (const auto& p : points) {
    const double r = point_roughness(p, plane);
    sq += r * r;
  }
  plane.rms = std::sqrt(sq / static_cast<double>(points.size()));
  return plane;
}

double point_roughness(const Eigen::Vector3d& p, const PlaneCoeffs& pl) {
  const double norm = std::sqrt(pl.a * pl.a + pl.b * pl.b + pl.c * pl.c);
  if (!(norm > 0.0)) throw std::invalid_argument("point_roughness: plane normal is zero");
  return std::abs(-pl.d - pl.a * p.x() - pl.b * p.y() - pl.c * p.z()) / norm;
}

void PatchPolicy::validate() const {
  if (s_min < 1 || s_max < s_min || s_ref < 1 || !(d_ref > 0.0) || min_valid_pixels < 3) {
    throw std::invalid_argument("patch policy: need 1 <= s_min <= s_max, s_ref >= 1, d_ref > 0, min_valid_pixels >= 3");
  }
}

int PatchPolicy::side_for_depth(double depth) const {
  if (!(depth > 0.0)) return s_max;
  const double s = std::round(s_ref * d_ref / depth);
  return static_cast<int>(std::clamp(s, static_cast<double>(s_min), static_cast<double>(s_max)));
}

std::vector<Patch> partition_patches(const DepthFrame& depth, const PatchPolicy& policy) {
  policy.validate();
  if (depth.valid_count() == 0) throw std::invalid_argument("partition_patches: frame has no valid depth");
  return Partitioner(depth, policy).run();
}

std::size_t RoughnessMap::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

LabelFrame RoughnessMap::as_labels(double stamp) const {
  return LabelFrame(width, height, level, 1.0, kNumRoughnessClasses, stamp);
}

RoughnessMap build_roughness_map(const DepthFrame& depth, const CameraIntrinsics& k, const PatchPolicy& policy,
                                 const RoughnessBins& bins) {
  bins.validate();
  const PointCloud cloud = backproject(depth, k);
  const std::vector<Patch> patches = partition_patches(depth, policy);

  RoughnessMap out;
  out.width = depth.width();
  out.height = depth.height();
  out.residual.assign(depth.size(), kNaN);
  out.level.assign(depth.size(), LabelFrame::kVoidLabel);
  out.valid.assign(depth.size(), 0);

  std::vector<Eigen::Vector3d> pts;
  for (const Patch& patch : patches) {
    pts.clear();
    const PixelRect& r = patch.rect;
    for (int v = r.y; v < r.y + r.h; ++v) {
      for (int u = r.x; u < r.x + r.w; ++u) {
        const std::size_t i = depth.index(u, v);
        if (cloud.valid(i)) pts.push_back(cloud.point(i));
      }
    }
    PlaneCoeffs plane;
    try {
      plane = fit_plane(pts);
    } catch (const std::invalid_argument&) {
      continue;  // degenerate patch: pixels stay invalid
    }
    auto assign = [&](const PixelRect& rect) {
      for (int v = rect.y; v < rect.y + rect.h; ++v) {
        for (int u = rect.x; u < rect.x + rect.w; ++u) {
          const std::size_t i = depth.index(u, v);
          if (!cloud.valid(i)) continue;
          const double res = std::max(point_roughness(cloud.point(i), plane), bins.floor);
          out.residual[i] = res;
          out.level[i] = static_cast<std::uint8_t>(bins.classify(res));
          out.valid[i] = 1;
        }
      }
    };
    assign(r);
    for (const PixelRect& m : patch.merged) assign(m);
  }
  return out;
}

ClassStatistics class_statistics(std::span<const LabelFrame> frames, int num_classes) {
  if (frames.empty()) throw std::invalid_argument("class_statistics: no frames");
  if (num_classes <= 0) throw std::invalid_argument("class_statistics: no classes");
  ClassStatistics s;
  s.counts.assign(num_classes, 0);
  for (const LabelFrame& f : frames) {
    for (std::uint8_t id : f.class_ids()) {
      if (id == LabelFrame::kVoidLabel) continue;
      if (id >= num_classes) throw std::invalid_argument("class_statistics: class id outside enumeration");
      ++s.counts[id];
      ++s.total;
    }
  }
  if (s.total == 0) throw std::invalid_argument("class_statistics: frames contain no labeled pixels");
  const double inf = std::numeric_limits<double>::infinity();
  s.frequency.resize(num_classes);
  s.raw_weight.resize(num_classes);
  s.weight.assign(num_classes, inf);
  s.absent.assign(num_classes, 0);
  double raw_sum = 0.0;
  int present = 0;
  for (int c = 0; c < num_classes; ++c) {
    s.frequency[c] = static_cast<double>(s.counts[c]) / static_cast<double>(s.total);
    if (s.counts[c] == 0) {
      s.raw_weight[c] = inf;
      s.absent[c] = 1;
    } else {
      s.raw_weight[c] = 1.0 / s.frequency[c];
      raw_sum += s.raw_weight[c];
      ++present;
    }
  }
  for (int c = 0; c < num_classes; ++c) {
    if (!s.absent[c]) s.weight[c] = s.raw_weight[c] * present / raw_sum;
  }
  return s;
}

}  // namespace hytrav
