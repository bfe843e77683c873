#include "hytrav/geometry.hpp"

#include "kdtree.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace hytrav {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Smallest-eigenvalue eigenvector of the neighborhood covariance, or nullopt
// when the two smallest eigenvalues coincide (collinear / isotropic sets).
std::optional<Eigen::Vector3d> principal_normal(const std::vector<Eigen::Vector3d>& pts,
                                                const std::vector<std::uint32_t>& idx) {
  if (idx.size() < 3) return std::nullopt;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (auto i : idx) mean += pts[i];
  mean /= static_cast<double>(idx.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (auto i : idx) {
    const Eigen::Vector3d d = pts[i] - mean;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(idx.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  if (es.info() != Eigen::Success) return std::nullopt;
  const Eigen::Vector3d ev = es.eigenvalues();  // ascending
  if (!(ev[2] > 0.0) || ev[1] - ev[0] <= 1e-12 * ev[2]) return std::nullopt;
  return es.eigenvectors().col(0).normalized();
}

template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w = std::clamp<std::size_t>(workers < 1 ? 1 : workers, 1, std::max<std::size_t>(n, 1));
  if (w == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  const std::size_t chunk = (n + w - 1) / w;
  for (std::size_t b = 0; b < n; b += chunk) {
    threads.emplace_back([&fn, b, e = std::min(n, b + chunk)] { fn(b, e); });
  }
  for (auto& t : threads) t.join();
}

}  // namespace

void SlopeCostParams::validate() const {
  if (!(t_soft > 0.0 && t_soft < t && t < kPi / 2)) {
    throw std::invalid_argument("slope cost: need 0 < t_soft < t < pi/2");
  }
}

std::size_t NormalField::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

double NormalField::signed_slope(std::size_t i) const {
  const double s = slope[i];
  return (normals[i].x() > 0.0 && s > 0.0) ? 2.0 * kPi - s : s;
}

PointCloud backproject(const DepthFrame& depth, const CameraIntrinsics& k) {
  k.validate();
  if (depth.width() != k.width || depth.height() != k.height) {
    throw DimensionMismatch("backproject: depth frame is " + std::to_string(depth.width()) + "x" +
                            std::to_string(depth.height()) + ", intrinsics expect " +
                            std::to_string(k.width) + "x" + std::to_string(k.height));
  }
  std::vector<Eigen::Vector3d> pts(depth.size(), Eigen::Vector3d::Constant(kNaN));
  std::vector<std::uint8_t> valid(depth.valid_mask());
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      const std::size_t i = depth.index(u, v);
      if (!valid[i]) continue;
      const double d = depth.at(u, v);
      pts[i] = {(u - k.cx) * d / k.fx, (v - k.cy) * d / k.fy, d};
    }
  }
  return PointCloud(depth.width(), depth.height(), std::move(pts), std::move(valid), "camera");
}

NormalField estimate_normals(const PointCloud& cloud, const NormalParams& params) {
  if (params.k_neighbors < 3) throw std::invalid_argument("estimate_normals: k_neighbors must be >= 3");
  const std::size_t n = cloud.size();
  std::vector<std::uint32_t> valid_idx;
  valid_idx.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (cloud.valid(i)) valid_idx.push_back(static_cast<std::uint32_t>(i));
  }
  if (valid_idx.size() < static_cast<std::size_t>(params.k_neighbors)) {
    throw std::invalid_argument("estimate_normals: " + std::to_string(valid_idx.size()) +
                                " valid points, need at least " + std::to_string(params.k_neighbors));
  }

  NormalField out;
  out.normals.assign(n, Eigen::Vector3d::Constant(kNaN));
  out.slope.assign(n, kNaN);
  out.valid.assign(n, 0);

  const auto& pts = cloud.points();
  const std::size_t k = static_cast<std::size_t>(params.k_neighbors);

  auto store = [&](std::size_t i, const std::optional<Eigen::Vector3d>& nrm) {
    if (!nrm) return;
    Eigen::Vector3d v = *nrm;
    if (v.z() < 0.0) v = -v;
    out.normals[i] = v;
    out.slope[i] = std::acos(std::clamp(v.z(), -1.0, 1.0));
    out.valid[i] = 1;
  };

  if (params.mode == Neighborhood::Knn) {
    const detail::KdTree tree(pts, valid_idx);
    parallel_for(valid_idx.size(), params.workers, [&](std::size_t b, std::size_t e) {
      std::vector<std::uint32_t> nn;
      for (std::size_t j = b; j < e; ++j) {
        const std::uint32_t i = valid_idx[j];
        tree.knn(pts[i], k, nn);
        store(i, principal_normal(pts, nn));
      }
    });
  } else {
    // Smallest odd square window holding at least k pixels.
    int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k))));
    if (side % 2 == 0) ++side;
    const int half = side / 2;
    const int w = cloud.width(), h = cloud.height();
    parallel_for(valid_idx.size(), params.workers, [&](std::size_t b, std::size_t e) {
      std::vector<std::uint32_t> nn;
      for (std::size_t j = b; j < e; ++j) {
        const std::uint32_t i = valid_idx[j];
        const int u = static_cast<int>(i % w), v = static_cast<int>(i / w);
        nn.clear();
        for (int dv = -half; dv <= half; ++dv) {
          for (int du = -half; du <= half; ++du) {
            const int uu = u + du, vv = v + dv;
            if (uu < 0 || vv < 0 || uu >= w || vv >= h) continue;
            const auto q = static_cast<std::uint32_t>(vv * w + uu);
            if (cloud.valid(q)) nn.push_back(q);
          }
        }
        store(i, principal_normal(pts, nn));
      }
    });
  }
  return out;
}

double slope_cost(double theta, const SlopeCostParams& p) {
  if (!(theta >= 0.0 && theta <= 2.0 * kPi)) {
    throw std::domain_error("slope_cost: angle outside [0, 2*pi]");
  }
  const double ts = p.t_soft;
  const double t = p.t;
  double c;
  if (theta < ts) {
    c = 2.0 / kPi * theta;
  } else if (theta <= t) {
    c = 1.0 / t * theta;
  } else if (theta < 2.0 * kPi - t) {
    c = 1.0;
  } else if (theta <= 2.0 * kPi - ts) {
    c = 1.0 - (theta - (2.0 * kPi - t)) / t;
  } else {
    c = 1.0 - (theta - 1.5 * kPi) / (kPi / 2.0);
  }
  return std::clamp(c, 0.0, 1.0);
}

CostGrid geometry_cost_grid(const PointCloud& cloud, const NormalField& normals,
                            const SlopeCostParams& p, const GridSpec& spec) {
  p.validate();
  spec.validate();
  if (normals.size() != cloud.size()) throw DimensionMismatch("geometry grid: normals not aligned with cloud");
  if (cloud.valid_count() == 0) throw std::invalid_argument("geometry grid: empty cloud");

  std::vector<double> cost(spec.cell_count(), 0.0);
  std::vector<std::uint8_t> known(spec.cell_count(), 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!cloud.valid(i) || !normals.valid[i]) continue;
    const auto cell = spec.cell_of(cloud.point(i).x(), cloud.point(i).y());
    if (!cell) continue;
    const double theta = p.signed_mode ? normals.signed_slope(i) : normals.slope[i];
    const double c = slope_cost(theta, p);
    const std::size_t ci = spec.index(*cell);
    cost[ci] = known[ci] ? std::max(cost[ci], c) : c;
    known[ci] = 1;
  }
  return CostGrid(spec, std::move(cost), std::move(known));
}

}  // namespace hytrav
