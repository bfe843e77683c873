#pragma once

#include "hytrav/appearance.hpp"
#include "hytrav/types.hpp"

#include <span>

namespace hytrav {

/// Plane a*x + b*y + c*z + d = 0. fit_plane returns unit (a,b,c).
struct PlaneCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
  double d = 0.0;
  double rms = 0.0;  ///< RMS orthogonal residual of the fitted points, meters
};

/// Total-least-squares plane: normal is the smallest-eigenvalue eigenvector
/// of the centered covariance, d = -n . centroid. Sign chosen so c > 0 (then
/// b > 0, then a > 0). Throws std::invalid_argument for fewer than three
/// points or (near-)collinear input.
PlaneCoeffs fit_plane(std::span<const Eigen::Vector3d> points);

/// |-d - a x - b y - c z| / sqrt(a^2 + b^2 + c^2). Coefficients need not be
/// normalized.
double point_roughness(const Eigen::Vector3d& p, const PlaneCoeffs& plane);

/// Depth-adaptive patch size: side(d) = clamp(round(s_ref * d_ref / d), s_min, s_max).
/// Patch sides are drawn from s_max, s_max/2, ... down to s_min.
struct PatchPolicy {
  int s_ref = 32;
  double d_ref = 2.0;  ///< meters
  int s_min = 8;
  int s_max = 64;
  int min_valid_pixels = 16;

  void validate() const;
  int side_for_depth(double depth) const;
};

struct PixelRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool contains(int u, int v) const { return u >= x && u < x + w && v >= y && v < y + h; }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

struct Patch {
  PixelRect rect;       ///< pixels used for the plane fit (clipped to the image)
  int side = 0;         ///< nominal side in pixels
  double median_depth = 0.0;
  std::size_t valid_pixels = 0;
  std::vector<PixelRect> merged;  ///< sparse neighbors that reuse this patch's plane
};

/// Quadtree tiling of the valid region. A patch is split while its side
/// exceeds the policy side at its median depth; a repair pass then splits
/// any patch that is larger than a patch lying nearer to the camera. Blocks
/// with fewer than min_valid_pixels valid pixels are merged into the
/// nearest patch. Throws for an all-invalid frame.
std::vector<Patch> partition_patches(const DepthFrame& depth, const PatchPolicy& policy = {});

struct RoughnessMap {
  int width = 0;
  int height = 0;
  std::vector<double> residual;      ///< meters, >= bins.floor where valid, NaN elsewhere
  std::vector<std::uint8_t> level;   ///< RoughnessClass, LabelFrame::kVoidLabel where invalid
  std::vector<std::uint8_t> valid;

  std::size_t valid_count() const;
  /// Level raster as a label frame (confidence 1).
  LabelFrame as_labels(double stamp = 0.0) const;
};

RoughnessMap build_roughness_map(const DepthFrame& depth, const CameraIntrinsics& k,
                                 const PatchPolicy& policy = {}, const RoughnessBins& bins = {});

struct ClassStatistics {
  std::vector<std::size_t> counts;
  std::size_t total = 0;             ///< non-void pixels
  std::vector<double> frequency;     ///< counts / total
  std::vector<double> raw_weight;    ///< 1 / frequency (inf for absent classes)
  std::vector<double> weight;        ///< raw weights rescaled to sum to the number of present classes
  std::vector<std::uint8_t> absent;  ///< class has no pixels
};

/// Pixel frequencies over a set of label frames and inverse-frequency weights.
ClassStatistics class_statistics(std::span<const LabelFrame> frames, int num_classes);

}  // namespace hytrav
