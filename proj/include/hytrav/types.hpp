#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hytrav {

/// Raised when two rasters/grids that must share a shape do not.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CameraIntrinsics {
  double fx = 0.0;  ///< pixels
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const;
};

/// Per-pixel depth in meters along the optical axis, row-major.
/// Non-finite or non-positive input values are treated as missing data;
/// they are stored as NaN and cleared in the valid mask.
class DepthFrame {
 public:
  DepthFrame() = default;
  DepthFrame(int width, int height, std::vector<double> depth, double stamp = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  double stamp() const { return stamp_; }
  std::size_t size() const { return depth_.size(); }

  double at(int u, int v) const { return depth_[index(u, v)]; }
  bool valid(int u, int v) const { return valid_[index(u, v)] != 0; }
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * width_ + u;
  }

  const std::vector<double>& depth() const { return depth_; }
  const std::vector<std::uint8_t>& valid_mask() const { return valid_; }
  std::size_t valid_count() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> depth_;
  std::vector<std::uint8_t> valid_;
  double stamp_ = 0.0;
};

/// Class-id raster with per-pixel confidence. Pixels carrying kVoidLabel
/// have no prediction (sky, out of view) and are skipped downstream.
class LabelFrame {
 public:
  static constexpr std::uint8_t kVoidLabel = 255;

  LabelFrame() = default;
  LabelFrame(int width, int height, std::vector<std::uint8_t> class_id,
             std::vector<double> confidence, int num_classes, double stamp = 0.0);
  /// Same confidence for every pixel.
  LabelFrame(int width, int height, std::vector<std::uint8_t> class_id,
             double confidence, int num_classes, double stamp = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  int num_classes() const { return num_classes_; }
  double stamp() const { return stamp_; }
  std::size_t size() const { return class_id_.size(); }

  const std::vector<std::uint8_t>& class_ids() const { return class_id_; }
  const std::vector<double>& confidence() const { return confidence_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> class_id_;
  std::vector<double> confidence_;
  int num_classes_ = 0;
  double stamp_ = 0.0;
};

/// Ordered cloud: point i comes from pixel i (row-major) of a width x height
/// source. Invalid entries hold NaN and are masked out.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(int width, int height, std::vector<Eigen::Vector3d> points,
             std::vector<std::uint8_t> valid, std::string frame_id);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return points_.size(); }
  const std::string& frame_id() const { return frame_id_; }

  const Eigen::Vector3d& point(std::size_t i) const { return points_[i]; }
  bool valid(std::size_t i) const { return valid_[i] != 0; }
  const std::vector<Eigen::Vector3d>& points() const { return points_; }
  const std::vector<std::uint8_t>& valid_mask() const { return valid_; }
  std::size_t valid_count() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Eigen::Vector3d> points_;
  std::vector<std::uint8_t> valid_;
  std::string frame_id_;
};

struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Robot-centric grid layout. Rows run along +x (forward), columns along +y
/// (left). The robot base sits at the center of cell (origin_row, origin_col).
struct GridSpec {
  int rows = 100;
  int cols = 100;
  double resolution = 0.1;  ///< meters per cell
  int origin_row = 0;
  int origin_col = 50;

  void validate() const;
  bool contains(Cell c) const {
    return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols;
  }
  std::optional<Cell> cell_of(double x, double y) const;
  Eigen::Vector2d center_of(Cell c) const;
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row) * cols + c.col; }
  std::size_t cell_count() const { return static_cast<std::size_t>(rows) * cols; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Cost per cell in [0,1] (1 = untraversable) plus a known mask.
class CostGrid {
 public:
  CostGrid() = default;
  /// All cells unknown.
  explicit CostGrid(GridSpec spec);
  CostGrid(GridSpec spec, std::vector<double> cost, std::vector<std::uint8_t> known);

  const GridSpec& spec() const { return spec_; }
  double cost(Cell c) const { return cost_[spec_.index(c)]; }
  bool known(Cell c) const { return known_[spec_.index(c)] != 0; }
  const std::vector<double>& costs() const { return cost_; }
  const std::vector<std::uint8_t>& known_mask() const { return known_; }
  std::size_t known_count() const;

 private:
  GridSpec spec_;
  std::vector<double> cost_;
  std::vector<std::uint8_t> known_;
};

}  // namespace hytrav
