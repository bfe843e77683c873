#include "hytrav/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hytrav {

namespace {

std::size_t count_set(const std::vector<std::uint8_t>& mask) {
  return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(),
                                                [](std::uint8_t m) { return m != 0; }));
}

void check_shape(int width, int height, std::size_t n, const char* what) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument(std::string(what) + ": non-positive dimensions");
  }
  if (n != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DimensionMismatch(std::string(what) + ": buffer size does not match width*height");
  }
}

}  // namespace

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("intrinsics: focal lengths must be > 0");
  if (width <= 0 || height <= 0) throw std::invalid_argument("intrinsics: non-positive image size");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw std::invalid_argument("intrinsics: principal point outside the image");
  }
}

DepthFrame::DepthFrame(int width, int height, std::vector<double> depth, double stamp)
    : width_(width), height_(height), depth_(std::move(depth)), stamp_(stamp) {
  check_shape(width_, height_, depth_.size(), "DepthFrame");
  valid_.assign(depth_.size(), 0);
  for (std::size_t i = 0; i < depth_.size(); ++i) {
    if (std::isfinite(depth_[i]) && depth_[i] > 0.0) {
      valid_[i] = 1;
    } else {
      depth_[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }
}

std::size_t DepthFrame::valid_count() const { return count_set(valid_); }

LabelFrame::LabelFrame(int width, int height, std::vector<std::uint8_t> class_id,
                       std::vector<double> confidence, int num_classes, double stamp)
    : width_(width),
      height_(height),
      class_id_(std::move(class_id)),
      confidence_(std::move(confidence)),
      num_classes_(num_classes),
      stamp_(stamp) {
  check_shape(width_, height_, class_id_.size(), "LabelFrame");
  if (confidence_.size() != class_id_.size()) {
    throw DimensionMismatch("LabelFrame: confidence raster size differs from class raster");
  }
  if (num_classes_ <= 0 || num_classes_ >= kVoidLabel) {
    throw std::invalid_argument("LabelFrame: bad class count");
  }
  for (std::size_t i = 0; i < class_id_.size(); ++i) {
    if (class_id_[i] != kVoidLabel && class_id_[i] >= num_classes_) {
      throw std::invalid_argument("LabelFrame: class id " + std::to_string(class_id_[i]) +
                                  " outside the declared enumeration");
    }
    if (!(confidence_[i] >= 0.0 && confidence_[i] <= 1.0)) {
      throw std::invalid_argument("LabelFrame: confidence outside [0,1]");
    }
  }
}

LabelFrame::LabelFrame(int width, int height, std::vector<std::uint8_t> class_id,
                       double confidence, int num_classes, double stamp)
    : LabelFrame(width, height, class_id, std::vector<double>(class_id.size(), confidence),
                 num_classes, stamp) {}

PointCloud::PointCloud(int width, int height, std::vector<Eigen::Vector3d> points,
                       std::vector<std::uint8_t> valid, std::string frame_id)
    : width_(width),
      height_(height),
      points_(std::move(points)),
      valid_(std::move(valid)),
      frame_id_(std::move(frame_id)) {
  check_shape(width_, height_, points_.size(), "PointCloud");
  if (valid_.size() != points_.size()) throw DimensionMismatch("PointCloud: mask size differs");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (valid_[i] && !points_[i].allFinite()) valid_[i] = 0;
    if (!valid_[i]) points_[i].setConstant(nan);
  }
}

std::size_t PointCloud::valid_count() const { return count_set(valid_); }

void GridSpec::validate() const {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("grid: non-positive size");
  if (!(resolution > 0.0)) throw std::invalid_argument("grid: resolution must be > 0");
  if (!contains({origin_row, origin_col})) {
    throw std::invalid_argument("grid: robot base cell lies outside the grid");
  }
}

std::optional<Cell> GridSpec::cell_of(double x, double y) const {
  if (!std::isfinite(x) || !std::isfinite(y)) return std::nullopt;
  const double fr = std::floor(x / resolution + 0.5) + origin_row;
  const double fc = std::floor(y / resolution + 0.5) + origin_col;
  if (fr < 0 || fc < 0 || fr >= rows || fc >= cols) return std::nullopt;
  return Cell{static_cast<int>(fr), static_cast<int>(fc)};
}

Eigen::Vector2d GridSpec::center_of(Cell c) const {
  return {(c.row - origin_row) * resolution, (c.col - origin_col) * resolution};
}

CostGrid::CostGrid(GridSpec spec)
    : spec_(spec), cost_(spec.cell_count(), 0.0), known_(spec.cell_count(), 0) {
  spec_.validate();
}

CostGrid::CostGrid(GridSpec spec, std::vector<double> cost, std::vector<std::uint8_t> known)
    : spec_(spec), cost_(std::move(cost)), known_(std::move(known)) {
  spec_.validate();
  if (cost_.size() != spec_.cell_count() || known_.size() != spec_.cell_count()) {
    throw DimensionMismatch("CostGrid: buffers do not match grid spec");
  }
  for (std::size_t i = 0; i < cost_.size(); ++i) {
    if (!known_[i]) {
      cost_[i] = 0.0;
    } else if (!(cost_[i] >= 0.0 && cost_[i] <= 1.0)) {
      throw std::invalid_argument("CostGrid: known cell cost outside [0,1]");
    }
  }
}

std::size_t CostGrid::known_count() const { return count_set(known_); }

}  // namespace hytrav
