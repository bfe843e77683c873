#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace hytrav::detail {

/// Static 3-D k-d tree over a subset of a point array (indices refer to the
/// caller's array). Queries return neighbor indices sorted by distance, ties
/// broken by index so results are reproducible.
class KdTree {
 public:
  KdTree(const std::vector<Eigen::Vector3d>& points, std::vector<std::uint32_t> subset);

  void knn(const Eigen::Vector3d& query, std::size_t k, std::vector<std::uint32_t>& out) const;

 private:
  struct Node {
    std::uint32_t begin, end;  // range in order_
    std::int32_t left = -1, right = -1;
    int axis = -1;  // -1 for leaf
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);

  const std::vector<Eigen::Vector3d>& points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace hytrav::detail
