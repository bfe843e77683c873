#include "kdtree.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <utility>

namespace hytrav::detail {

namespace {
constexpr std::uint32_t kLeafSize = 12;

struct Candidate {
  double d2;
  std::uint32_t idx;
  bool operator<(const Candidate& o) const { return d2 < o.d2 || (d2 == o.d2 && idx < o.idx); }
};
}  // namespace

KdTree::KdTree(const std::vector<Eigen::Vector3d>& points, std::vector<std::uint32_t> subset)
    : points_(points), order_(std::move(subset)) {
  nodes_.reserve(2 * order_.size() / kLeafSize + 1);
  if (!order_.empty()) build(0, static_cast<std::uint32_t>(order_.size()));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({begin, end});
  if (end - begin <= kLeafSize) return id;

  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const double split = points_[order_[mid]][axis];
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  Node& n = nodes_[id];
  n.axis = axis;
  n.split = split;
  n.left = left;
  n.right = right;
  return id;
}

void KdTree::knn(const Eigen::Vector3d& query, std::size_t k, std::vector<std::uint32_t>& out) const {
  out.clear();
  if (nodes_.empty() || k == 0) return;
  std::priority_queue<Candidate> best;  // max-heap on distance

  auto worst = [&] {
    return best.size() < k ? std::numeric_limits<double>::infinity() : best.top().d2;
  };

  // Iterative descent with an explicit stack of (node, lower bound on d2).
  std::vector<std::pair<std::int32_t, double>> stack{{0, 0.0}};
  while (!stack.empty()) {
    auto [id, bound] = stack.back();
    stack.pop_back();
    if (bound > worst()) continue;
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const std::uint32_t idx = order_[i];
        const Candidate c{(points_[idx] - query).squaredNorm(), idx};
        if (best.size() < k) {
          best.push(c);
        } else if (c < best.top()) {
          best.pop();
          best.push(c);
        }
      }
      continue;
    }
    const double diff = query[n.axis] - n.split;
    const std::int32_t near = diff < 0 ? n.left : n.right;
    const std::int32_t far = diff < 0 ? n.right : n.left;
    stack.push_back({far, std::max(bound, diff * diff)});
    stack.push_back({near, bound});
  }

  out.resize(best.size());
  for (std::size_t i = best.size(); i-- > 0;) {
    out[i] = best.top().idx;
    best.pop();
  }
}

}  // namespace hytrav::detail
