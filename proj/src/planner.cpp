#include "hytrav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace hytrav {

namespace {

constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

struct Open {
  double f;
  double g;
  std::size_t idx;
  // min-heap on f, then g, then index for a deterministic expansion order
  bool operator>(const Open& o) const {
    if (f != o.f) return f > o.f;
    if (g != o.g) return g > o.g;
    return idx > o.idx;
  }
};

}  // namespace

std::optional<double> traversal_cost(const CostGrid& grid, Cell c, const PlanRequest& req) {
  if (!grid.spec().contains(c)) return std::nullopt;
  if (!grid.known(c)) {
    if (req.unknown == UnknownPolicy::Lethal) return std::nullopt;
    return 1.0;
  }
  const double cost = grid.cost(c);
  if (cost >= req.lethal) return std::nullopt;
  return cost;
}

double edge_weight(const CostGrid& grid, Cell a, Cell b, double cost_b, const PlanRequest& req) {
  const bool diagonal = a.row != b.row && a.col != b.col;
  const double len = grid.spec().resolution * (diagonal ? std::numbers::sqrt2 : 1.0);
  return len * (req.epsilon + cost_b);
}

std::optional<Path> plan(const CostGrid& grid, const PlanRequest& req) {
  const GridSpec& spec = grid.spec();
  if (!spec.contains(req.start) || !spec.contains(req.goal)) {
    throw std::invalid_argument("plan: start or goal outside the grid");
  }
  if (!(req.lethal > 0.0 && req.lethal <= 1.0)) throw std::invalid_argument("plan: lethal threshold must be in (0,1]");
  if (!(req.epsilon > 0.0)) throw std::invalid_argument("plan: epsilon must be > 0");
  if (grid.known(req.start) && grid.cost(req.start) >= req.lethal) {
    throw std::invalid_argument("plan: start cell is lethal");
  }
  if (req.start == req.goal) return Path{{req.start}, 0.0, 0.0};
  if (!traversal_cost(grid, req.goal, req)) return std::nullopt;

  const double h_scale = req.epsilon * spec.resolution;
  auto heuristic = [&](Cell c) {
    const double dr = std::abs(c.row - req.goal.row), dc = std::abs(c.col - req.goal.col);
    return h_scale * (std::max(dr, dc) + (std::numbers::sqrt2 - 1.0) * std::min(dr, dc));
  };
  auto cell_at = [&](std::size_t i) { return Cell{static_cast<int>(i / spec.cols), static_cast<int>(i % spec.cols)}; };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> g(spec.cell_count(), inf);
  std::vector<std::size_t> parent(spec.cell_count(), std::numeric_limits<std::size_t>::max());
  std::vector<std::uint8_t> closed(spec.cell_count(), 0);
  std::priority_queue<Open, std::vector<Open>, std::greater<>> open;

  const std::size_t s = spec.index(req.start), goal = spec.index(req.goal);
  g[s] = 0.0;
  open.push({heuristic(req.start), 0.0, s});
  while (!open.empty()) {
    const Open cur = open.top();
    open.pop();
    if (closed[cur.idx]) continue;
    closed[cur.idx] = 1;
    if (cur.idx == goal) break;
    const Cell c = cell_at(cur.idx);
    for (int k = 0; k < 8; ++k) {
      const Cell nb{c.row + kDr[k], c.col + kDc[k]};
      const auto cost = traversal_cost(grid, nb, req);
      if (!cost) continue;
      const std::size_t ni = spec.index(nb);
      if (closed[ni]) continue;
      const double cand = g[cur.idx] + edge_weight(grid, c, nb, *cost, req);
      if (cand < g[ni]) {
        g[ni] = cand;
        parent[ni] = cur.idx;
        open.push({cand + heuristic(nb), cand, ni});
      }
    }
  }
  if (!closed[goal]) return std::nullopt;

  Path path;
  for (std::size_t i = goal; i != s; i = parent[i]) path.cells.push_back(cell_at(i));
  path.cells.push_back(req.start);
  std::reverse(path.cells.begin(), path.cells.end());
  path.weight = g[goal];
  for (std::size_t i = 1; i < path.cells.size(); ++i) path.cost_sum += *traversal_cost(grid, path.cells[i], req);
  return path;
}

double path_weight(const CostGrid& grid, const std::vector<Cell>& cells, const PlanRequest& req) {
  double w = 0.0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const Cell a = cells[i - 1], b = cells[i];
    if (std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)) != 1) {
      throw std::invalid_argument("path_weight: cells are not 8-adjacent");
    }
    const auto cost = traversal_cost(grid, b, req);
    if (!cost) throw std::invalid_argument("path_weight: path enters an excluded cell");
    w += edge_weight(grid, a, b, *cost, req);
  }
  return w;
}

}  // namespace hytrav
