#pragma once

#include "hytrav/types.hpp"

#include <optional>
#include <vector>

namespace hytrav {

enum class UnknownPolicy {
  Lethal,   ///< unknown cells are never entered
  MaxCost,  ///< unknown cells are traversable at cost 1
};

struct PlanRequest {
  Cell start;
  Cell goal;
  double lethal = 0.95;   ///< known cells with cost >= lethal are excluded
  double epsilon = 0.05;  ///< metric term of the edge weight
  UnknownPolicy unknown = UnknownPolicy::Lethal;
};

struct Path {
  std::vector<Cell> cells;  ///< start .. goal, 8-adjacent
  double weight = 0.0;      ///< sum of edge weights, meters
  double cost_sum = 0.0;    ///< sum of entered-cell costs (start excluded)
};

/// Effective cost of entering a cell under the request's policies, or
/// nullopt when the cell is excluded.
std::optional<double> traversal_cost(const CostGrid& grid, Cell c, const PlanRequest& req);

/// Weight of the edge a -> b: metric length * (epsilon + cost(b)).
double edge_weight(const CostGrid& grid, Cell a, Cell b, double cost_b, const PlanRequest& req);

/// Minimum-weight 8-connected path (A* with an admissible epsilon-scaled
/// octile heuristic). Returns nullopt when the goal cannot be reached.
/// Throws std::invalid_argument for out-of-grid endpoints, a lethal start,
/// or lethal/epsilon outside their ranges.
std::optional<Path> plan(const CostGrid& grid, const PlanRequest& req);

/// Weight of an arbitrary cell sequence under the same edge model.
double path_weight(const CostGrid& grid, const std::vector<Cell>& cells, const PlanRequest& req);

}  // namespace hytrav
