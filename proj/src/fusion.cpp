#include "hytrav/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace hytrav {

void FusionWeights::validate() const {
  if (!(w_a >= 0.0 && w_a <= 1.0 && w_g >= 0.0 && w_g <= 1.0) || std::abs(w_a + w_g - 1.0) > 1e-9) {
    throw std::invalid_argument("fusion weights must lie in [0,1] and sum to 1");
  }
}

CostGrid project_to_grid(const ImageCostMap& appearance, const PointCloud& cloud, const GridSpec& spec) {
  spec.validate();
  if (appearance.width != cloud.width() || appearance.height != cloud.height() ||
      appearance.size() != cloud.size()) {
    throw DimensionMismatch("project_to_grid: cost map and cloud come from different image sizes");
  }
  std::vector<double> cost(spec.cell_count(), 0.0);
  std::vector<std::uint8_t> known(spec.cell_count(), 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!appearance.valid[i] || !cloud.valid(i)) continue;
    const auto cell = spec.cell_of(cloud.point(i).x(), cloud.point(i).y());
    if (!cell) continue;
    const std::size_t ci = spec.index(*cell);
    cost[ci] = known[ci] ? std::max(cost[ci], appearance.cost[i]) : appearance.cost[i];
    known[ci] = 1;
  }
  return CostGrid(spec, std::move(cost), std::move(known));
}

CostGrid fuse_grids(const CostGrid& appearance_grid, const CostGrid& geometry_grid, const FusionWeights& w) {
  w.validate();
  if (!(appearance_grid.spec() == geometry_grid.spec())) {
    throw DimensionMismatch("fuse_grids: grids have different layouts");
  }
  const GridSpec& spec = appearance_grid.spec();
  std::vector<double> cost(spec.cell_count(), 0.0);
  std::vector<std::uint8_t> known(spec.cell_count(), 0);
  const auto& ca = appearance_grid.costs();
  const auto& cg = geometry_grid.costs();
  const auto& ka = appearance_grid.known_mask();
  const auto& kg = geometry_grid.known_mask();
  for (std::size_t i = 0; i < spec.cell_count(); ++i) {
    if (ka[i] && kg[i]) {
      cost[i] = std::clamp(w.w_a * ca[i] + w.w_g * cg[i], 0.0, 1.0);
    } else if (ka[i]) {
      cost[i] = ca[i];
    } else if (kg[i]) {
      cost[i] = cg[i];
    } else {
      continue;
    }
    known[i] = 1;
  }
  return CostGrid(spec, std::move(cost), std::move(known));
}

}  // namespace hytrav
