#pragma once

#include "hytrav/appearance.hpp"
#include "hytrav/types.hpp"

namespace hytrav {

/// Hybrid cell cost = w_a * appearance + w_g * geometry, with w_a + w_g = 1.
struct FusionWeights {
  double w_a = 0.5;
  double w_g = 0.5;

  void validate() const;
};

/// Moves image-plane costs into the grid through the ordered cloud: pixel i
/// lands in the cell of point i. Several pixels in one cell keep the max.
CostGrid project_to_grid(const ImageCostMap& appearance, const PointCloud& cloud, const GridSpec& spec);

/// Known in both: weighted sum. Known in one: that value. Known in none: unknown.
CostGrid fuse_grids(const CostGrid& appearance_grid, const CostGrid& geometry_grid, const FusionWeights& w = {});

}  // namespace hytrav
