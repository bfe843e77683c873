#pragma once

#include "hytrav/types.hpp"

#include <array>
#include <string_view>

namespace hytrav {

enum class TerrainClass : std::uint8_t { Soil = 0, Bedrock = 1, Sand = 2, BigRock = 3 };
enum class RoughnessClass : std::uint8_t { LV0 = 0, LV1 = 1, LV2 = 2, LV3 = 3 };

inline constexpr int kNumTerrainClasses = 4;
inline constexpr int kNumRoughnessClasses = 4;

std::string_view to_string(TerrainClass c);
std::string_view to_string(RoughnessClass c);

/// Per-class cost reduction in [0,1]; larger means more traversable.
/// Cost of a pixel is 1 - reduction(class) * confidence.
struct ReductionTable {
  std::vector<double> reduction;

  void validate() const;
  int size() const { return static_cast<int>(reduction.size()); }
};

ReductionTable default_terrain_reductions();    // Soil .8, Bedrock .7, Sand .5, BigRock 0
ReductionTable default_roughness_reductions();  // LV0 .85, LV1 .6, LV2 .4, LV3 .1

/// Residual thresholds (meters) separating the roughness levels.
struct RoughnessBins {
  double floor = 0.001;                      ///< residuals are clamped up to this
  std::array<double, 3> edges{0.004, 0.03, 0.10};  ///< LV0|LV1, LV1|LV2, LV2|LV3

  void validate() const;
  RoughnessClass classify(double residual) const;
};

/// Image-plane cost raster.
struct ImageCostMap {
  int width = 0;
  int height = 0;
  std::vector<double> cost;
  std::vector<std::uint8_t> valid;
  double stamp = 0.0;

  std::size_t size() const { return cost.size(); }
};

/// Shared implementation of the class and roughness cost maps.
ImageCostMap label_cost_map(const LabelFrame& labels, const ReductionTable& table);

inline ImageCostMap class_cost_map(const LabelFrame& labels,
                                   const ReductionTable& table = default_terrain_reductions()) {
  return label_cost_map(labels, table);
}
inline ImageCostMap roughness_cost_map(const LabelFrame& labels,
                                       const ReductionTable& table = default_roughness_reductions()) {
  return label_cost_map(labels, table);
}

struct AppearanceWeights {
  double w_seg = 0.7;
  double w_rough = 0.3;

  /// w_seg + w_rough = 1 (1e-9) and w_rough < w_seg, both non-negative.
  void validate() const;
};

/// Weighted sum where both pixels are valid; otherwise whichever is valid.
ImageCostMap fuse_appearance(const ImageCostMap& seg, const ImageCostMap& rough,
                             const AppearanceWeights& w = {});

}  // namespace hytrav
