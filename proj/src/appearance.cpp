#include "hytrav/appearance.hpp"

#include <algorithm>
#include <cmath>

namespace hytrav {

std::string_view to_string(TerrainClass c) {
  switch (c) {
    case TerrainClass::Soil: return "soil";
    case TerrainClass::Bedrock: return "bedrock";
    case TerrainClass::Sand: return "sand";
    case TerrainClass::BigRock: return "big_rock";
  }
  return "?";
}

std::string_view to_string(RoughnessClass c) {
  switch (c) {
    case RoughnessClass::LV0: return "LV0";
    case RoughnessClass::LV1: return "LV1";
    case RoughnessClass::LV2: return "LV2";
    case RoughnessClass::LV3: return "LV3";
  }
  return "?";
}

void ReductionTable::validate() const {
  if (reduction.empty()) throw std::invalid_argument("reduction table is empty");
  for (double r : reduction) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("reduction outside [0,1]");
  }
}

ReductionTable default_terrain_reductions() { return {{0.8, 0.7, 0.5, 0.0}}; }
ReductionTable default_roughness_reductions() { return {{0.85, 0.6, 0.4, 0.1}}; }

void RoughnessBins::validate() const {
  if (!(floor > 0.0 && floor < edges[0] && edges[0] < edges[1] && edges[1] < edges[2])) {
    throw std::invalid_argument("roughness bin edges must be strictly increasing and above the floor");
  }
}

RoughnessClass RoughnessBins::classify(double r) const {
  if (r < edges[0]) return RoughnessClass::LV0;
  if (r < edges[1]) return RoughnessClass::LV1;
  if (r < edges[2]) return RoughnessClass::LV2;
  return RoughnessClass::LV3;
}

ImageCostMap label_cost_map(const LabelFrame& labels, const ReductionTable& table) {
  table.validate();
  if (labels.num_classes() > table.size()) {
    throw std::invalid_argument("label frame declares " + std::to_string(labels.num_classes()) +
                                " classes but the reduction table has " + std::to_string(table.size()));
  }
  ImageCostMap out{labels.width(), labels.height(), std::vector<double>(labels.size(), 0.0),
                   std::vector<std::uint8_t>(labels.size(), 0), labels.stamp()};
  const auto& ids = labels.class_ids();
  const auto& conf = labels.confidence();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::uint8_t id = ids[i];
    if (id == LabelFrame::kVoidLabel) continue;
    if (id >= table.size()) throw std::invalid_argument("unknown class id " + std::to_string(id));
    out.cost[i] = std::clamp(1.0 - table.reduction[id] * conf[i], 0.0, 1.0);
    out.valid[i] = 1;
  }
  return out;
}

void AppearanceWeights::validate() const {
  if (!(w_seg >= 0.0 && w_rough >= 0.0) || std::abs(w_seg + w_rough - 1.0) > 1e-9) {
    throw std::invalid_argument("appearance weights must be non-negative and sum to 1");
  }
  if (!(w_rough < w_seg)) throw std::invalid_argument("roughness weight must be lower than segmentation weight");
}

ImageCostMap fuse_appearance(const ImageCostMap& seg, const ImageCostMap& rough, const AppearanceWeights& w) {
  w.validate();
  if (seg.width != rough.width || seg.height != rough.height || seg.size() != rough.size()) {
    throw DimensionMismatch("fuse_appearance: cost maps differ in size");
  }
  ImageCostMap out{seg.width, seg.height, std::vector<double>(seg.size(), 0.0),
                   std::vector<std::uint8_t>(seg.size(), 0), seg.stamp};
  for (std::size_t i = 0; i < seg.size(); ++i) {
    const bool s = seg.valid[i], r = rough.valid[i];
    if (s && r) {
      out.cost[i] = std::clamp(w.w_seg * seg.cost[i] + w.w_rough * rough.cost[i], 0.0, 1.0);
    } else if (s) {
      out.cost[i] = seg.cost[i];
    } else if (r) {
      out.cost[i] = rough.cost[i];
    } else {
      continue;
    }
    out.valid[i] = 1;
  }
  return out;
}

}  // namespace hytrav
