#include "hytrav/appearance.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace hytrav;

namespace {

LabelFrame one_pixel(std::uint8_t id, double conf) { return LabelFrame(1, 1, {id}, conf, 4); }

double cost_of(const ImageCostMap& m) { return m.cost[0]; }

}  // namespace

TEST_CASE("default reduction tables") {
  CHECK(default_terrain_reductions().reduction == std::vector<double>{0.8, 0.7, 0.5, 0.0});
  CHECK(default_roughness_reductions().reduction == std::vector<double>{0.85, 0.6, 0.4, 0.1});
}

TEST_CASE("class cost examples") {
  CHECK(cost_of(class_cost_map(one_pixel(0, 1.0))) == doctest::Approx(oracle::pixel_cost(0.8, 1.0)));
  CHECK(cost_of(class_cost_map(one_pixel(0, 1.0))) == doctest::Approx(0.2));
  for (double c : {0.0, 0.3, 1.0}) CHECK(cost_of(class_cost_map(one_pixel(3, c))) == 1.0);
  CHECK(cost_of(class_cost_map(one_pixel(0, 0.0))) == 1.0);
}

TEST_CASE("roughness cost examples") {
  CHECK(cost_of(roughness_cost_map(one_pixel(0, 1.0))) == doctest::Approx(0.15));
  CHECK(cost_of(roughness_cost_map(one_pixel(3, 1.0))) == doctest::Approx(0.9));
  CHECK(cost_of(roughness_cost_map(one_pixel(1, 0.5))) == doctest::Approx(0.7));
}

TEST_CASE("void pixels and unknown ids") {
  const LabelFrame l(2, 1, {LabelFrame::kVoidLabel, 1}, 1.0, 4);
  const ImageCostMap m = class_cost_map(l);
  CHECK_FALSE(m.valid[0]);
  CHECK(m.valid[1]);
  const LabelFrame six(1, 1, {5}, 1.0, 6);
  CHECK_THROWS(class_cost_map(six));
}

TEST_CASE("cost ordering at full confidence follows the tables") {
  std::vector<double> seg, rough;
  for (std::uint8_t c = 0; c < 4; ++c) {
    seg.push_back(cost_of(class_cost_map(one_pixel(c, 1.0))));
    rough.push_back(cost_of(roughness_cost_map(one_pixel(c, 1.0))));
  }
  for (int i = 0; i + 1 < 4; ++i) {
    CHECK(seg[i] < seg[i + 1]);
    CHECK(rough[i] < rough[i + 1]);
  }
}

TEST_CASE("raising confidence never raises cost") {
  for (std::uint8_t c = 0; c < 3; ++c) {
    double prev = 2.0;
    for (int k = 0; k <= 100; ++k) {
      const double v = cost_of(class_cost_map(one_pixel(c, k / 100.0)));
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("roughness bins") {
  const RoughnessBins b;
  CHECK(b.classify(0.001) == RoughnessClass::LV0);
  CHECK(b.classify(0.0039) == RoughnessClass::LV0);
  CHECK(b.classify(0.004) == RoughnessClass::LV1);
  CHECK(b.classify(0.03) == RoughnessClass::LV2);
  CHECK(b.classify(0.0999) == RoughnessClass::LV2);
  CHECK(b.classify(0.10) == RoughnessClass::LV3);
  CHECK(b.classify(5.0) == RoughnessClass::LV3);
  CHECK_THROWS(RoughnessBins{0.001, {0.03, 0.004, 0.1}}.validate());
  CHECK_THROWS(RoughnessBins{0.005, {0.004, 0.03, 0.1}}.validate());
}

TEST_CASE("appearance fusion examples") {
  ImageCostMap seg{1, 1, {0.2}, {1}, 0}, rough{1, 1, {0.9}, {1}, 0};
  CHECK(fuse_appearance(seg, rough, {0.7, 0.3}).cost[0] == doctest::Approx(0.41).epsilon(1e-12));
  rough.valid[0] = 0;
  CHECK(fuse_appearance(seg, rough, {0.7, 0.3}).cost[0] == 0.2);
  seg.valid[0] = 0;
  CHECK_FALSE(fuse_appearance(seg, rough).valid[0]);
}

TEST_CASE("appearance fusion fixed point and range") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1), uw(0.5001, 1.0);
  for (int t = 0; t < 50; ++t) {
    ImageCostMap a{8, 8, {}, std::vector<std::uint8_t>(64, 1), 0};
    ImageCostMap b{8, 8, {}, std::vector<std::uint8_t>(64, 1), 0};
    for (int i = 0; i < 64; ++i) {
      a.cost.push_back(u(rng));
      b.cost.push_back(u(rng));
    }
    const double ws = uw(rng);
    const AppearanceWeights w{ws, 1.0 - ws};
    const ImageCostMap same = fuse_appearance(a, a, w);
    const ImageCostMap mixed = fuse_appearance(a, b, w);
    for (int i = 0; i < 64; ++i) {
      CHECK(same.cost[i] == doctest::Approx(a.cost[i]).epsilon(1e-12));
      CHECK(mixed.cost[i] >= 0.0);
      CHECK(mixed.cost[i] <= 1.0);
      CHECK(std::abs(mixed.cost[i] - (ws * a.cost[i] + (1 - ws) * b.cost[i])) < 1e-12);
    }
  }
}

TEST_CASE("appearance weight and size validation") {
  ImageCostMap a{1, 1, {0.2}, {1}, 0}, b{2, 1, {0.2, 0.3}, {1, 1}, 0};
  CHECK_THROWS_AS(fuse_appearance(a, b), DimensionMismatch);
  CHECK_THROWS(fuse_appearance(a, a, {0.3, 0.7}));
  CHECK_THROWS(fuse_appearance(a, a, {0.5, 0.5}));
  CHECK_THROWS(fuse_appearance(a, a, {0.7, 0.4}));
}
