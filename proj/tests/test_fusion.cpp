#include "hytrav/fusion.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace hytrav;

namespace {

CostGrid random_grid(std::mt19937_64& rng, const GridSpec& s, double known_p) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> c(s.cell_count());
  std::vector<std::uint8_t> k(s.cell_count());
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = u(rng);
    k[i] = u(rng) < known_p;
  }
  return CostGrid(s, c, k);
}

}  // namespace

TEST_CASE("fuse_grids examples") {
  const GridSpec s{1, 3, 0.1, 0, 0};
  const CostGrid a(s, {0.4, 0.3, 0.0}, {1, 1, 0});
  const CostGrid g(s, {0.8, 0.3, 0.7}, {1, 1, 1});
  const CostGrid h = fuse_grids(a, g, {0.5, 0.5});
  CHECK(h.cost({0, 0}) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(h.cost({0, 1}) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(h.cost({0, 2}) == 0.7);
  CHECK(h.known_count() == 3);
}

TEST_CASE("fuse_grids properties") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 1);
  const GridSpec s{20, 20, 0.1, 0, 10};
  for (int t = 0; t < 30; ++t) {
    const CostGrid a = random_grid(rng, s, 0.6), g = random_grid(rng, s, 0.6);
    const double wa = u(rng);
    const CostGrid h = fuse_grids(a, g, {wa, 1 - wa});
    const CostGrid swapped = fuse_grids(g, a, {1 - wa, wa});
    for (std::size_t i = 0; i < s.cell_count(); ++i) {
      const bool ka = a.known_mask()[i], kg = g.known_mask()[i];
      CHECK(static_cast<bool>(h.known_mask()[i]) == (ka || kg));
      if (!h.known_mask()[i]) continue;
      CHECK(h.costs()[i] >= 0.0);
      CHECK(h.costs()[i] <= 1.0);
      CHECK(std::abs(h.costs()[i] - swapped.costs()[i]) < 1e-12);
      if (ka && kg) CHECK(std::abs(h.costs()[i] - (wa * a.costs()[i] + (1 - wa) * g.costs()[i])) < 1e-12);
      if (ka && !kg) CHECK(h.costs()[i] == a.costs()[i]);
      if (!ka && kg) CHECK(h.costs()[i] == g.costs()[i]);
    }
  }
}

TEST_CASE("fuse_grids validation") {
  const CostGrid a(GridSpec{2, 2, 0.1, 0, 0}), b(GridSpec{2, 2, 0.2, 0, 0});
  CHECK_THROWS_AS(fuse_grids(a, b), DimensionMismatch);
  CHECK_THROWS(fuse_grids(a, a, {0.6, 0.6}));
}

TEST_CASE("project_to_grid examples") {
  const GridSpec s;
  std::vector<Eigen::Vector3d> pts{{1.0, 0.0, 0}, {1.01, 0.02, 0}, {2.0, 1.0, 0}, {50, 0, 0}};
  const PointCloud cloud(4, 1, pts, {1, 1, 1, 1}, "base");

  const ImageCostMap uniform{4, 1, {0.3, 0.3, 0.3, 0.3}, {1, 1, 1, 1}, 0};
  const CostGrid g = project_to_grid(uniform, cloud, s);
  CHECK(g.known_count() == 2);
  for (std::size_t i = 0; i < g.costs().size(); ++i) {
    if (g.known_mask()[i]) CHECK(g.costs()[i] == 0.3);
  }

  const ImageCostMap single{4, 1, {0.2, 0.9, 0.5, 0.5}, {0, 0, 1, 0}, 0};
  const CostGrid one = project_to_grid(single, cloud, s);
  CHECK(one.known_count() == 1);
  CHECK(one.cost(*s.cell_of(2.0, 1.0)) == 0.5);

  const ImageCostMap two{4, 1, {0.2, 0.9, 0.5, 0.5}, {1, 1, 0, 0}, 0};
  CHECK(project_to_grid(two, cloud, s).cost(*s.cell_of(1.0, 0.0)) == 0.9);

  const ImageCostMap wrong{2, 2, {0, 0, 0, 0}, {1, 1, 1, 1}, 0};
  CHECK_THROWS_AS(project_to_grid(wrong, cloud, s), DimensionMismatch);
}

TEST_CASE("project_to_grid is invariant to pixel enumeration order") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> ux(0, 4), uy(-2, 2), u(0, 1);
  const int n = 400;
  std::vector<Eigen::Vector3d> pts;
  ImageCostMap m{n, 1, {}, {}, 0};
  for (int i = 0; i < n; ++i) {
    pts.emplace_back(ux(rng), uy(rng), 0);
    m.cost.push_back(u(rng));
    m.valid.push_back(u(rng) < 0.9);
  }
  const GridSpec s;
  const CostGrid ref = project_to_grid(m, PointCloud(n, 1, pts, std::vector<std::uint8_t>(n, 1), "base"), s);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Eigen::Vector3d> p2;
  ImageCostMap m2{n, 1, {}, {}, 0};
  for (int i : perm) {
    p2.push_back(pts[i]);
    m2.cost.push_back(m.cost[i]);
    m2.valid.push_back(m.valid[i]);
  }
  const CostGrid g = project_to_grid(m2, PointCloud(n, 1, p2, std::vector<std::uint8_t>(n, 1), "base"), s);
  CHECK(g.costs() == ref.costs());
  CHECK(g.known_mask() == ref.known_mask());
}
