#include "hytrav/transform.hpp"
#include "hytrav/types.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <random>

using namespace hytrav;

namespace {

RigidTransform random_transform(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::Quaterniond q(u(rng), u(rng), u(rng), u(rng));
  q.normalize();
  return RigidTransform(q.toRotationMatrix(), Eigen::Vector3d(3 * u(rng), 3 * u(rng), 3 * u(rng)));
}

}  // namespace

TEST_CASE("intrinsics validation") {
  CHECK_NOTHROW(CameraIntrinsics{100, 100, 50, 50, 100, 100}.validate());
  CHECK_THROWS(CameraIntrinsics{0, 100, 50, 50, 100, 100}.validate());
  CHECK_THROWS(CameraIntrinsics{100, -1, 50, 50, 100, 100}.validate());
  CHECK_THROWS(CameraIntrinsics{100, 100, 100, 50, 100, 100}.validate());
  CHECK_THROWS(CameraIntrinsics{100, 100, 50, -0.5, 100, 100}.validate());
}

TEST_CASE("depth frame masks missing data") {
  DepthFrame d(2, 2, {1.0, 0.0, std::nan(""), -3.0}, 1.5);
  CHECK(d.valid(0, 0));
  CHECK_FALSE(d.valid(1, 0));
  CHECK_FALSE(d.valid(0, 1));
  CHECK_FALSE(d.valid(1, 1));
  CHECK(d.valid_count() == 1);
  CHECK(std::isnan(d.at(1, 1)));
  CHECK(d.stamp() == 1.5);
  CHECK_THROWS_AS(DepthFrame(2, 2, {1.0, 2.0, 3.0}), DimensionMismatch);
}

TEST_CASE("label frame validation") {
  CHECK_NOTHROW(LabelFrame(2, 1, {0, 3}, 0.5, 4));
  CHECK_NOTHROW(LabelFrame(2, 1, {0, LabelFrame::kVoidLabel}, 0.5, 4));
  CHECK_THROWS(LabelFrame(2, 1, {0, 4}, 0.5, 4));
  CHECK_THROWS(LabelFrame(2, 1, {0, 1}, 1.5, 4));
  CHECK_THROWS(LabelFrame(2, 1, {0, 1}, std::vector<double>{0.5, -0.1}, 4));
  CHECK_THROWS_AS(LabelFrame(2, 1, {0, 1}, std::vector<double>{0.5}, 4), DimensionMismatch);
}

TEST_CASE("point cloud placeholders are masked") {
  PointCloud c(2, 1, {{1, 2, 3}, {4, 5, 6}}, {1, 0}, "camera");
  CHECK(c.valid(0));
  CHECK_FALSE(c.valid(1));
  CHECK(std::isnan(c.point(1).x()));
  CHECK(c.valid_count() == 1);
}

TEST_CASE("rigid transform validation") {
  Eigen::Matrix3d bad = Eigen::Matrix3d::Identity();
  bad(0, 0) = 1.01;
  CHECK_THROWS(RigidTransform(bad, Eigen::Vector3d::Zero()));
  Eigen::Matrix3d reflection = Eigen::Matrix3d::Identity();
  reflection(2, 2) = -1.0;
  CHECK_THROWS(RigidTransform(reflection, Eigen::Vector3d::Zero()));
}

TEST_CASE("compose examples") {
  std::mt19937_64 rng(1);
  const RigidTransform t = random_transform(rng);
  CHECK(approx_equal(compose(t, RigidTransform::identity()), t, 1e-12));
  CHECK(approx_equal(compose(t, t.inverse()), RigidTransform::identity(), 1e-9));
  const RigidTransform rz90 = RigidTransform::rot_z(oracle::rad(90));
  CHECK(approx_equal(compose(rz90, rz90), RigidTransform::rot_z(oracle::rad(180)), 1e-12));

  // applies b first, then a
  const RigidTransform a = RigidTransform::translation_only({1, 0, 0});
  const Eigen::Vector3d p = compose(a, rz90).apply({1, 0, 0});
  CHECK(p.x() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.y() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("compose is associative") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const RigidTransform a = random_transform(rng), b = random_transform(rng), c = random_transform(rng);
    CHECK(approx_equal(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-9));
  }
}

TEST_CASE("apply_transform examples") {
  PointCloud c(1, 1, {Eigen::Vector3d(1, 2, 3)}, {1}, "a");
  const PointCloud same = apply_transform(RigidTransform::identity(), c);
  CHECK(same.point(0) == c.point(0));
  const PointCloud moved = apply_transform(RigidTransform::translation_only({0, 0, 1}), c);
  CHECK(moved.point(0).isApprox(Eigen::Vector3d(1, 2, 4)));
  PointCloud x(1, 1, {Eigen::Vector3d(1, 0, 0)}, {1}, "a");
  const PointCloud r = apply_transform(RigidTransform::rot_z(oracle::rad(90)), x);
  CHECK((r.point(0) - Eigen::Vector3d(0, 1, 0)).norm() < 1e-12);
}

TEST_CASE("apply_transform is rigid and keeps order and mask") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<Eigen::Vector3d> pts;
  std::vector<std::uint8_t> mask;
  for (int i = 0; i < 60; ++i) {
    pts.emplace_back(u(rng), u(rng), u(rng));
    mask.push_back(i % 7 == 3 ? 0 : 1);
  }
  const PointCloud cloud(10, 6, pts, mask, "camera");
  for (int trial = 0; trial < 10; ++trial) {
    const RigidTransform t = random_transform(rng);
    const PointCloud out = apply_transform(t, cloud, "base");
    CHECK(out.frame_id() == "base");
    CHECK(out.valid_mask() == cloud.valid_mask());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (!cloud.valid(i)) continue;
      CHECK((out.point(i) - (t.rotation() * cloud.point(i) + t.translation())).norm() < 1e-12);
      for (std::size_t j = i + 1; j < cloud.size(); j += 5) {
        if (!cloud.valid(j)) continue;
        const double before = (cloud.point(i) - cloud.point(j)).norm();
        const double after = (out.point(i) - out.point(j)).norm();
        CHECK(std::abs(before - after) < 1e-9);
      }
    }
  }
}

TEST_CASE("optical to body axes") {
  const Eigen::Matrix3d m = optical_to_body();
  CHECK((m * Eigen::Vector3d(0, 0, 1) - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);   // forward
  CHECK((m * Eigen::Vector3d(1, 0, 0) - Eigen::Vector3d(0, -1, 0)).norm() < 1e-15);  // right
  CHECK((m * Eigen::Vector3d(0, 1, 0) - Eigen::Vector3d(0, 0, -1)).norm() < 1e-15);  // down
}

TEST_CASE("grid spec cell mapping") {
  GridSpec g;
  CHECK_NOTHROW(g.validate());
  const auto robot = g.cell_of(0.0, 0.0);
  REQUIRE(robot);
  CHECK(*robot == Cell{0, 50});
  CHECK_FALSE(g.cell_of(-0.2, 0.0));
  CHECK_FALSE(g.cell_of(10.0, 0.0));
  CHECK(*g.cell_of(1.0, -0.31) == Cell{10, 47});
  const Eigen::Vector2d c = g.center_of({10, 47});
  CHECK(c.x() == doctest::Approx(1.0));
  CHECK(c.y() == doctest::Approx(-0.3));

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ux(-0.04, 9.9), uy(-5.0, 4.9);
  for (int i = 0; i < 1000; ++i) {
    const double x = ux(rng), y = uy(rng);
    int r, cc;
    const bool inside = oracle::cell_of(x, y, g.rows, g.cols, g.resolution, g.origin_row, g.origin_col, r, cc);
    const auto cell = g.cell_of(x, y);
    REQUIRE(inside == cell.has_value());
    if (cell) CHECK(*cell == Cell{r, cc});
  }

  GridSpec bad;
  bad.origin_row = -1;
  CHECK_THROWS(bad.validate());
  bad = GridSpec{};
  bad.resolution = 0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("cost grid validation") {
  GridSpec g{2, 2, 0.1, 0, 1};
  const CostGrid empty(g);
  CHECK(empty.known_count() == 0);
  const CostGrid grid(g, {0.1, 0.5, 7.0, 1.0}, {1, 1, 0, 1});
  CHECK(grid.known_count() == 3);
  CHECK(grid.cost({1, 0}) == 0.0);
  CHECK_THROWS(CostGrid(g, {0.1, 1.2, 0.0, 0.0}, {1, 1, 0, 0}));
  CHECK_THROWS_AS(CostGrid(g, {0.1}, {1}), DimensionMismatch);
}
