#include "hytrav/config.hpp"
#include "hytrav/io.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <fstream>

using namespace hytrav;
using nlohmann::json;

TEST_CASE("pfm round trip") {
  const testutil::TempDir dir;
  std::vector<double> v{0.5, 1.25, std::nan(""), 3.0, 4.5, -1.0};
  io::write_pfm(dir.path / "a.pfm", 3, 2, v);
  const auto r = io::read_pfm(dir.path / "a.pfm");
  CHECK(r.width == 3);
  CHECK(r.height == 2);
  CHECK(r.data[0] == 0.5f);
  CHECK(r.data[1] == 1.25f);
  CHECK(std::isnan(r.data[2]));
  CHECK(r.data[5] == -1.0f);

  const DepthFrame d = io::read_depth(dir.path / "a.pfm", 0.001, 2.0);
  CHECK(d.valid_count() == 4);
  CHECK(d.stamp() == 2.0);
  CHECK(d.at(1, 1) == 4.5);

  io::write_text(dir.path / "bad.pfm", "P5\n1 1\n255\n\x01");
  CHECK_THROWS_AS(io::read_pfm(dir.path / "bad.pfm"), io::FormatError);
  io::write_text(dir.path / "short.pfm", "Pf\n4 4\n-1.0\nabc");
  CHECK_THROWS_AS(io::read_pfm(dir.path / "short.pfm"), io::FormatError);
}

TEST_CASE("png round trips") {
  const testutil::TempDir dir;
  const io::Raster<std::uint8_t> a{3, 2, {0, 1, 2, 127, 254, 255}};
  io::write_png8(dir.path / "a.png", a);
  CHECK(io::read_png8(dir.path / "a.png").data == a.data);
  const io::Raster<std::uint16_t> b{2, 2, {0, 1000, 65535, 4242}};
  io::write_png16(dir.path / "b.png", b);
  const auto rb = io::read_png16(dir.path / "b.png");
  CHECK(rb.data == b.data);
  CHECK_THROWS_AS(io::read_png16(dir.path / "a.png"), io::FormatError);
  io::write_text(dir.path / "junk.png", "not a png at all");
  CHECK_THROWS_AS(io::read_png8(dir.path / "junk.png"), io::FormatError);
  CHECK_THROWS_AS(io::read_png8(dir.path / "missing.png"), io::FormatError);

  const DepthFrame d = io::read_depth(dir.path / "b.png", 0.001);
  CHECK_FALSE(d.valid(0, 0));
  CHECK(d.at(1, 0) == doctest::Approx(1.0));
  CHECK(d.at(0, 1) == doctest::Approx(65.535));
}

TEST_CASE("pgm round trip") {
  const testutil::TempDir dir;
  const io::Raster<std::uint8_t> a{4, 1, {9, 8, 7, 6}};
  io::write_pgm(dir.path / "a.pgm", a);
  const auto r = io::read_pgm(dir.path / "a.pgm");
  CHECK(r.width == 4);
  CHECK(r.data == a.data);
}

TEST_CASE("label round trip with confidence raster") {
  const testutil::TempDir dir;
  const LabelFrame l(3, 1, {0, 3, LabelFrame::kVoidLabel}, std::vector<double>{1.0, 0.5, 0.0}, 4);
  io::write_labels(dir.path / "c.png", dir.path / "c_conf.png", l);
  const LabelFrame r = io::read_labels(dir.path / "c.png", dir.path / "c_conf.png", 1.0, 4);
  CHECK(r.class_ids() == l.class_ids());
  CHECK(r.confidence()[0] == 1.0);
  CHECK(r.confidence()[1] == doctest::Approx(128.0 / 255.0));
  const LabelFrame s = io::read_labels(dir.path / "c.png", std::nullopt, 0.25, 4);
  CHECK(s.confidence()[1] == 0.25);
  CHECK_THROWS(io::read_labels(dir.path / "c.png", std::nullopt, 1.0, 3));
}

TEST_CASE("grid outputs") {
  const testutil::TempDir dir;
  const GridSpec s{2, 3, 0.1, 0, 1};
  const CostGrid g(s, {0.0, 0.5, 1.0, 0.1234567890123, 0.0, 0.0}, {1, 1, 1, 1, 0, 0});
  io::write_grid(dir.path / "g", g);
  const auto pgm = io::read_pgm(dir.path / "g.pgm");
  CHECK(pgm.data == std::vector<std::uint8_t>{0, 128, 255, 31, 0, 0});
  const auto mask = io::read_pgm(dir.path / "g_mask.pgm");
  CHECK(mask.data == std::vector<std::uint8_t>{255, 255, 255, 255, 0, 0});
  const CostGrid back = io::read_grid_csv(dir.path / "g.csv", GridSpec{1, 1, 0.1, 0, 1});
  CHECK(back.spec() == s);
  CHECK(back.costs() == g.costs());
  CHECK(back.known_mask() == g.known_mask());

  io::write_text(dir.path / "ragged.csv", "0,1\n0\n");
  CHECK_THROWS_AS(io::read_grid_csv(dir.path / "ragged.csv", s), io::FormatError);
  io::write_text(dir.path / "word.csv", "0,x\n");
  CHECK_THROWS_AS(io::read_grid_csv(dir.path / "word.csv", s), io::FormatError);
}

TEST_CASE("default config") {
  const Config c;
  CHECK_NOTHROW(c.validate());
  // the optical axis points forward and 30 degrees down
  const Eigen::Vector3d axis = c.camera_to_base.rotation() * Eigen::Vector3d(0, 0, 1);
  CHECK((axis - Eigen::Vector3d(std::cos(oracle::rad(30)), 0, -std::sin(oracle::rad(30)))).norm() < 1e-12);
  // image right is the robot's right
  CHECK((c.camera_to_base.rotation() * Eigen::Vector3d(1, 0, 0) - Eigen::Vector3d(0, -1, 0)).norm() < 1e-12);
  CHECK(c.camera_to_base.translation().z() == 1.5);
  CHECK(c.planner.unknown == UnknownPolicy::MaxCost);
}

TEST_CASE("config json round trip and overrides") {
  const json j = json::parse(R"({
    "intrinsics": {"fx": 100, "fy": 110, "cx": 63.5, "cy": 47.5, "width": 128, "height": 96},
    "camera_to_base": {"rpy_deg": [0, 20, 0], "translation": [0.1, 0, 1.2], "optical": true},
    "depth_png_scale": 0.0001,
    "slope": {"t_soft_deg": 25, "t_deg": 60, "signed_mode": true},
    "normals": {"k_neighbors": 20, "neighborhood": "pixel_grid"},
    "grid": {"rows": 80, "cols": 60, "resolution": 0.2},
    "appearance": {"terrain_reductions": {"sand": 0.4}, "roughness_reductions": {"LV3": 0.0}, "w_seg": 0.8, "w_rough": 0.2},
    "roughness_bins": {"floor_m": 0.002, "edges_m": [0.005, 0.04, 0.2]},
    "fusion": {"w_appearance": 0.6, "w_geometry": 0.4},
    "patches": {"s_ref": 16, "d_ref_m": 3, "s_min": 4, "s_max": 32, "min_valid_pixels": 10},
    "planner": {"lethal": 0.9, "epsilon": 0.1, "unknown": "lethal"},
    "sync": {"tolerance_s": 0.02, "queue_depth": 5}
  })");
  const Config c = config_from_json(j);
  CHECK(c.intrinsics.fy == 110);
  CHECK(c.slope.t == doctest::Approx(oracle::rad(60)));
  CHECK(c.slope.signed_mode);
  CHECK(c.normals.mode == Neighborhood::PixelGrid);
  CHECK(c.grid.origin_col == 30);
  CHECK(c.terrain_reductions.reduction == std::vector<double>{0.8, 0.7, 0.4, 0.0});
  CHECK(c.roughness_reductions.reduction[3] == 0.0);
  CHECK(c.roughness_bins.edges[2] == 0.2);
  CHECK(c.fusion.w_a == 0.6);
  CHECK(c.patches.s_max == 32);
  CHECK(c.planner.unknown == UnknownPolicy::Lethal);
  CHECK(c.sync.queue_depth == 5);

  const Config back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(approx_equal(back.camera_to_base, c.camera_to_base, 1e-12));
}

TEST_CASE("config rejects bad values") {
  CHECK_THROWS(config_from_json(json::parse(R"({"slope": {"t_soft_deg": 80}})")));
  CHECK_THROWS(config_from_json(json::parse(R"({"fusion": {"w_appearance": 0.7}})")));
  CHECK_THROWS(config_from_json(json::parse(R"({"appearance": {"w_seg": 0.3, "w_rough": 0.7}})")));
  CHECK_THROWS(config_from_json(json::parse(R"({"appearance": {"terrain_reductions": {"ice": 0.1}}})")));
  CHECK_THROWS(config_from_json(json::parse(R"({"normals": {"neighborhood": "radius"}})")));
  CHECK_THROWS(config_from_json(json::parse(R"({"planner": {"unknown": "maybe"}})")));
  CHECK_THROWS(config_from_json(json::parse(R"({"grid": {"origin_row": 500}})")));
  CHECK_THROWS(config_from_json(json::parse(R"({"camera_to_base": {"rotation": [[1,0,0],[0,1,0],[0,0,2]]}})")));
  const testutil::TempDir dir;
  io::write_text(dir.path / "broken.json", "{ nope");
  CHECK_THROWS_AS(load_config(dir.path / "broken.json"), io::FormatError);
}
