#include "hytrav/appearance.hpp"
#include "hytrav/config.hpp"
#include "hytrav/fusion.hpp"
#include "hytrav/geometry.hpp"
#include "hytrav/io.hpp"
#include "hytrav/pipeline.hpp"
#include "hytrav/planner.hpp"
#include "hytrav/roughness.hpp"
#include "hytrav/synthgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hytrav;

namespace {

Config config_or_default(const std::string& path) { return path.empty() ? Config{} : load_config(path); }

std::vector<double> parse_pair(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": expected two comma-separated numbers, got '" + s + "'");
    }
  }
  if (out.size() != 2) throw std::invalid_argument(std::string(what) + ": expected two comma-separated numbers");
  return out;
}

Cell parse_cell(const std::string& s, const char* what) {
  const auto v = parse_pair(s, what);
  if (v[0] != std::floor(v[0]) || v[1] != std::floor(v[1])) {
    throw std::invalid_argument(std::string(what) + ": cell indices must be integers");
  }
  return {static_cast<int>(v[0]), static_cast<int>(v[1])};
}

std::optional<fs::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

json weights_json(const Config& c) {
  return {{"appearance", {{"w_seg", c.appearance_weights.w_seg}, {"w_rough", c.appearance_weights.w_rough}}},
          {"fusion", {{"w_appearance", c.fusion.w_a}, {"w_geometry", c.fusion.w_g}}}};
}

PlanRequest request_from(const Config& c, Cell start, Cell goal) {
  return {start, goal, c.planner.lethal, c.planner.epsilon, c.planner.unknown};
}

void write_path_outputs(const fs::path& stem, const CostGrid& grid, const Path& path) {
  std::string csv = "row,col,x,y,cost\n";
  char buf[160];
  for (const Cell& c : path.cells) {
    const Eigen::Vector2d xy = grid.spec().center_of(c);
    std::snprintf(buf, sizeof buf, "%d,%d,%.6f,%.6f,%.17g\n", c.row, c.col, xy.x(), xy.y(),
                  grid.known(c) ? grid.cost(c) : std::nan(""));
    csv += buf;
  }
  io::write_text(stem.string() + "_path.csv", csv);
  const GridSpec& s = grid.spec();
  io::Raster<std::uint8_t> img{s.cols, s.rows, std::vector<std::uint8_t>(s.cell_count(), 0)};
  for (std::size_t i = 0; i < s.cell_count(); ++i) {
    if (grid.known_mask()[i]) img.data[i] = static_cast<std::uint8_t>(55 + std::lround(grid.costs()[i] * 150.0));
  }
  for (const Cell& c : path.cells) img.data[s.index(c)] = 255;
  io::write_pgm(stem.string() + "_plan.pgm", img);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid terrain traversability tools"};
  app.require_subcommand(1);

  std::string config_path;
  int workers = 1;

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Cost grids for one depth + label frame set");
  std::string a_depth, a_seg, a_rough, a_seg_conf, a_rough_conf, a_out;
  double a_seg_scalar = 1.0, a_rough_scalar = 1.0;
  analyze->add_option("--depth", a_depth, "Depth image (.pfm meters or 16-bit .png)")->required()->check(CLI::ExistingFile);
  analyze->add_option("--seg", a_seg, "Terrain class PNG")->required()->check(CLI::ExistingFile);
  analyze->add_option("--rough", a_rough, "Roughness level PNG")->required()->check(CLI::ExistingFile);
  analyze->add_option("--seg-conf", a_seg_conf, "Terrain confidence PNG (value/255)")->check(CLI::ExistingFile);
  analyze->add_option("--rough-conf", a_rough_conf, "Roughness confidence PNG (value/255)")->check(CLI::ExistingFile);
  analyze->add_option("--seg-confidence", a_seg_scalar, "Scalar terrain confidence without --seg-conf")
      ->check(CLI::Range(0.0, 1.0));
  analyze->add_option("--rough-confidence", a_rough_scalar, "Scalar roughness confidence without --rough-conf")
      ->check(CLI::Range(0.0, 1.0));
  analyze->add_option("--config", config_path, "Config JSON")->check(CLI::ExistingFile);
  analyze->add_option("--out", a_out, "Output directory")->required();
  analyze->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  // roughness-gt
  auto* rgt = app.add_subcommand("roughness-gt", "Ground-truth roughness from a depth image");
  std::string r_depth, r_out;
  rgt->add_option("--depth", r_depth, "Depth image")->required()->check(CLI::ExistingFile);
  rgt->add_option("--config", config_path, "Config JSON (intrinsics, patches, roughness_bins)")->check(CLI::ExistingFile);
  rgt->add_option("--out", r_out, "Output directory")->required();

  // stats
  auto* stats = app.add_subcommand("stats", "Class frequencies and inverse-frequency weights");
  std::string s_dir, s_kind = "terrain", s_out;
  stats->add_option("--labels", s_dir, "Directory of 8-bit label PNGs")->required()->check(CLI::ExistingDirectory);
  stats->add_option("--kind", s_kind, "terrain or roughness")->check(CLI::IsMember({"terrain", "roughness"}));
  stats->add_option("--out", s_out, "Output JSON (stdout if omitted)");

  // gen
  auto* gen = app.add_subcommand("gen", "Render a synthetic scene into a bag directory");
  std::string g_scene, g_out;
  gen->add_option("--scene", g_scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  gen->add_option("--config", config_path, "Config JSON (intrinsics, camera mount, bins)")->check(CLI::ExistingFile);
  gen->add_option("--out", g_out, "Output bag directory")->required();

  // plan
  auto* planc = app.add_subcommand("plan", "Plan a path over a grid CSV");
  std::string p_grid, p_start, p_goal, p_out;
  planc->add_option("--grid", p_grid, "Grid CSV")->required()->check(CLI::ExistingFile);
  planc->add_option("--config", config_path, "Config JSON (grid resolution/origin, planner)")->check(CLI::ExistingFile);
  planc->add_option("--start", p_start, "Start cell ROW,COL (default: robot cell)");
  planc->add_option("--goal", p_goal, "Goal cell ROW,COL")->required();
  planc->add_option("--out", p_out, "Output stem; writes <stem>_path.csv and <stem>_plan.pgm")->required();

  // replay
  auto* replay = app.add_subcommand("replay", "Replay a recorded bag");
  std::string b_dir, b_out, b_plan, b_log;
  std::optional<double> b_tol;
  replay->add_option("--bag", b_dir, "Bag directory")->required()->check(CLI::ExistingDirectory);
  replay->add_option("--config", config_path, "Config JSON")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", b_out, "Output directory")->required();
  replay->add_option("--plan", b_plan, "Goal GOALX,GOALY in world coordinates");
  replay->add_option("--sync-tolerance", b_tol, "Synchronizer tolerance in seconds")->check(CLI::PositiveNumber);
  replay->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  replay->add_option("--log", b_log, "Write JSON-line step log here instead of stderr");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      const Config cfg = config_or_default(config_path);
      const DepthFrame depth = io::read_depth(a_depth, cfg.depth_png_scale);
      const LabelFrame seg = io::read_labels(a_seg, opt_path(a_seg_conf), a_seg_scalar, kNumTerrainClasses);
      const LabelFrame rough = io::read_labels(a_rough, opt_path(a_rough_conf), a_rough_scalar, kNumRoughnessClasses);
      const StepOutput out = process_frame(depth, seg, rough, cfg, workers);
      const fs::path dir(a_out);
      fs::create_directories(dir);
      io::write_grid(dir / "appearance", out.appearance);
      io::write_grid(dir / "geometry", out.geometry);
      io::write_grid(dir / "hybrid", out.hybrid);
      json side{{"grid_spec", to_json(cfg.grid)}, {"weights", weights_json(cfg)},
                {"known_cells",
                 {{"appearance", out.appearance.known_count()},
                  {"geometry", out.geometry.known_count()},
                  {"hybrid", out.hybrid.known_count()}}}};
      io::write_text(dir / "analysis.json", side.dump(2) + "\n");
      return 0;
    }

    if (*rgt) {
      const Config cfg = config_or_default(config_path);
      const DepthFrame depth = io::read_depth(r_depth, cfg.depth_png_scale);
      const RoughnessMap map = build_roughness_map(depth, cfg.intrinsics, cfg.patches, cfg.roughness_bins);
      const fs::path dir(r_out);
      fs::create_directories(dir);
      io::write_pfm(dir / "residual.pfm", map.width, map.height, map.residual);
      io::write_png8(dir / "levels.png", io::Raster<std::uint8_t>{map.width, map.height, map.level});
      std::array<std::size_t, kNumRoughnessClasses> counts{};
      double max_r = 0.0;
      for (std::size_t i = 0; i < map.level.size(); ++i) {
        if (!map.valid[i]) continue;
        ++counts[map.level[i]];
        max_r = std::max(max_r, map.residual[i]);
      }
      json lv = json::object();
      for (int c = 0; c < kNumRoughnessClasses; ++c) {
        lv[std::string(to_string(static_cast<RoughnessClass>(c)))] = counts[c];
      }
      json js{{"valid_pixels", map.valid_count()},
              {"patches", partition_patches(depth, cfg.patches).size()},
              {"max_residual_m", max_r},
              {"level_counts", lv}};
      io::write_text(dir / "stats.json", js.dump(2) + "\n");
      return 0;
    }

    if (*stats) {
      const int n = s_kind == "terrain" ? kNumTerrainClasses : kNumRoughnessClasses;
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(s_dir)) {
        if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw std::invalid_argument("no .png files in " + s_dir);
      std::vector<LabelFrame> frames;
      for (const auto& f : files) frames.push_back(io::read_labels(f, std::nullopt, 1.0, n));
      const ClassStatistics st = class_statistics(frames, n);
      json classes = json::array();
      for (int c = 0; c < n; ++c) {
        const std::string name = s_kind == "terrain" ? std::string(to_string(static_cast<TerrainClass>(c)))
                                                     : std::string(to_string(static_cast<RoughnessClass>(c)));
        json e{{"id", c}, {"name", name}, {"count", st.counts[c]}, {"frequency", st.frequency[c]},
               {"absent", st.absent[c] != 0}};
        e["raw_weight"] = st.absent[c] ? json(nullptr) : json(st.raw_weight[c]);
        e["weight"] = st.absent[c] ? json(nullptr) : json(st.weight[c]);
        classes.push_back(e);
      }
      const std::string text = json{{"frames", files.size()}, {"total_pixels", st.total}, {"classes", classes}}.dump(2) + "\n";
      if (s_out.empty()) {
        std::cout << text;
      } else {
        io::write_text(s_out, text);
      }
      return 0;
    }

    if (*gen) {
      const Config cfg = config_or_default(config_path);
      const synth::SceneSpec scene = synth::scene_from_json(json::parse(io::read_text(g_scene)));
      const RecordedBag bag = write_synthetic_bag(scene, cfg, g_out);
      std::cerr << "wrote " << bag.entries.size() << " entries to " << g_out << "\n";
      return 0;
    }

    if (*planc) {
      const Config cfg = config_or_default(config_path);
      const CostGrid grid = io::read_grid_csv(p_grid, cfg.grid);
      const Cell start = p_start.empty() ? Cell{grid.spec().origin_row, grid.spec().origin_col}
                                         : parse_cell(p_start, "--start");
      const Cell goal = parse_cell(p_goal, "--goal");
      const auto path = plan(grid, request_from(cfg, start, goal));
      if (!path) {
        std::cerr << "no path\n";
        return 2;
      }
      write_path_outputs(p_out, grid, *path);
      std::cout << json{{"cells", path->cells.size()}, {"weight", path->weight}, {"cost_sum", path->cost_sum}}.dump()
                << "\n";
      return 0;
    }

    if (*replay) {
      const Config cfg = load_config(config_path);
      const RecordedBag bag = RecordedBag::load(b_dir);
      ReplayOptions opt;
      opt.out_dir = b_out;
      opt.sync_tolerance = b_tol;
      opt.workers = workers;
      if (!b_plan.empty()) {
        const auto g = parse_pair(b_plan, "--plan");
        opt.goal_world = Eigen::Vector2d(g[0], g[1]);
      }
      std::ofstream log_file;
      if (!b_log.empty()) {
        log_file.open(b_log);
        if (!log_file) throw std::runtime_error("cannot open log file " + b_log);
        opt.log = &log_file;
      } else {
        opt.log = &std::cerr;
      }
      const ReplayResult res = run_replay(bag, cfg, opt);
      std::cerr << res.steps.size() << " step(s), " << res.skipped.size() << " skipped, " << res.tuples
                << " tuple(s)\n";
      return res.steps.empty() ? 1 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
