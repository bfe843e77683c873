#include "hytrav/pipeline.hpp"

#include "hytrav/fusion.hpp"
#include "hytrav/geometry.hpp"
#include "hytrav/io.hpp"
#include "hytrav/sync.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <tuple>
#include <limits>
#include <ostream>

namespace hytrav {

using nlohmann::json;

namespace {

Stream stream_from_name(const std::string& s) {
  if (s == "depth") return Stream::Depth;
  if (s == "seg") return Stream::Seg;
  if (s == "rough") return Stream::Rough;
  if (s == "pose") return Stream::Pose;
  throw io::FormatError("manifest: unknown stream '" + s + "'");
}

std::string step_name(int index, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "step_%04d%s", index, suffix);
  return buf;
}

std::string frame_name(const char* prefix, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu%s", prefix, i, ext);
  return buf;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

json cell_json(Cell c) { return json::array({c.row, c.col}); }

io::Raster<std::uint8_t> plan_overlay(const CostGrid& grid, const std::vector<Cell>& path) {
  const GridSpec& s = grid.spec();
  io::Raster<std::uint8_t> img{s.cols, s.rows, std::vector<std::uint8_t>(s.cell_count(), 0)};
  for (std::size_t i = 0; i < s.cell_count(); ++i) {
    if (grid.known_mask()[i]) img.data[i] = static_cast<std::uint8_t>(55 + std::lround(grid.costs()[i] * 150.0));
  }
  for (const Cell& c : path) img.data[s.index(c)] = 255;
  return img;
}

// Goal in grid coordinates: clipped to the grid along the ray from the robot,
// then moved to the nearest enterable cell if needed.
std::pair<Cell, bool> resolve_goal(const CostGrid& grid, const Eigen::Vector2d& goal_base, const PlanRequest& req) {
  const GridSpec& s = grid.spec();
  bool clipped = false;
  std::optional<Cell> cell = s.cell_of(goal_base.x(), goal_base.y());
  if (!cell) {
    clipped = true;
    const double len = goal_base.norm();
    const int n = static_cast<int>(std::ceil(len / (0.25 * s.resolution)));
    cell = Cell{s.origin_row, s.origin_col};
    for (int i = 1; i <= n; ++i) {
      const Eigen::Vector2d p = goal_base * (static_cast<double>(i) / n);
      if (auto c = s.cell_of(p.x(), p.y())) {
        cell = c;
      } else {
        break;
      }
    }
  }
  if (traversal_cost(grid, *cell, req)) return {*cell, clipped};
  std::optional<Cell> best;
  long best_d = std::numeric_limits<long>::max();
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) {
      const Cell cand{r, c};
      if (cand == req.start || !traversal_cost(grid, cand, req)) continue;
      const long d = static_cast<long>(r - cell->row) * (r - cell->row) + static_cast<long>(c - cell->col) * (c - cell->col);
      if (d < best_d) {
        best_d = d;
        best = cand;
      }
    }
  }
  return {best.value_or(*cell), true};
}

}  // namespace

std::string_view to_string(Stream s) {
  switch (s) {
    case Stream::Depth: return "depth";
    case Stream::Seg: return "seg";
    case Stream::Rough: return "rough";
    case Stream::Pose: return "pose";
  }
  return "?";
}

RecordedBag RecordedBag::load(const fs::path& root) {
  RecordedBag bag;
  bag.root = root;
  json j;
  try {
    j = json::parse(io::read_text(root / "manifest.json"));
  } catch (const json::exception& e) {
    throw io::FormatError("manifest: " + std::string(e.what()));
  }
  try {
    for (const json& e : j.at("entries")) {
      BagEntry entry;
      entry.stream = stream_from_name(e.at("stream").get<std::string>());
      entry.stamp = e.at("stamp").get<double>();
      if (e.contains("file")) entry.file = e.at("file").get<std::string>();
      if (e.contains("confidence_file")) entry.confidence = fs::path(e.at("confidence_file").get<std::string>());
      entry.scalar_confidence = e.value("confidence", 1.0);
      if (e.contains("transform")) entry.pose = transform_from_json(e.at("transform"));
      bag.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw io::FormatError("manifest: " + std::string(e.what()));
  }
  bag.validate();
  return bag;
}

void RecordedBag::save() const {
  json entries_json = json::array();
  for (const BagEntry& e : entries) {
    json j{{"stream", std::string(to_string(e.stream))}, {"stamp", e.stamp}};
    if (!e.file.empty()) j["file"] = e.file.generic_string();
    if (e.stream == Stream::Seg || e.stream == Stream::Rough) {
      if (e.confidence) {
        j["confidence_file"] = e.confidence->generic_string();
      } else {
        j["confidence"] = e.scalar_confidence;
      }
    }
    if (e.pose) j["transform"] = to_json(*e.pose);
    entries_json.push_back(std::move(j));
  }
  io::write_text(root / "manifest.json", json{{"version", 1}, {"entries", entries_json}}.dump(2) + "\n");
}

void RecordedBag::validate() const {
  double last[kNumStreams];
  bool seen[kNumStreams] = {};
  for (const BagEntry& e : entries) {
    const int s = static_cast<int>(e.stream);
    if (!std::isfinite(e.stamp)) throw io::FormatError("manifest: non-finite stamp");
    if (seen[s] && !(e.stamp > last[s])) {
      throw io::FormatError("manifest: " + std::string(to_string(e.stream)) + " stamps are not strictly increasing");
    }
    seen[s] = true;
    last[s] = e.stamp;
    if (e.stream == Stream::Pose) {
      if (!e.pose && e.file.empty()) throw io::FormatError("manifest: pose entry without transform or file");
    } else if (e.file.empty()) {
      throw io::FormatError("manifest: entry without file");
    }
    if (!e.file.empty() && !fs::exists(root / e.file)) {
      throw io::FormatError("manifest: missing file " + (root / e.file).string());
    }
    if (e.confidence && !fs::exists(root / *e.confidence)) {
      throw io::FormatError("manifest: missing file " + (root / *e.confidence).string());
    }
  }
}

RecordedBag write_synthetic_bag(const synth::SceneSpec& scene_spec, const Config& config, const fs::path& dir) {
  config.validate();
  fs::create_directories(dir);
  const synth::Scene scene(scene_spec);
  RecordedBag bag;
  bag.root = dir;
  for (std::size_t i = 0; i < scene_spec.trajectory.size(); ++i) {
    const synth::TrajectoryPose& tp = scene_spec.trajectory[i];
    const RigidTransform cam_to_world = compose(tp.base_to_world, config.camera_to_base);
    const synth::RenderedFrame f =
        synth::render_frame(scene, cam_to_world, config.intrinsics, tp.stamp, config.roughness_bins);
    const std::string depth = frame_name("depth", i, ".pfm");
    const std::string seg = frame_name("seg", i, ".png");
    const std::string rough = frame_name("rough", i, ".png");
    io::write_depth_pfm(dir / depth, f.depth);
    io::write_labels(dir / seg, std::nullopt, f.classes);
    io::write_labels(dir / rough, std::nullopt, f.roughness);
    bag.entries.push_back({Stream::Depth, tp.stamp, depth, std::nullopt, 1.0, std::nullopt});
    bag.entries.push_back({Stream::Seg, tp.stamp, seg, std::nullopt, scene_spec.label_confidence, std::nullopt});
    bag.entries.push_back({Stream::Rough, tp.stamp, rough, std::nullopt, scene_spec.label_confidence, std::nullopt});
    bag.entries.push_back({Stream::Pose, tp.stamp, {}, std::nullopt, 1.0, tp.base_to_world});
  }
  bag.save();
  return bag;
}

StepOutput process_frame(const DepthFrame& depth, const LabelFrame& seg, const LabelFrame& rough,
                         const Config& config, int workers) {
  if (seg.width() != depth.width() || seg.height() != depth.height() || rough.width() != depth.width() ||
      rough.height() != depth.height()) {
    throw DimensionMismatch("label rasters and depth frame differ in size");
  }
  auto appearance_branch = [&] {
    const ImageCostMap seg_cost = class_cost_map(seg, config.terrain_reductions);
    const ImageCostMap rough_cost = roughness_cost_map(rough, config.roughness_reductions);
    return fuse_appearance(seg_cost, rough_cost, config.appearance_weights);
  };
  auto geometry_branch = [&] {
    PointCloud cloud = apply_transform(config.camera_to_base, backproject(depth, config.intrinsics), "base");
    NormalParams np = config.normals;
    np.workers = std::max(np.workers, workers);
    const NormalField normals = estimate_normals(cloud, np);
    CostGrid grid = geometry_cost_grid(cloud, normals, config.slope, config.grid);
    return std::make_pair(std::move(cloud), std::move(grid));
  };

  StepOutput out;
  if (workers > 1) {
    auto app = std::async(std::launch::async, appearance_branch);
    auto geo = geometry_branch();
    out.appearance_image = app.get();
    out.cloud_base = std::move(geo.first);
    out.geometry = std::move(geo.second);
  } else {
    out.appearance_image = appearance_branch();
    auto geo = geometry_branch();
    out.cloud_base = std::move(geo.first);
    out.geometry = std::move(geo.second);
  }
  out.appearance = project_to_grid(out.appearance_image, out.cloud_base, config.grid);
  out.hybrid = fuse_grids(out.appearance, out.geometry, config.fusion);
  return out;
}

ReplayResult run_replay(const RecordedBag& bag, const Config& config, const ReplayOptions& options) {
  config.validate();
  SyncPolicy policy = config.sync;
  if (options.sync_tolerance) policy.tolerance = *options.sync_tolerance;

  std::vector<std::vector<StampedMessage>> streams(kNumStreams);
  for (std::size_t i = 0; i < bag.entries.size(); ++i) {
    streams[static_cast<int>(bag.entries[i].stream)].push_back({bag.entries[i].stamp, i});
  }
  const std::vector<MatchedTuple> tuples = synchronize(streams, policy);

  if (!options.out_dir.empty()) fs::create_directories(options.out_dir);

  ReplayResult result;
  result.tuples = tuples.size();
  std::optional<std::vector<std::pair<Eigen::Vector3d, double>>> previous_path;  // world point, cost then

  const PlanRequest base_req{{config.grid.origin_row, config.grid.origin_col}, {0, 0}, config.planner.lethal,
                             config.planner.epsilon, config.planner.unknown};

  for (std::size_t t = 0; t < tuples.size(); ++t) {
    const MatchedTuple& tuple = tuples[t];
    const auto t0 = std::chrono::steady_clock::now();
    json log{{"tuple", t}};
    StepRecord rec;
    try {
      const BagEntry& de = bag.entries[tuple[0].id];
      const BagEntry& se = bag.entries[tuple[1].id];
      const BagEntry& re = bag.entries[tuple[2].id];
      const BagEntry& pe = bag.entries[tuple[3].id];
      auto conf_path = [&](const BagEntry& e) -> std::optional<fs::path> {
        if (e.confidence) return bag.root / *e.confidence;
        return std::nullopt;
      };
      const DepthFrame depth = io::read_depth(bag.root / de.file, config.depth_png_scale, de.stamp);
      const LabelFrame seg =
          io::read_labels(bag.root / se.file, conf_path(se), se.scalar_confidence, kNumTerrainClasses, se.stamp);
      const LabelFrame rough =
          io::read_labels(bag.root / re.file, conf_path(re), re.scalar_confidence, kNumRoughnessClasses, re.stamp);
      rec.base_to_world = pe.pose ? *pe.pose : transform_from_json(json::parse(io::read_text(bag.root / pe.file)));
      for (int s = 0; s < kNumStreams; ++s) rec.stamps[s] = tuple[s].stamp;
      log["ms_load"] = ms_since(t0);

      const auto t1 = std::chrono::steady_clock::now();
      rec.output = process_frame(depth, seg, rough, config, options.workers);
      log["ms_process"] = ms_since(t1);
    } catch (const std::exception& e) {
      result.skipped.emplace_back(t, e.what());
      log["status"] = "skipped";
      log["reason"] = e.what();
      if (options.log) *options.log << log.dump() << std::endl;
      continue;
    }

    rec.index = static_cast<int>(result.steps.size());
    rec.tuple = t;
    log["step"] = rec.index;

    if (options.goal_world) {
      const auto t2 = std::chrono::steady_clock::now();
      const CostGrid& grid = rec.output.hybrid;
      const RigidTransform world_to_base = rec.base_to_world.inverse();
      const Eigen::Vector3d gw(options.goal_world->x(), options.goal_world->y(), rec.base_to_world.translation().z());
      const Eigen::Vector3d gb = world_to_base.apply(gw);
      PlanRecord pr;
      PlanRequest req = base_req;
      std::tie(pr.goal_cell, pr.goal_clipped) = resolve_goal(grid, gb.head<2>(), req);
      req.goal = pr.goal_cell;
      for (std::size_t i = 0; i < grid.spec().cell_count(); ++i) {
        if (grid.known_mask()[i] && grid.costs()[i] >= req.lethal) ++pr.hazard_cells;
      }
      if (previous_path) {
        for (const auto& [pw, cost_then] : *previous_path) {
          const Eigen::Vector3d pb = world_to_base.apply(pw);
          const auto cell = grid.spec().cell_of(pb.x(), pb.y());
          if (!cell || *cell == req.start) continue;
          const auto now = traversal_cost(grid, *cell, req);
          if (!now) {
            pr.previous_path_blocked = true;
          } else if (*now > cost_then + 1e-9) {
            pr.previous_path_costlier = true;
          }
        }
      }
      try {
        pr.path = plan(grid, req);
        if (!pr.path) pr.error = "no path";
      } catch (const std::exception& e) {
        pr.error = e.what();
      }
      if (pr.path) {
        previous_path.emplace();
        for (const Cell& c : pr.path->cells) {
          const Eigen::Vector2d xy = grid.spec().center_of(c);
          previous_path->emplace_back(rec.base_to_world.apply({xy.x(), xy.y(), 0.0}),
                                      *traversal_cost(grid, c, req));
        }
      }
      log["ms_plan"] = ms_since(t2);
      rec.plan = std::move(pr);
    }

    if (!options.out_dir.empty()) {
      const fs::path& out = options.out_dir;
      io::write_grid(out / step_name(rec.index, "_appearance"), rec.output.appearance);
      io::write_grid(out / step_name(rec.index, "_geometry"), rec.output.geometry);
      io::write_grid(out / step_name(rec.index, "_hybrid"), rec.output.hybrid);
      json side{{"step", rec.index},
                {"tuple", t},
                {"stamps",
                 {{"depth", rec.stamps[0]}, {"seg", rec.stamps[1]}, {"rough", rec.stamps[2]}, {"pose", rec.stamps[3]}}},
                {"base_to_world", to_json(rec.base_to_world)},
                {"grid_spec", to_json(config.grid)},
                {"appearance_weights", {{"w_seg", config.appearance_weights.w_seg}, {"w_rough", config.appearance_weights.w_rough}}},
                {"fusion_weights", {{"w_appearance", config.fusion.w_a}, {"w_geometry", config.fusion.w_g}}},
                {"known_cells",
                 {{"appearance", rec.output.appearance.known_count()},
                  {"geometry", rec.output.geometry.known_count()},
                  {"hybrid", rec.output.hybrid.known_count()}}}};
      if (rec.plan) {
        const PlanRecord& pr = *rec.plan;
        json pj{{"goal_cell", cell_json(pr.goal_cell)},
                {"goal_clipped", pr.goal_clipped},
                {"hazard_cells", pr.hazard_cells},
                {"previous_path_blocked", pr.previous_path_blocked},
                {"previous_path_costlier", pr.previous_path_costlier}};
        if (pr.path) {
          pj["weight"] = pr.path->weight;
          pj["cost_sum"] = pr.path->cost_sum;
          pj["length_cells"] = pr.path->cells.size();
          std::string csv = "row,col,x,y,cost\n";
          char buf[128];
          for (const Cell& c : pr.path->cells) {
            const Eigen::Vector2d xy = config.grid.center_of(c);
            const double cost = rec.output.hybrid.known(c) ? rec.output.hybrid.cost(c)
                                                           : std::numeric_limits<double>::quiet_NaN();
            std::snprintf(buf, sizeof buf, "%d,%d,%.6f,%.6f,%.17g\n", c.row, c.col, xy.x(), xy.y(), cost);
            csv += buf;
          }
          io::write_text(out / step_name(rec.index, "_path.csv"), csv);
          io::write_pgm(out / step_name(rec.index, "_plan.pgm"), plan_overlay(rec.output.hybrid, pr.path->cells));
        } else {
          pj["error"] = pr.error;
        }
        side["plan"] = pj;
      }
      io::write_text(out / step_name(rec.index, ".json"), side.dump(2) + "\n");
    }

    log["status"] = "ok";
    log["ms_total"] = ms_since(t0);
    if (options.log) *options.log << log.dump() << std::endl;
    result.steps.push_back(std::move(rec));
  }

  if (!options.out_dir.empty()) {
    json steps = json::array();
    for (const StepRecord& r : result.steps) steps.push_back({{"step", r.index}, {"tuple", r.tuple}, {"stamp", r.stamps[0]}});
    json skipped = json::array();
    for (const auto& [t, why] : result.skipped) skipped.push_back({{"tuple", t}, {"reason", why}});
    io::write_text(options.out_dir / "summary.json",
                   json{{"tuples", result.tuples}, {"steps", steps}, {"skipped", skipped}}.dump(2) + "\n");
  }
  return result;
}

}  // namespace hytrav
