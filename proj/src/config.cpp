#include "hytrav/config.hpp"

#include "hytrav/io.hpp"

#include <algorithm>

namespace hytrav {

using nlohmann::json;

namespace {

Eigen::Vector3d vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

ReductionTable reductions_from_json(const json& j, const std::vector<std::string>& names, ReductionTable base) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (j.contains(names[i])) base.reduction[i] = j.at(names[i]).get<double>();
  }
  for (const auto& [key, _] : j.items()) {
    if (std::find(names.begin(), names.end(), key) == names.end()) {
      throw std::invalid_argument("unknown class name '" + key + "' in reduction table");
    }
  }
  return base;
}

json reductions_to_json(const ReductionTable& t, const std::vector<std::string>& names) {
  json j = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = t.reduction[i];
  return j;
}

const std::vector<std::string> kTerrainNames{"soil", "bedrock", "sand", "big_rock"};
const std::vector<std::string> kRoughNames{"LV0", "LV1", "LV2", "LV3"};

}  // namespace

RigidTransform default_camera_mount() {
  const RigidTransform body = RigidTransform::from_rpy(0.0, deg2rad(30.0), 0.0, {0.0, 0.0, 1.5});
  return RigidTransform(body.rotation() * optical_to_body(), body.translation());
}

RigidTransform transform_from_json(const json& j) {
  const Eigen::Vector3d t = j.contains("translation") ? vec3(j.at("translation")) : Eigen::Vector3d::Zero();
  if (j.contains("rotation")) {
    const json& r = j.at("rotation");
    if (!r.is_array() || r.size() != 3) throw std::invalid_argument("rotation must be a 3x3 array");
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i) m.row(i) = vec3(r[i]).transpose();
    return RigidTransform(m, t);
  }
  const Eigen::Vector3d rpy = j.contains("rpy_deg") ? vec3(j.at("rpy_deg")) : Eigen::Vector3d::Zero();
  const RigidTransform body = RigidTransform::from_rpy(deg2rad(rpy[0]), deg2rad(rpy[1]), deg2rad(rpy[2]), t);
  if (j.value("optical", false)) return RigidTransform(body.rotation() * optical_to_body(), t);
  return body;
}

json to_json(const RigidTransform& t) {
  json rot = json::array();
  for (int i = 0; i < 3; ++i) rot.push_back({t.rotation()(i, 0), t.rotation()(i, 1), t.rotation()(i, 2)});
  return {{"rotation", rot}, {"translation", {t.translation().x(), t.translation().y(), t.translation().z()}}};
}

json to_json(const GridSpec& g) {
  return {{"rows", g.rows}, {"cols", g.cols}, {"resolution", g.resolution},
          {"origin_row", g.origin_row}, {"origin_col", g.origin_col}};
}

void Config::validate() const {
  intrinsics.validate();
  if (!(depth_png_scale > 0.0)) throw std::invalid_argument("depth_png_scale must be > 0");
  slope.validate();
  if (normals.k_neighbors < 3) throw std::invalid_argument("normals.k_neighbors must be >= 3");
  grid.validate();
  terrain_reductions.validate();
  roughness_reductions.validate();
  if (terrain_reductions.size() != kNumTerrainClasses || roughness_reductions.size() != kNumRoughnessClasses) {
    throw std::invalid_argument("reduction tables must have four entries");
  }
  appearance_weights.validate();
  roughness_bins.validate();
  fusion.validate();
  patches.validate();
  if (!(planner.lethal > 0.0 && planner.lethal <= 1.0) || !(planner.epsilon > 0.0)) {
    throw std::invalid_argument("planner: lethal in (0,1] and epsilon > 0 required");
  }
  sync.validate();
}

Config config_from_json(const json& j) {
  Config c;
  if (j.contains("intrinsics")) {
    const json& k = j.at("intrinsics");
    c.intrinsics = {k.at("fx").get<double>(), k.at("fy").get<double>(), k.at("cx").get<double>(),
                    k.at("cy").get<double>(), k.at("width").get<int>(), k.at("height").get<int>()};
  }
  if (j.contains("camera_to_base")) c.camera_to_base = transform_from_json(j.at("camera_to_base"));
  c.depth_png_scale = j.value("depth_png_scale", c.depth_png_scale);
  if (j.contains("slope")) {
    const json& s = j.at("slope");
    c.slope.t_soft = deg2rad(s.value("t_soft_deg", rad2deg(c.slope.t_soft)));
    c.slope.t = deg2rad(s.value("t_deg", rad2deg(c.slope.t)));
    c.slope.signed_mode = s.value("signed_mode", c.slope.signed_mode);
  }
  if (j.contains("normals")) {
    const json& n = j.at("normals");
    c.normals.k_neighbors = n.value("k_neighbors", c.normals.k_neighbors);
    const std::string mode = n.value("neighborhood", std::string("knn"));
    if (mode == "knn") {
      c.normals.mode = Neighborhood::Knn;
    } else if (mode == "pixel_grid") {
      c.normals.mode = Neighborhood::PixelGrid;
    } else {
      throw std::invalid_argument("normals.neighborhood must be 'knn' or 'pixel_grid'");
    }
    c.normals.workers = n.value("workers", c.normals.workers);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    c.grid.rows = g.value("rows", c.grid.rows);
    c.grid.cols = g.value("cols", c.grid.cols);
    c.grid.resolution = g.value("resolution", c.grid.resolution);
    c.grid.origin_row = g.value("origin_row", c.grid.origin_row);
    c.grid.origin_col = g.value("origin_col", c.grid.cols / 2);
  }
  if (j.contains("appearance")) {
    const json& a = j.at("appearance");
    if (a.contains("terrain_reductions")) {
      c.terrain_reductions = reductions_from_json(a.at("terrain_reductions"), kTerrainNames, c.terrain_reductions);
    }
    if (a.contains("roughness_reductions")) {
      c.roughness_reductions = reductions_from_json(a.at("roughness_reductions"), kRoughNames, c.roughness_reductions);
    }
    c.appearance_weights.w_seg = a.value("w_seg", c.appearance_weights.w_seg);
    c.appearance_weights.w_rough = a.value("w_rough", c.appearance_weights.w_rough);
  }
  if (j.contains("roughness_bins")) {
    const json& b = j.at("roughness_bins");
    c.roughness_bins.floor = b.value("floor_m", c.roughness_bins.floor);
    if (b.contains("edges_m")) {
      const json& e = b.at("edges_m");
      if (!e.is_array() || e.size() != 3) throw std::invalid_argument("roughness_bins.edges_m needs 3 values");
      for (int i = 0; i < 3; ++i) c.roughness_bins.edges[i] = e[i].get<double>();
    }
  }
  if (j.contains("fusion")) {
    const json& f = j.at("fusion");
    c.fusion.w_a = f.value("w_appearance", c.fusion.w_a);
    c.fusion.w_g = f.value("w_geometry", c.fusion.w_g);
  }
  if (j.contains("patches")) {
    const json& p = j.at("patches");
    c.patches.s_ref = p.value("s_ref", c.patches.s_ref);
    c.patches.d_ref = p.value("d_ref_m", c.patches.d_ref);
    c.patches.s_min = p.value("s_min", c.patches.s_min);
    c.patches.s_max = p.value("s_max", c.patches.s_max);
    c.patches.min_valid_pixels = p.value("min_valid_pixels", c.patches.min_valid_pixels);
  }
  if (j.contains("planner")) {
    const json& p = j.at("planner");
    c.planner.lethal = p.value("lethal", c.planner.lethal);
    c.planner.epsilon = p.value("epsilon", c.planner.epsilon);
    const std::string u = p.value("unknown", std::string("max_cost"));
    if (u == "lethal") {
      c.planner.unknown = UnknownPolicy::Lethal;
    } else if (u == "max_cost") {
      c.planner.unknown = UnknownPolicy::MaxCost;
    } else {
      throw std::invalid_argument("planner.unknown must be 'lethal' or 'max_cost'");
    }
  }
  if (j.contains("sync")) {
    const json& s = j.at("sync");
    c.sync.tolerance = s.value("tolerance_s", c.sync.tolerance);
    c.sync.queue_depth = s.value("queue_depth", c.sync.queue_depth);
  }
  c.validate();
  return c;
}

json to_json(const Config& c) {
  const auto& k = c.intrinsics;
  return {
      {"intrinsics", {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}}},
      {"camera_to_base", to_json(c.camera_to_base)},
      {"depth_png_scale", c.depth_png_scale},
      {"slope", {{"t_soft_deg", rad2deg(c.slope.t_soft)}, {"t_deg", rad2deg(c.slope.t)}, {"signed_mode", c.slope.signed_mode}}},
      {"normals",
       {{"k_neighbors", c.normals.k_neighbors},
        {"neighborhood", c.normals.mode == Neighborhood::Knn ? "knn" : "pixel_grid"}}},
      {"grid", to_json(c.grid)},
      {"appearance",
       {{"terrain_reductions", reductions_to_json(c.terrain_reductions, kTerrainNames)},
        {"roughness_reductions", reductions_to_json(c.roughness_reductions, kRoughNames)},
        {"w_seg", c.appearance_weights.w_seg},
        {"w_rough", c.appearance_weights.w_rough}}},
      {"roughness_bins",
       {{"floor_m", c.roughness_bins.floor},
        {"edges_m", {c.roughness_bins.edges[0], c.roughness_bins.edges[1], c.roughness_bins.edges[2]}}}},
      {"fusion", {{"w_appearance", c.fusion.w_a}, {"w_geometry", c.fusion.w_g}}},
      {"patches",
       {{"s_ref", c.patches.s_ref}, {"d_ref_m", c.patches.d_ref}, {"s_min", c.patches.s_min},
        {"s_max", c.patches.s_max}, {"min_valid_pixels", c.patches.min_valid_pixels}}},
      {"planner",
       {{"lethal", c.planner.lethal}, {"epsilon", c.planner.epsilon},
        {"unknown", c.planner.unknown == UnknownPolicy::Lethal ? "lethal" : "max_cost"}}},
      {"sync", {{"tolerance_s", c.sync.tolerance}, {"queue_depth", c.sync.queue_depth}}},
  };
}

Config load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const json::parse_error& e) {
    throw io::FormatError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace hytrav
