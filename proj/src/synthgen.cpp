#include "hytrav/synthgen.hpp"

#include "hytrav/config.hpp"
#include "hytrav/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hytrav::synth {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Uniform double in [0,1) from raw engine bits; std distributions are not
// reproducible across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double wave_value(const Wave& w, double x, double y) {
  const double k = 2.0 * kPi / w.wavelength;
  return w.amplitude * std::sin(k * (std::cos(w.direction) * x + std::sin(w.direction) * y) + w.phase);
}

bool inside_polygon(const std::vector<Eigen::Vector2d>& poly, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y() > y) != (b.y() > y) && x < (b.x() - a.x()) * (y - a.y()) / (b.y() - a.y()) + a.x()) in = !in;
  }
  return in;
}

TerrainClass class_from_name(const std::string& s) {
  if (s == "soil") return TerrainClass::Soil;
  if (s == "bedrock") return TerrainClass::Bedrock;
  if (s == "sand") return TerrainClass::Sand;
  if (s == "big_rock") return TerrainClass::BigRock;
  throw std::invalid_argument("unknown terrain class '" + s + "'");
}

Eigen::Vector2d vec2(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

void SceneSpec::validate() const {
  if (!(terrain.wavelength > 0.0) || terrain.octaves < 0) throw std::invalid_argument("scene: bad terrain spectrum");
  for (const Wave& w : terrain.waves) {
    if (!(w.wavelength > 0.0)) throw std::invalid_argument("scene: wavelengths must be > 0");
  }
  for (const Rock& r : rocks) {
    if (!(r.radius > 0.0)) throw std::invalid_argument("scene: rock radii must be > 0");
  }
  for (const Region& r : regions) {
    if (r.polygon.size() < 3) throw std::invalid_argument("scene: region polygon needs >= 3 vertices");
  }
  if (!(max_range > 0.0) || !(roughness_cutoff > 0.0)) throw std::invalid_argument("scene: bad range or cutoff");
  if (!(label_confidence >= 0.0 && label_confidence <= 1.0)) throw std::invalid_argument("scene: confidence outside [0,1]");
}

SceneSpec scene_from_json(const nlohmann::json& j) {
  SceneSpec s;
  s.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("terrain")) {
    const auto& t = j.at("terrain");
    s.terrain.base_height = t.value("base_height", 0.0);
    if (t.contains("gradient")) {
      const Eigen::Vector2d g = vec2(t.at("gradient"));
      s.terrain.gradient_x = g.x();
      s.terrain.gradient_y = g.y();
    }
    s.terrain.amplitude = t.value("amplitude", 0.0);
    s.terrain.wavelength = t.value("wavelength", 4.0);
    s.terrain.octaves = t.value("octaves", 0);
    for (const auto& w : t.value("waves", nlohmann::json::array())) {
      s.terrain.waves.push_back({w.at("amplitude").get<double>(), w.at("wavelength").get<double>(),
                                 deg2rad(w.value("direction_deg", 0.0)), deg2rad(w.value("phase_deg", 0.0))});
    }
  }
  for (const auto& r : j.value("rocks", nlohmann::json::array())) {
    s.rocks.push_back({vec2(r.at("center")), r.at("radius").get<double>(), r.value("z_offset", 0.0)});
  }
  for (const auto& r : j.value("regions", nlohmann::json::array())) {
    Region reg;
    reg.cls = class_from_name(r.value("class", std::string("sand")));
    for (const auto& p : r.at("polygon")) reg.polygon.push_back(vec2(p));
    s.regions.push_back(std::move(reg));
  }
  for (const auto& p : j.value("trajectory", nlohmann::json::array())) {
    TrajectoryPose tp;
    tp.stamp = p.value("stamp", 0.0);
    if (p.contains("transform")) {
      tp.base_to_world = transform_from_json(p.at("transform"));
    } else {
      tp.base_to_world = RigidTransform::from_rpy(0.0, 0.0, deg2rad(p.value("yaw_deg", 0.0)),
                                                  {p.value("x", 0.0), p.value("y", 0.0), p.value("z", 0.0)});
    }
    s.trajectory.push_back(tp);
  }
  s.roughness_cutoff = j.value("roughness_cutoff_m", s.roughness_cutoff);
  s.max_range = j.value("max_range_m", s.max_range);
  s.label_confidence = j.value("label_confidence", s.label_confidence);
  s.validate();
  return s;
}

Scene::Scene(const SceneSpec& spec) : spec_(spec) {
  spec_.validate();
  std::mt19937_64 rng(spec_.seed);
  for (int o = 0; o < spec_.terrain.octaves; ++o) {
    const double f = std::ldexp(1.0, -o);
    const double dir = 2.0 * kPi * unit(rng);
    const double phase = 2.0 * kPi * unit(rng);
    waves_.push_back({spec_.terrain.amplitude * f, spec_.terrain.wavelength * f, dir, phase});
  }
  waves_.insert(waves_.end(), spec_.terrain.waves.begin(), spec_.terrain.waves.end());
  slope_bound_ = std::hypot(spec_.terrain.gradient_x, spec_.terrain.gradient_y);
  for (const Wave& w : waves_) slope_bound_ += std::abs(w.amplitude) * 2.0 * kPi / w.wavelength;
  for (const Rock& r : spec_.rocks) rock_z_.push_back(height(r.center.x(), r.center.y()) + r.z_offset);
}

double Scene::height(double x, double y) const {
  double h = spec_.terrain.base_height + spec_.terrain.gradient_x * x + spec_.terrain.gradient_y * y;
  for (const Wave& w : waves_) h += wave_value(w, x, y);
  return h;
}

Eigen::Vector3d Scene::terrain_normal(double x, double y) const {
  double gx = spec_.terrain.gradient_x, gy = spec_.terrain.gradient_y;
  for (const Wave& w : waves_) {
    const double k = 2.0 * kPi / w.wavelength;
    const double c = w.amplitude * k * std::cos(k * (std::cos(w.direction) * x + std::sin(w.direction) * y) + w.phase);
    gx += c * std::cos(w.direction);
    gy += c * std::sin(w.direction);
  }
  return Eigen::Vector3d(-gx, -gy, 1.0).normalized();
}

double Scene::fine_height(double x, double y) const {
  double h = 0.0;
  for (const Wave& w : waves_) {
    if (w.wavelength < spec_.roughness_cutoff) h += wave_value(w, x, y);
  }
  return h;
}

TerrainClass Scene::ground_class(double x, double y) const {
  TerrainClass c = TerrainClass::Soil;
  for (const Region& r : spec_.regions) {
    if (inside_polygon(r.polygon, x, y)) c = r.cls;
  }
  return c;
}

Eigen::Vector3d Scene::rock_center(std::size_t i) const {
  return {spec_.rocks[i].center.x(), spec_.rocks[i].center.y(), rock_z_[i]};
}

RenderedFrame render_frame(const Scene& scene, const RigidTransform& camera_to_world, const CameraIntrinsics& k,
                           double stamp, const RoughnessBins& bins) {
  k.validate();
  bins.validate();
  const Eigen::Vector3d o = camera_to_world.translation();
  if (o.z() <= scene.height(o.x(), o.y())) throw std::invalid_argument("render_frame: camera below terrain");
  for (std::size_t i = 0; i < scene.spec().rocks.size(); ++i) {
    if ((o - scene.rock_center(i)).norm() <= scene.spec().rocks[i].radius) {
      throw std::invalid_argument("render_frame: camera inside a rock");
    }
  }

  const std::size_t n = static_cast<std::size_t>(k.width) * k.height;
  std::vector<double> depth(n, kNaN);
  std::vector<std::uint8_t> cls(n, LabelFrame::kVoidLabel);
  std::vector<std::uint8_t> lvl(n, LabelFrame::kVoidLabel);
  RenderedFrame out;
  out.true_residual.assign(n, kNaN);
  out.hits.assign(n, Eigen::Vector3d::Constant(kNaN));

  const Eigen::Matrix3d& rot = camera_to_world.rotation();
  const double g = scene.slope_bound();
  const double min_step = 1e-4;

  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      // Ray parameter t equals depth along the optical axis.
      const Eigen::Vector3d dir = rot * Eigen::Vector3d((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      const double t_max = scene.spec().max_range / dir.norm();
      const double lip = std::abs(dir.z()) + g * std::hypot(dir.x(), dir.y());
      auto f = [&](double t) {
        const Eigen::Vector3d p = o + t * dir;
        return p.z() - scene.height(p.x(), p.y());
      };

      double best_t = std::numeric_limits<double>::infinity();
      int best_rock = -1;

      // Terrain: conservative march, then bisection on the bracketing step.
      double t = 0.0;
      double ft = f(0.0);
      while (t < t_max) {
        const double step = std::max(ft / lip, min_step);
        const double tn = std::min(t + step, t_max);
        const double fn = f(tn);
        if (fn <= 0.0) {
          double lo = t, hi = tn;
          for (int it = 0; it < 100 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) > 0.0 ? lo : hi) = mid;
          }
          best_t = 0.5 * (lo + hi);
          break;
        }
        if (tn >= t_max) break;
        t = tn;
        ft = fn;
      }

      for (std::size_t r = 0; r < scene.spec().rocks.size(); ++r) {
        const Eigen::Vector3d oc = o - scene.rock_center(r);
        const double a = dir.squaredNorm();
        const double b = oc.dot(dir);
        const double c = oc.squaredNorm() - scene.spec().rocks[r].radius * scene.spec().rocks[r].radius;
        const double disc = b * b - a * c;
        if (disc < 0.0) continue;
        const double tr = (-b - std::sqrt(disc)) / a;
        if (tr > 0.0 && tr < best_t && tr <= t_max) {
          best_t = tr;
          best_rock = static_cast<int>(r);
        }
      }
      if (!std::isfinite(best_t)) continue;

      const std::size_t i = static_cast<std::size_t>(v) * k.width + u;
      const Eigen::Vector3d hit = o + best_t * dir;
      depth[i] = best_t;
      out.hits[i] = hit;
      double residual;
      if (best_rock >= 0) {
        cls[i] = static_cast<std::uint8_t>(TerrainClass::BigRock);
        residual = std::max(0.0, hit.z() - scene.height(hit.x(), hit.y()));
      } else {
        cls[i] = static_cast<std::uint8_t>(scene.ground_class(hit.x(), hit.y()));
        residual = std::abs(scene.fine_height(hit.x(), hit.y()));
      }
      residual = std::max(residual, bins.floor);
      out.true_residual[i] = residual;
      lvl[i] = static_cast<std::uint8_t>(bins.classify(residual));
    }
  }

  out.depth = DepthFrame(k.width, k.height, std::move(depth), stamp);
  const double conf = scene.spec().label_confidence;
  out.classes = LabelFrame(k.width, k.height, std::move(cls), conf, kNumTerrainClasses, stamp);
  out.roughness = LabelFrame(k.width, k.height, std::move(lvl), conf, kNumRoughnessClasses, stamp);
  return out;
}

}  // namespace hytrav::synth
