// Independent reference implementations used as test oracles. Nothing here
// calls into the library code it checks.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

inline double rad(double deg) { return deg * kPi / 180.0; }

// The printed piecewise slope cost, branch by branch.
inline double slope_cost(double th, double ts, double t) {
  double v;
  if (th < ts) {
    v = th * (2.0 / kPi);
  } else if (th <= t) {
    v = th * (1.0 / t);
  } else if (th < 2.0 * kPi - t) {
    v = 1.0;
  } else if (th <= 2.0 * kPi - ts) {
    v = 1.0 - (th - (2.0 * kPi - t)) * (1.0 / t);
  } else {
    v = 1.0 - (th - 1.5 * kPi) * (2.0 / kPi);
  }
  if (v < 0.0) v = 0.0;
  if (v > 1.0) v = 1.0;
  return v;
}

// Point-to-plane distance written out by hand.
inline double point_plane(double x, double y, double z, double a, double b, double c, double d) {
  const double num = -d - a * x - b * y - c * z;
  return (num < 0 ? -num : num) / std::sqrt(a * a + b * b + c * c);
}

// Appearance cost of one pixel.
inline double pixel_cost(double reduction, double confidence) { return 1.0 - reduction * confidence; }

struct DenseGrid {
  int rows = 0;
  int cols = 0;
  double res = 0.1;
  std::vector<double> cost;        // NaN = unknown
};

// Exhaustive single-source shortest path by Bellman-Ford relaxation to a
// fixed point over the 8-connected cell graph. Unknown cells cost 1 when
// `unknown_traversable`, otherwise they are excluded; known cells with
// cost >= lethal are excluded.
inline std::optional<double> shortest_weight(const DenseGrid& g, int sr, int sc, int gr, int gc, double lethal,
                                             double eps, bool unknown_traversable) {
  const int n = g.rows * g.cols;
  auto enter = [&](int r, int c) -> std::optional<double> {
    const double v = g.cost[r * g.cols + c];
    if (std::isnan(v)) {
      if (unknown_traversable) return 1.0;
      return std::nullopt;
    }
    if (v >= lethal) return std::nullopt;
    return v;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  dist[sr * g.cols + sc] = 0.0;
  bool changed = true;
  for (int iter = 0; changed && iter < n + 1; ++iter) {
    changed = false;
    for (int r = 0; r < g.rows; ++r) {
      for (int c = 0; c < g.cols; ++c) {
        const double du = dist[r * g.cols + c];
        if (du == inf) continue;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const int nr = r + dr, nc = c + dc;
            if (nr < 0 || nc < 0 || nr >= g.rows || nc >= g.cols) continue;
            const auto cb = enter(nr, nc);
            if (!cb) continue;
            const double len = (dr != 0 && dc != 0) ? g.res * std::sqrt(2.0) : g.res;
            const double cand = du + len * (eps + *cb);
            if (cand < dist[nr * g.cols + nc]) {
              dist[nr * g.cols + nc] = cand;
              changed = true;
            }
          }
        }
      }
    }
  }
  const double d = dist[gr * g.cols + gc];
  if (d == inf) return std::nullopt;
  return d;
}

// Nearest-center cell for a metric point: rows along +x, columns along +y.
inline bool cell_of(double x, double y, int rows, int cols, double res, int orow, int ocol, int& r, int& c) {
  r = static_cast<int>(std::lround(x / res)) + orow;
  c = static_cast<int>(std::lround(y / res)) + ocol;
  return r >= 0 && c >= 0 && r < rows && c < cols;
}

}  // namespace oracle
