#pragma once

#include "hytrav/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace hytrav::io {

namespace fs = std::filesystem;

/// Thrown for unreadable or malformed files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<T> data;  ///< row-major, top row first
};

// PFM (single channel, "Pf"). Rows are stored bottom-to-top on disk as the
// format requires; in memory they are top-to-bottom.
Raster<float> read_pfm(const fs::path& path);
void write_pfm(const fs::path& path, int width, int height, const std::vector<double>& values);

Raster<std::uint8_t> read_png8(const fs::path& path);
Raster<std::uint16_t> read_png16(const fs::path& path);
void write_png8(const fs::path& path, const Raster<std::uint8_t>& img);
void write_png16(const fs::path& path, const Raster<std::uint16_t>& img);

void write_pgm(const fs::path& path, const Raster<std::uint8_t>& img);
Raster<std::uint8_t> read_pgm(const fs::path& path);

/// Depth from .pfm (meters) or 16-bit .png (value * png_scale meters, 0 = no data).
DepthFrame read_depth(const fs::path& path, double png_scale = 0.001, double stamp = 0.0);
void write_depth_pfm(const fs::path& path, const DepthFrame& depth);

/// Class ids from an 8-bit PNG; confidence either from an 8-bit PNG
/// (value / 255) or a scalar broadcast to all pixels.
LabelFrame read_labels(const fs::path& class_png, const std::optional<fs::path>& confidence_png,
                       double scalar_confidence, int num_classes, double stamp = 0.0);
void write_labels(const fs::path& class_png, const std::optional<fs::path>& confidence_png,
                  const LabelFrame& labels);

/// Writes <stem>.pgm (round(cost*255), 0 where unknown), <stem>_mask.pgm
/// (255 known / 0 unknown) and <stem>.csv (one line per grid row, "nan" for
/// unknown cells).
void write_grid(const fs::path& stem, const CostGrid& grid);
void write_grid_csv(const fs::path& path, const CostGrid& grid);
/// Grid shape comes from the file; resolution and origin from `layout`.
CostGrid read_grid_csv(const fs::path& path, const GridSpec& layout);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace hytrav::io
