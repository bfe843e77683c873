#include "hytrav/io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

namespace hytrav::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw FormatError("cannot open " + path.string());
  return f;
}

void png_error_fn(png_structp png, png_const_charp) { std::longjmp(png_jmpbuf(png), 1); }
void png_warning_fn(png_structp, png_const_charp) {}

// Reads a single-channel PNG at the requested bit depth (8 or 16). Palette,
// low-bit-depth and RGB inputs are rejected or expanded by libpng.
template <class T>
Raster<T> read_png_gray(const fs::path& path) {
  constexpr int want_depth = sizeof(T) * 8;
  FilePtr file = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
  if (!png) throw FormatError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  Raster<T> out;
  std::vector<png_bytep> rows;
  volatile bool shape_error = false;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("malformed PNG: " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY || (depth != want_depth && !(want_depth == 8 && depth < 8))) {
    shape_error = true;
  } else {
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
    png_read_update_info(png, info);
    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.data.resize(static_cast<std::size_t>(out.width) * out.height);
    rows.resize(out.height);
    for (int r = 0; r < out.height; ++r) {
      rows[r] = reinterpret_cast<png_bytep>(out.data.data() + static_cast<std::size_t>(r) * out.width);
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (shape_error) {
    throw FormatError(path.string() + ": expected a " + std::to_string(want_depth) + "-bit grayscale PNG");
  }
  return out;
}

template <class T>
void write_png_gray(const fs::path& path, const Raster<T>& img) {
  constexpr int bit_depth = sizeof(T) * 8;
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height || img.width <= 0) {
    throw std::invalid_argument("write_png: bad raster shape");
  }
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
  if (!png) throw FormatError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(img.height);
  std::vector<T> buffer(img.data);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw FormatError("failed writing PNG: " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, img.width, img.height, bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
  for (int r = 0; r < img.height; ++r) {
    rows[r] = reinterpret_cast<png_bytep>(buffer.data() + static_cast<std::size_t>(r) * img.width);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Netpbm header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    return tok;
  }
  throw FormatError("truncated header");
}

int parse_positive(const std::string& s, const fs::path& path) {
  try {
    const int v = std::stoi(s);
    if (v > 0) return v;
  } catch (const std::exception&) {
  }
  throw FormatError("bad dimension in " + path.string());
}

}  // namespace

Raster<float> read_pfm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  const std::string magic = pnm_token(in);
  if (magic != "Pf") throw FormatError(path.string() + ": not a single-channel PFM");
  Raster<float> out;
  out.width = parse_positive(pnm_token(in), path);
  out.height = parse_positive(pnm_token(in), path);
  double scale = 0.0;
  try {
    scale = std::stod(pnm_token(in));
  } catch (const std::invalid_argument&) {
    throw FormatError(path.string() + ": bad scale");
  }
  if (scale == 0.0) throw FormatError(path.string() + ": zero scale");
  in.get();  // single whitespace before the payload
  const bool file_little = scale < 0.0;
  const std::size_t n = static_cast<std::size_t>(out.width) * out.height;
  std::vector<std::uint32_t> raw(n);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * 4));
  if (static_cast<std::size_t>(in.gcount()) != n * 4) throw FormatError(path.string() + ": truncated payload");
  const bool host_little = std::endian::native == std::endian::little;
  out.data.resize(n);
  for (int r = 0; r < out.height; ++r) {
    const std::size_t src_row = static_cast<std::size_t>(out.height - 1 - r) * out.width;
    for (int c = 0; c < out.width; ++c) {
      std::uint32_t bits = raw[src_row + c];
      if (file_little != host_little) bits = __builtin_bswap32(bits);
      out.data[static_cast<std::size_t>(r) * out.width + c] = std::bit_cast<float>(bits);
    }
  }
  return out;
}

void write_pfm(const fs::path& path, int width, int height, const std::vector<double>& values) {
  if (values.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("write_pfm: bad raster shape");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string());
  const bool little = std::endian::native == std::endian::little;
  out << "Pf\n" << width << ' ' << height << '\n' << (little ? "-1.0" : "1.0") << '\n';
  std::vector<float> row(width);
  for (int r = height - 1; r >= 0; --r) {
    for (int c = 0; c < width; ++c) {
      row[c] = static_cast<float>(values[static_cast<std::size_t>(r) * width + c]);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(width * 4));
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

Raster<std::uint8_t> read_png8(const fs::path& path) { return read_png_gray<std::uint8_t>(path); }
Raster<std::uint16_t> read_png16(const fs::path& path) { return read_png_gray<std::uint16_t>(path); }
void write_png8(const fs::path& path, const Raster<std::uint8_t>& img) { write_png_gray(path, img); }
void write_png16(const fs::path& path, const Raster<std::uint16_t>& img) { write_png_gray(path, img); }

void write_pgm(const fs::path& path, const Raster<std::uint8_t>& img) {
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height) {
    throw std::invalid_argument("write_pgm: bad raster shape");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string());
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

Raster<std::uint8_t> read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  if (pnm_token(in) != "P5") throw FormatError(path.string() + ": not a binary PGM");
  Raster<std::uint8_t> out;
  out.width = parse_positive(pnm_token(in), path);
  out.height = parse_positive(pnm_token(in), path);
  if (parse_positive(pnm_token(in), path) != 255) throw FormatError(path.string() + ": maxval must be 255");
  in.get();
  out.data.resize(static_cast<std::size_t>(out.width) * out.height);
  in.read(reinterpret_cast<char*>(out.data.data()), static_cast<std::streamsize>(out.data.size()));
  if (static_cast<std::size_t>(in.gcount()) != out.data.size()) throw FormatError(path.string() + ": truncated");
  return out;
}

DepthFrame read_depth(const fs::path& path, double png_scale, double stamp) {
  const std::string ext = path.extension().string();
  if (ext == ".pfm") {
    Raster<float> r = read_pfm(path);
    std::vector<double> d(r.data.begin(), r.data.end());
    return DepthFrame(r.width, r.height, std::move(d), stamp);
  }
  if (ext == ".png") {
    if (!(png_scale > 0.0)) throw std::invalid_argument("depth PNG scale must be > 0");
    Raster<std::uint16_t> r = read_png16(path);
    std::vector<double> d(r.data.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] = r.data[i] == 0 ? std::numeric_limits<double>::quiet_NaN() : r.data[i] * png_scale;
    }
    return DepthFrame(r.width, r.height, std::move(d), stamp);
  }
  throw FormatError("unsupported depth format: " + path.string());
}

void write_depth_pfm(const fs::path& path, const DepthFrame& depth) {
  write_pfm(path, depth.width(), depth.height(), depth.depth());
}

LabelFrame read_labels(const fs::path& class_png, const std::optional<fs::path>& confidence_png,
                       double scalar_confidence, int num_classes, double stamp) {
  Raster<std::uint8_t> ids = read_png8(class_png);
  if (!confidence_png) {
    return LabelFrame(ids.width, ids.height, std::move(ids.data), scalar_confidence, num_classes, stamp);
  }
  Raster<std::uint8_t> conf = read_png8(*confidence_png);
  if (conf.width != ids.width || conf.height != ids.height) {
    throw DimensionMismatch("confidence raster shape differs from class raster");
  }
  std::vector<double> c(conf.data.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = conf.data[i] / 255.0;
  return LabelFrame(ids.width, ids.height, std::move(ids.data), std::move(c), num_classes, stamp);
}

void write_labels(const fs::path& class_png, const std::optional<fs::path>& confidence_png,
                  const LabelFrame& labels) {
  write_png8(class_png, {labels.width(), labels.height(), labels.class_ids()});
  if (confidence_png) {
    Raster<std::uint8_t> conf{labels.width(), labels.height(), {}};
    conf.data.reserve(labels.size());
    for (double c : labels.confidence()) conf.data.push_back(static_cast<std::uint8_t>(std::lround(c * 255.0)));
    write_png8(*confidence_png, conf);
  }
}

void write_grid(const fs::path& stem, const CostGrid& grid) {
  const GridSpec& s = grid.spec();
  Raster<std::uint8_t> cost{s.cols, s.rows, std::vector<std::uint8_t>(s.cell_count(), 0)};
  Raster<std::uint8_t> mask{s.cols, s.rows, std::vector<std::uint8_t>(s.cell_count(), 0)};
  for (std::size_t i = 0; i < s.cell_count(); ++i) {
    if (!grid.known_mask()[i]) continue;
    cost.data[i] = static_cast<std::uint8_t>(std::lround(grid.costs()[i] * 255.0));
    mask.data[i] = 255;
  }
  write_pgm(fs::path(stem).concat(".pgm"), cost);
  write_pgm(fs::path(stem).concat("_mask.pgm"), mask);
  write_grid_csv(fs::path(stem).concat(".csv"), grid);
}

void write_grid_csv(const fs::path& path, const CostGrid& grid) {
  const GridSpec& s = grid.spec();
  std::string text;
  char buf[32];
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) {
      if (c) text += ',';
      const Cell cell{r, c};
      if (grid.known(cell)) {
        std::snprintf(buf, sizeof buf, "%.17g", grid.cost(cell));
        text += buf;
      } else {
        text += "nan";
      }
    }
    text += '\n';
  }
  write_text(path, text);
}

CostGrid read_grid_csv(const fs::path& path, const GridSpec& layout) {
  std::istringstream in(read_text(path));
  std::vector<double> cost;
  std::vector<std::uint8_t> known;
  int rows = 0;
  int cols = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::string field;
    int n = 0;
    while (std::getline(ls, field, ',')) {
      while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
      double v = std::numeric_limits<double>::quiet_NaN();
      if (field != "nan" && !field.empty()) {
        try {
          v = std::stod(field);
        } catch (const std::exception&) {
          throw FormatError(path.string() + ": bad number '" + field + "'");
        }
      }
      const bool k = std::isfinite(v);
      cost.push_back(k ? v : 0.0);
      known.push_back(k ? 1 : 0);
      ++n;
    }
    if (cols < 0) cols = n;
    if (n != cols) throw FormatError(path.string() + ": ragged rows");
    ++rows;
  }
  if (rows == 0 || cols <= 0) throw FormatError(path.string() + ": empty grid");
  GridSpec spec = layout;
  spec.rows = rows;
  spec.cols = cols;
  return CostGrid(spec, std::move(cost), std::move(known));
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string());
  out << text;
  if (!out) throw FormatError("failed writing " + path.string());
}

}  // namespace hytrav::io
