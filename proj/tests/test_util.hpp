#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

namespace testutil {

namespace fs = std::filesystem;

// Scratch directory removed on scope exit.
struct TempDir {
  fs::path path;

  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("hytrav_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Relative paths of all regular files below root, sorted.
inline std::vector<fs::path> list_files(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Empty string when identical, otherwise a description of the first difference.
inline std::string compare_trees(const fs::path& a, const fs::path& b) {
  const auto fa = list_files(a), fb = list_files(b);
  if (fa != fb) return "file lists differ";
  for (const auto& f : fa) {
    if (slurp(a / f) != slurp(b / f)) return "content differs: " + f.string();
  }
  return {};
}

}  // namespace testutil
