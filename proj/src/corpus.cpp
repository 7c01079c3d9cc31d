#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "scriptid/features.hpp"

namespace scriptid {
namespace {

bool is_page_file(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".bmp";
}

}  // namespace

std::vector<PageSource> scan_dataset_dir(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError(fmt::format("dataset directory '{}' does not exist", root.string()));

  std::vector<fs::path> label_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) label_dirs.push_back(entry.path());
  }
  std::sort(label_dirs.begin(), label_dirs.end());

  std::vector<PageSource> pages;
  for (const auto& dir : label_dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && is_page_file(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    const std::string label = dir.filename().string();
    for (const auto& f : files) pages.push_back(PageSource{f.stem().string(), label, f});
  }
  return pages;
}

}  // namespace scriptid
