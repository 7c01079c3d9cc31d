#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "scriptid/features.hpp"

namespace scriptid {

CsvFormatError::CsvFormatError(std::size_t line, const std::string& what)
    : FormatError(fmt::format("feature CSV line {}: {}", line, what)), line_(line) {}

namespace {

constexpr std::size_t kMetaColumns = 5;

std::string header_line() {
  std::string h = "label,page_id,level,row,col";
  for (const auto& name : feature_column_names()) h += "," + name;
  return h;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, std::size_t line, std::string_view column) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw CsvFormatError(line, fmt::format("column '{}': cannot parse '{}'", column, s));
  }
  return value;
}

void check_text_field(std::string_view s, std::string_view what) {
  if (s.find_first_of(",\n\r\"") != std::string_view::npos) {
    throw DataError(fmt::format("{} '{}' contains a character not allowed in the feature CSV", what, s));
  }
}

}  // namespace

void write_feature_csv(std::ostream& out, const Dataset& ds) {
  out << header_line() << '\n';
  for (const auto& s : ds.samples) {
    check_text_field(s.label, "label");
    check_text_field(s.page_id, "page id");
    std::string row = fmt::format("{},{},{},{},{}", s.label, s.page_id, s.level, s.row, s.col);
    for (double v : s.features.values) fmt::format_to(std::back_inserter(row), ",{:.17g}", v);
    out << row << '\n';
  }
}

void write_feature_csv(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  write_feature_csv(out, ds);
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

Dataset read_feature_csv(std::istream& in) {
  const auto& names = feature_column_names();
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw CsvFormatError(1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header_line()) throw CsvFormatError(1, "header does not match the 60-feature column contract");

  Dataset ds;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != kMetaColumns + kFeatureCount) {
      throw CsvFormatError(line_no, fmt::format("expected {} columns, found {}", kMetaColumns + kFeatureCount,
                                                fields.size()));
    }
    LabeledSample s;
    s.label = std::string(fields[0]);
    s.page_id = std::string(fields[1]);
    if (s.label.empty()) throw CsvFormatError(line_no, "empty label");
    s.level = parse_number<int>(fields[2], line_no, "level");
    s.row = parse_number<std::size_t>(fields[3], line_no, "row");
    s.col = parse_number<std::size_t>(fields[4], line_no, "col");
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      s.features.values[f] = parse_number<double>(fields[kMetaColumns + f], line_no, names[f]);
    }
    if (std::find(ds.classes.begin(), ds.classes.end(), s.label) == ds.classes.end()) ds.classes.push_back(s.label);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

Dataset read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  return read_feature_csv(in);
}

}  // namespace scriptid
