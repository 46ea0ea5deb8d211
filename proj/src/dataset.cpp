#include "dualmix/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dualmix/errors.hpp"

namespace dualmix {

std::vector<double> Dataset::column(int axis) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = values[i * static_cast<std::size_t>(dim) + axis];
  }
  return out;
}

namespace {

double parse_field(const std::string& field, const std::string& path, std::size_t line) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end || begin == end) {
    throw std::runtime_error(path + ":" + std::to_string(line) +
                             ": cannot parse number from '" + field + "'");
  }
  return v;
}

}  // namespace

Dataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file: " + path);

  Dataset data;
  data.dim = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Skip fully blank lines (trailing newline at EOF).
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string field;
    int cols = 0;
    while (std::getline(ss, field, ',')) {
      data.values.push_back(parse_field(field, path, lineno));
      ++cols;
    }
    if (data.dim == 0) {
      if (cols != 1 && cols != 2) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": expected 1 or 2 columns, found " +
                                 std::to_string(cols));
      }
      data.dim = cols;
    } else if (cols != data.dim) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(data.dim) + " columns, found " +
                               std::to_string(cols));
    }
  }
  if (data.values.empty()) {
    throw std::runtime_error(path + ": data file contains no samples");
  }
  return data;
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  char buf[64];
  const std::size_t n = data.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = data.row(i);
    for (int j = 0; j < data.dim; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace dualmix
