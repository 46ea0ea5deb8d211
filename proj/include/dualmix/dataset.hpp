#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dualmix {

// A flat sample of n points in 1 or 2 dimensions, stored row-major.
struct Dataset {
  int dim = 1;
  std::vector<double> values;

  std::size_t size() const { return values.size() / static_cast<std::size_t>(dim); }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
  // Contiguous view of coordinate `axis` is only possible for dim == 1;
  // bivariate columns are materialized on demand.
  std::vector<double> column(int axis) const;
};

// Reads a headerless CSV of numbers, one sample point per line, 1 or 2
// comma-separated columns. Throws std::runtime_error naming the offending
// line on malformed input, empty files, or ragged rows.
Dataset read_csv(const std::string& path);

// Writes the dataset in the same format, full round-trip precision.
void write_csv(const Dataset& data, const std::string& path);

}  // namespace dualmix
