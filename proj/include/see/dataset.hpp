#pragma once

#include <string>
#include <vector>

#include "see/simgen.hpp"

namespace see {

struct DatasetFilter {
  enum class Kind { ColumnEquals, DropRow };
  Kind kind;
  std::string column;  // ColumnEquals
  std::string value;
  Eigen::Index row = 0;  // DropRow, 1-based within the current subset

  static DatasetFilter equals(std::string column, std::string value) {
    return {Kind::ColumnEquals, std::move(column), std::move(value), 0};
  }
  static DatasetFilter drop_row(Eigen::Index row_1based) {
    return {Kind::DropRow, {}, {}, row_1based};
  }
};

struct DatasetOptions {
  std::string response;                 // column name or 0-based index
  std::vector<std::string> predictors;  // empty = all remaining numeric columns
  std::vector<DatasetFilter> filters;   // applied in declared order
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CSV with a header row, UTF-8, '.' decimal point. Throws ParseError
// naming the offending cell for missing or non-numeric values.
Sample parse_dataset(const std::string& path, const DatasetOptions& options);

}  // namespace see
