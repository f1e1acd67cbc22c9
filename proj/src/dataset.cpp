#include "see/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace see {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

Eigen::Index resolve_column(const std::vector<std::string>& header,
                            const std::string& key) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == key) return static_cast<Eigen::Index>(i);
  // fall back to a 0-based index
  int idx = -1;
  auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
  if (ec == std::errc{} && ptr == key.data() + key.size() && idx >= 0 &&
      idx < static_cast<int>(header.size()))
    return idx;
  throw ParseError("column not found: " + key);
}

double parse_number(const std::string& cell, std::size_t row,
                    const std::string& column) {
  if (cell.empty()) {
    std::ostringstream os;
    os << "missing value at row " << row << ", column '" << column << "'";
    throw ParseError(os.str());
  }
  try {
    std::size_t pos = 0;
    double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    std::ostringstream os;
    os << "non-numeric value '" << cell << "' at row " << row << ", column '"
       << column << "'";
    throw ParseError(os.str());
  }
}

}  // namespace

Sample parse_dataset(const std::string& path, const DatasetOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);

  std::string line;
  // header, skipping leading '#' comment lines
  do {
    if (!std::getline(in, line)) throw ParseError("empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
  } while (line.empty() || line.front() == '#');
  const std::vector<std::string> header = split_csv_line(line);

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      std::ostringstream os;
      os << "row " << rows.size() + 1 << " has " << cells.size()
         << " cells, expected " << header.size();
      throw ParseError(os.str());
    }
    rows.push_back(std::move(cells));
  }

  // filters in declared order; drop-row indices are 1-based within the
  // subset produced by the preceding filters
  for (const auto& f : options.filters) {
    if (f.kind == DatasetFilter::Kind::ColumnEquals) {
      const Eigen::Index col = resolve_column(header, f.column);
      std::vector<std::vector<std::string>> kept;
      for (auto& r : rows)
        if (r[col] == f.value) kept.push_back(std::move(r));
      rows = std::move(kept);
    } else {
      if (f.row < 1 || f.row > static_cast<Eigen::Index>(rows.size()))
        throw ParseError("drop-row index out of range");
      rows.erase(rows.begin() + (f.row - 1));
    }
  }

  const Eigen::Index response_col = resolve_column(header, options.response);
  std::vector<Eigen::Index> predictor_cols;
  if (!options.predictors.empty()) {
    for (const auto& key : options.predictors)
      predictor_cols.push_back(resolve_column(header, key));
  } else {
    // all columns except the response that parse as numeric in row 0
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (static_cast<Eigen::Index>(c) == response_col) continue;
      if (rows.empty()) continue;
      try {
        parse_number(rows[0][c], 1, header[c]);
        predictor_cols.push_back(static_cast<Eigen::Index>(c));
      } catch (const ParseError&) {
      }
    }
  }
  if (predictor_cols.empty()) throw ParseError("no predictor columns resolved");

  Sample sample;
  sample.x.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(predictor_cols.size()));
  sample.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    sample.y(static_cast<Eigen::Index>(r)) =
        parse_number(rows[r][response_col], r + 1, header[response_col]);
    for (std::size_t c = 0; c < predictor_cols.size(); ++c)
      sample.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_number(rows[r][predictor_cols[c]], r + 1,
                       header[predictor_cols[c]]);
  }
  return sample;
}

}  // namespace see
