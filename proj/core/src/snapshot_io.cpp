// SPDX-License-Identifier: Apache-2.0
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "gpanm/array_model.hpp"
#include "gpanm/errors.hpp"

namespace gpanm {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& cell, int row) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::IoError, "bad number '" + cell + "' in snapshot CSV row " + std::to_string(row));
  }
  // Allow a trailing carriage return from CRLF files.
  while (used < cell.size() && (cell[used] == '\r' || cell[used] == ' ')) ++used;
  require(used == cell.size(), ErrorCode::IoError,
          "trailing characters in snapshot CSV cell '" + cell + "'");
  return v;
}

}  // namespace

void write_snapshot_csv(std::ostream& os, const SnapshotMatrix& y) {
  const CMatrix& d = y.data();
  for (Eigen::Index p = 0; p < d.cols(); ++p) {
    if (p > 0) os << ',';
    os << "re_" << p << ",im_" << p;
  }
  os << '\n';
  os << std::setprecision(17);
  for (Eigen::Index n = 0; n < d.rows(); ++n) {
    for (Eigen::Index p = 0; p < d.cols(); ++p) {
      if (p > 0) os << ',';
      os << d(n, p).real() << ',' << d(n, p).imag();
    }
    os << '\n';
  }
}

SnapshotMatrix read_snapshot_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), ErrorCode::IoError, "snapshot CSV is empty");
  const auto header = split_csv_line(line);
  require(!header.empty() && header.size() % 2 == 0, ErrorCode::IoError,
          "snapshot CSV header must have an even number of columns");
  const int p = static_cast<int>(header.size() / 2);
  std::vector<std::vector<cdouble>> rows;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    require(static_cast<int>(cells.size()) == 2 * p, ErrorCode::IoError,
            "snapshot CSV row " + std::to_string(row) + " has the wrong column count");
    std::vector<cdouble> r(p);
    for (int k = 0; k < p; ++k) r[k] = {parse_double(cells[2 * k], row), parse_double(cells[2 * k + 1], row)};
    rows.push_back(std::move(r));
  }
  require(!rows.empty(), ErrorCode::IoError, "snapshot CSV has no data rows");
  CMatrix d(static_cast<Eigen::Index>(rows.size()), p);
  for (std::size_t n = 0; n < rows.size(); ++n)
    for (int k = 0; k < p; ++k) d(static_cast<Eigen::Index>(n), k) = rows[n][k];
  return SnapshotMatrix(std::move(d));
}

void save_snapshot_csv(const std::string& path, const SnapshotMatrix& y) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorCode::IoError, "cannot open " + path + " for writing");
  write_snapshot_csv(os, y);
}

SnapshotMatrix load_snapshot_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorCode::IoError, "cannot open " + path);
  return read_snapshot_csv(is);
}

}  // namespace gpanm
