// SPDX-License-Identifier: Apache-2.0
#include "depthcov/dataset.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "depthcov/common.hpp"

namespace depthcov {

void write_dataset_csv(std::ostream& os, const Dataset& data) {
  if (data.has_labels() &&
      data.labels.size() != static_cast<size_t>(data.n())) {
    throw invalid_input("write_dataset_csv: label count mismatch");
  }
  char buf[64];
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.p(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data.points(i, j));
      os << buf;
      if (j + 1 < data.p() || data.has_labels()) os << ',';
    }
    if (data.has_labels()) os << int(data.labels[i]);
    os << '\n';
  }
}

Dataset read_dataset_csv(std::istream& is, bool expect_labels) {
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t width = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* s = line.c_str();
    char* end = nullptr;
    for (;;) {
      const double v = std::strtod(s, &end);
      if (end == s) {
        throw invalid_input("read_dataset_csv: malformed number in: " + line);
      }
      row.push_back(v);
      s = end;
      while (*s == ' ' || *s == '\t') ++s;
      if (*s == ',') {
        ++s;
        continue;
      }
      if (*s == '\0' || *s == '\r') break;
      throw invalid_input("read_dataset_csv: unexpected character in: " + line);
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw invalid_input("read_dataset_csv: ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw invalid_input("read_dataset_csv: empty input");
  const int p = static_cast<int>(width) - (expect_labels ? 1 : 0);
  if (p <= 0) throw invalid_input("read_dataset_csv: no value columns");
  Dataset out;
  out.points.resize(rows.size(), p);
  if (expect_labels) out.labels.resize(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < p; ++j) out.points(i, j) = rows[i][j];
    if (expect_labels) {
      const double l = rows[i][width - 1];
      if (l != 0.0 && l != 1.0) {
        throw invalid_input("read_dataset_csv: labels must be 0 or 1");
      }
      out.labels[i] = static_cast<std::uint8_t>(l);
    }
  }
  return out;
}

void save_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream os(path);
  if (!os) throw invalid_input("save_dataset_csv: cannot open " + path);
  write_dataset_csv(os, data);
}

Dataset load_dataset_csv(const std::string& path, bool expect_labels) {
  std::ifstream is(path);
  if (!is) throw invalid_input("load_dataset_csv: cannot open " + path);
  return read_dataset_csv(is, expect_labels);
}

}  // namespace depthcov
