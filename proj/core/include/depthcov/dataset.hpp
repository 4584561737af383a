// SPDX-License-Identifier: Apache-2.0
#ifndef DEPTHCOV_DATASET_HPP
#define DEPTHCOV_DATASET_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace depthcov {

// Sample matrix (one row per observation) plus optional per-row labels
// recording which rows were replaced by the contaminating law.  Estimators
// accept only the bare point matrix, so labels can never leak into a fit.
struct Dataset {
  Eigen::MatrixXd points;       // n x p
  std::vector<std::uint8_t> labels;  // empty, or n entries: 1 = contaminated

  int n() const { return static_cast<int>(points.rows()); }
  int p() const { return static_cast<int>(points.cols()); }
  bool has_labels() const { return !labels.empty(); }
};

// CSV: one row per sample, p value columns; a final 0/1 label column is
// written when labels are present and read back when expect_labels is set.
void write_dataset_csv(std::ostream& os, const Dataset& data);
Dataset read_dataset_csv(std::istream& is, bool expect_labels);
void save_dataset_csv(const std::string& path, const Dataset& data);
Dataset load_dataset_csv(const std::string& path, bool expect_labels);

}  // namespace depthcov

#endif  // DEPTHCOV_DATASET_HPP
