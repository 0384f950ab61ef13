#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace pennmm {

// Design matrix plus response. Cox fits additionally carry the censoring
// indicator (status 1 = observed failure) and response holds observed times.
struct Dataset {
  Eigen::MatrixXd design;                 // n x d, rows x_i^T
  Eigen::VectorXd response;               // y_i, or observed times Z_i for Cox
  std::optional<Eigen::VectorXd> status;  // delta_i in {0,1}; present iff Cox
  std::vector<std::string> column_names;  // size d, or empty for x1..xd

  Eigen::Index n() const { return design.rows(); }
  Eigen::Index d() const { return design.cols(); }

  std::string column_name(Eigen::Index j) const {
    if (j < static_cast<Eigen::Index>(column_names.size())) return column_names[j];
    return "x" + std::to_string(j + 1);
  }
};

}  // namespace pennmm
