#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace codasep {

/// Strictly positive samples x features matrix produced by zero imputation.
///
/// Row totals are the pre-imputation count totals; imputation preserves them.
/// Sample identifiers may repeat (bootstrap resamples share a source sample).
class Composition {
 public:
  Composition(Eigen::MatrixXd values, std::vector<std::string> sample_ids,
              std::vector<std::string> feature_ids, Eigen::VectorXd row_totals);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
  const std::vector<std::string>& feature_ids() const noexcept { return feature_ids_; }
  const Eigen::VectorXd& row_totals() const noexcept { return row_totals_; }

  /// Natural log of every entry, computed once at construction.
  const Eigen::MatrixXd& log_values() const noexcept { return log_values_; }

  int samples() const noexcept { return static_cast<int>(values_.rows()); }
  int features() const noexcept { return static_cast<int>(values_.cols()); }

  /// Copy of the selected rows, in the given order (repeats allowed).
  Composition select_rows(const std::vector<int>& rows) const;

 private:
  Eigen::MatrixXd values_;
  Eigen::MatrixXd log_values_;
  std::vector<std::string> sample_ids_;
  std::vector<std::string> feature_ids_;
  Eigen::VectorXd row_totals_;
};

}  // namespace codasep
