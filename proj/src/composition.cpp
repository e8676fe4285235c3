#include "codasep/composition.hpp"

#include <cmath>

#include "codasep/error.hpp"

namespace codasep {

Composition::Composition(Eigen::MatrixXd values, std::vector<std::string> sample_ids,
                         std::vector<std::string> feature_ids, Eigen::VectorXd row_totals)
    : values_(std::move(values)),
      sample_ids_(std::move(sample_ids)),
      feature_ids_(std::move(feature_ids)),
      row_totals_(std::move(row_totals)) {
  if (static_cast<Eigen::Index>(sample_ids_.size()) != values_.rows() ||
      static_cast<Eigen::Index>(feature_ids_.size()) != values_.cols() ||
      row_totals_.size() != values_.rows()) {
    fail_validation("composition identifiers do not match matrix dimensions");
  }
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      const double v = values_(i, j);
      if (!(v > 0.0) || !std::isfinite(v)) {
        fail_validation("composition entry (" + sample_ids_[i] + ", " + feature_ids_[j] +
                        ") is not strictly positive");
      }
    }
  }
  log_values_ = values_.array().log().matrix();
}

Composition Composition::select_rows(const std::vector<int>& rows) const {
  Eigen::MatrixXd v(rows.size(), values_.cols());
  Eigen::VectorXd totals(rows.size());
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    v.row(r) = values_.row(rows[r]);
    totals[r] = row_totals_[rows[r]];
    ids.push_back(sample_ids_[rows[r]]);
  }
  return Composition(std::move(v), std::move(ids), feature_ids_, std::move(totals));
}

}  // namespace codasep
