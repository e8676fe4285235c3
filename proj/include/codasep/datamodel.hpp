#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "codasep/composition.hpp"

namespace codasep {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Raw reads per sample (rows) and feature (columns).
class CountTable {
 public:
  /// Throws Error(validation) unless n >= 2, m >= 2, all counts >= 0 and
  /// identifiers are unique and sized to the matrix.
  CountTable(CountMatrix counts, std::vector<std::string> sample_ids,
             std::vector<std::string> feature_ids);

  const CountMatrix& counts() const noexcept { return counts_; }
  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
  const std::vector<std::string>& feature_ids() const noexcept { return feature_ids_; }
  int samples() const noexcept { return static_cast<int>(counts_.rows()); }
  int features() const noexcept { return static_cast<int>(counts_.cols()); }

 private:
  CountMatrix counts_;
  std::vector<std::string> sample_ids_;
  std::vector<std::string> feature_ids_;
};

/// Class membership. Classes are 0-based internally; class_names[c] is the
/// raw label of class c and the last class (C - 1) is the multinomial
/// baseline.
class Labels {
 public:
  Labels(std::vector<int> y, std::vector<std::string> class_names);

  /// Builds labels from raw strings, indexing classes in lexicographic order.
  static Labels from_raw(const std::vector<std::string>& raw);

  const std::vector<int>& y() const noexcept { return y_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  int class_count() const noexcept { return static_cast<int>(class_names_.size()); }
  int size() const noexcept { return static_cast<int>(y_.size()); }
  std::vector<int> class_sizes() const;

  Labels select_rows(const std::vector<int>& rows) const;

 private:
  std::vector<int> y_;
  std::vector<std::string> class_names_;
};

/// n x p covariates; p may be zero.
class CovariateMatrix {
 public:
  CovariateMatrix() = default;
  explicit CovariateMatrix(int n) : values_(n, 0) {}
  CovariateMatrix(Eigen::MatrixXd values, std::vector<std::string> names);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  int rows() const noexcept { return static_cast<int>(values_.rows()); }
  int columns() const noexcept { return static_cast<int>(values_.cols()); }
  bool empty() const noexcept { return values_.cols() == 0; }

  CovariateMatrix select_rows(const std::vector<int>& rows) const;

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> names_;
};

class Dataset {
 public:
  Dataset(Composition composition, Labels labels, CovariateMatrix covariates);

  const Composition& composition() const noexcept { return composition_; }
  const Labels& labels() const noexcept { return labels_; }
  const CovariateMatrix& covariates() const noexcept { return covariates_; }
  int samples() const noexcept { return composition_.samples(); }
  int features() const noexcept { return composition_.features(); }

  Dataset select_rows(const std::vector<int>& rows) const;
  Dataset without_covariates() const;

 private:
  Composition composition_;
  Labels labels_;
  CovariateMatrix covariates_;
};

/// Delimiter auto-detection: tab if the header line contains one, else comma.
std::optional<char> parse_delimiter(const std::string& name);

CountTable read_count_table(const std::string& path, std::optional<char> delimiter = {});
void write_count_table(const CountTable& table, const std::string& path, char delimiter = ',');

struct Metadata {
  Labels labels;
  CovariateMatrix covariates;
};

/// Reads sample metadata keyed by sample id and aligns it to `sample_ids`.
///
/// Numeric covariate columns are used as-is. A column with any non-numeric
/// value is categorical and is one-hot encoded with its lexicographically
/// first level dropped; the indicator columns are named `col[level]`.
Metadata read_metadata(const std::string& path, const std::string& label_column,
                       const std::vector<std::string>& covariate_columns,
                       const std::vector<std::string>& sample_ids,
                       std::optional<char> delimiter = {});

void write_metadata(const std::string& path, const std::vector<std::string>& sample_ids,
                    const std::string& label_column, const Labels& labels,
                    const CovariateMatrix& covariates, char delimiter = ',');

}  // namespace codasep
