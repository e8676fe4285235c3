#include "codasep/datamodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "codasep/error.hpp"
#include "text_table.hpp"

namespace codasep {

namespace {

void require_unique(const std::vector<std::string>& ids, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (id.empty()) fail_validation(std::string("empty ") + what + " identifier");
    if (!seen.insert(id).second) fail_validation(std::string("duplicate ") + what + " id '" + id + "'");
  }
}

std::optional<std::int64_t> parse_count(const std::string& s) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec == std::errc() && ptr == end) return v;
  // Accept integral values written as reals, e.g. "12.0" or "1e3".
  double d = 0.0;
  auto [dptr, dec] = std::from_chars(s.data(), end, d);
  if (dec == std::errc() && dptr == end && std::isfinite(d) && d == std::floor(d) &&
      std::abs(d) < 9.0e15) {
    return static_cast<std::int64_t>(d);
  }
  return std::nullopt;
}

std::optional<double> parse_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double d = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, d);
  if (ec != std::errc() || ptr != end || !std::isfinite(d)) return std::nullopt;
  return d;
}

bool is_missing(const std::string& s) { return s.empty() || s == "NA" || s == "NaN" || s == "na"; }

}  // namespace

CountTable::CountTable(CountMatrix counts, std::vector<std::string> sample_ids,
                       std::vector<std::string> feature_ids)
    : counts_(std::move(counts)), sample_ids_(std::move(sample_ids)), feature_ids_(std::move(feature_ids)) {
  if (counts_.rows() < 2 || counts_.cols() < 2) {
    fail_validation("count table needs at least 2 samples and 2 features (got " +
                    std::to_string(counts_.rows()) + " x " + std::to_string(counts_.cols()) + ")");
  }
  if (static_cast<Eigen::Index>(sample_ids_.size()) != counts_.rows() ||
      static_cast<Eigen::Index>(feature_ids_.size()) != counts_.cols()) {
    fail_validation("count table identifiers do not match matrix dimensions");
  }
  require_unique(sample_ids_, "sample");
  require_unique(feature_ids_, "feature");
  for (Eigen::Index i = 0; i < counts_.rows(); ++i) {
    for (Eigen::Index j = 0; j < counts_.cols(); ++j) {
      if (counts_(i, j) < 0) {
        fail_validation("negative count at (" + sample_ids_[i] + ", " + feature_ids_[j] + ")");
      }
    }
  }
}

Labels::Labels(std::vector<int> y, std::vector<std::string> class_names)
    : y_(std::move(y)), class_names_(std::move(class_names)) {
  const int c = class_count();
  if (c < 2) fail_validation("labels need at least 2 classes");
  std::vector<int> seen(c, 0);
  for (int v : y_) {
    if (v < 0 || v >= c) fail_validation("label index " + std::to_string(v) + " out of range");
    seen[v] = 1;
  }
  for (int k = 0; k < c; ++k) {
    if (!seen[k]) fail_validation("class '" + class_names_[k] + "' has no samples");
  }
}

Labels Labels::from_raw(const std::vector<std::string>& raw) {
  std::set<std::string> distinct(raw.begin(), raw.end());
  if (distinct.size() < 2) {
    fail_validation("label column has a single distinct value" +
                    (distinct.empty() ? std::string() : " ('" + *distinct.begin() + "')"));
  }
  std::vector<std::string> names(distinct.begin(), distinct.end());
  std::map<std::string, int> index;
  for (std::size_t k = 0; k < names.size(); ++k) index[names[k]] = static_cast<int>(k);
  std::vector<int> y;
  y.reserve(raw.size());
  for (const auto& r : raw) y.push_back(index.at(r));
  return Labels(std::move(y), std::move(names));
}

std::vector<int> Labels::class_sizes() const {
  std::vector<int> sizes(class_count(), 0);
  for (int v : y_) ++sizes[v];
  return sizes;
}

Labels Labels::select_rows(const std::vector<int>& rows) const {
  std::vector<int> y;
  y.reserve(rows.size());
  for (int r : rows) y.push_back(y_[r]);
  return Labels(std::move(y), class_names_);
}

CovariateMatrix::CovariateMatrix(Eigen::MatrixXd values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
  if (static_cast<Eigen::Index>(names_.size()) != values_.cols()) {
    fail_validation("covariate names do not match column count");
  }
  if (!values_.allFinite()) fail_validation("covariate matrix has non-finite entries");
}

CovariateMatrix CovariateMatrix::select_rows(const std::vector<int>& rows) const {
  Eigen::MatrixXd v(rows.size(), values_.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) v.row(r) = values_.row(rows[r]);
  return CovariateMatrix(std::move(v), names_);
}

Dataset::Dataset(Composition composition, Labels labels, CovariateMatrix covariates)
    : composition_(std::move(composition)), labels_(std::move(labels)), covariates_(std::move(covariates)) {
  const int n = composition_.samples();
  if (labels_.size() != n) {
    fail_validation("label count " + std::to_string(labels_.size()) + " does not match sample count " +
                    std::to_string(n));
  }
  if (covariates_.columns() == 0 && covariates_.rows() != n) {
    covariates_ = CovariateMatrix(n);
  }
  if (covariates_.rows() != n) fail_validation("covariate rows do not match sample count");
}

Dataset Dataset::select_rows(const std::vector<int>& rows) const {
  return Dataset(composition_.select_rows(rows), labels_.select_rows(rows), covariates_.select_rows(rows));
}

Dataset Dataset::without_covariates() const {
  return Dataset(composition_, labels_, CovariateMatrix(samples()));
}

std::optional<char> parse_delimiter(const std::string& name) {
  if (name.empty() || name == "auto") return std::nullopt;
  if (name == "tab" || name == "\\t" || name == "\t") return '\t';
  if (name == "comma" || name == ",") return ',';
  if (name.size() == 1) return name[0];
  fail_validation("unknown delimiter '" + name + "'");
}

CountTable read_count_table(const std::string& path, std::optional<char> delimiter) {
  const auto text = detail::read_text_table(path, delimiter);
  if (text.header.size() < 3) fail_validation("'" + path + "': header needs sample id and >= 2 features");
  const std::size_t m = text.header.size() - 1;
  std::vector<std::string> features(text.header.begin() + 1, text.header.end());
  std::vector<std::string> samples;
  CountMatrix counts(static_cast<Eigen::Index>(text.rows.size()), static_cast<Eigen::Index>(m));
  for (std::size_t r = 0; r < text.rows.size(); ++r) {
    const auto& row = text.rows[r];
    const int line = text.line_numbers[r];
    if (row.size() != m + 1) {
      fail_validation("'" + path + "' line " + std::to_string(line) + ": expected " + std::to_string(m + 1) +
                      " fields, found " + std::to_string(row.size()));
    }
    samples.push_back(row[0]);
    for (std::size_t j = 0; j < m; ++j) {
      const auto v = parse_count(row[j + 1]);
      if (!v || *v < 0) {
        fail_validation("'" + path + "' line " + std::to_string(line) + ", column " + std::to_string(j + 2) +
                        " (" + features[j] + "): invalid count '" + row[j + 1] + "'");
      }
      counts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = *v;
    }
  }
  return CountTable(std::move(counts), std::move(samples), std::move(features));
}

void write_count_table(const CountTable& table, const std::string& path, char delimiter) {
  std::ofstream out(path);
  if (!out) fail_io("cannot write '" + path + "'");
  out << "sample_id";
  for (const auto& f : table.feature_ids()) out << delimiter << f;
  out << '\n';
  for (int i = 0; i < table.samples(); ++i) {
    out << table.sample_ids()[i];
    for (int j = 0; j < table.features(); ++j) out << delimiter << table.counts()(i, j);
    out << '\n';
  }
  if (!out) fail_io("error writing '" + path + "'");
}

Metadata read_metadata(const std::string& path, const std::string& label_column,
                       const std::vector<std::string>& covariate_columns,
                       const std::vector<std::string>& sample_ids, std::optional<char> delimiter) {
  const auto text = detail::read_text_table(path, delimiter);
  if (text.header.size() < 2) fail_validation("'" + path + "': header needs sample id and a label column");

  auto column_of = [&](const std::string& name) -> std::size_t {
    for (std::size_t c = 1; c < text.header.size(); ++c) {
      if (text.header[c] == name) return c;
    }
    fail_validation("'" + path + "': no column named '" + name + "'");
  };
  const std::size_t label_col = column_of(label_column);
  std::vector<std::size_t> cov_cols;
  for (const auto& name : covariate_columns) cov_cols.push_back(column_of(name));

  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t r = 0; r < text.rows.size(); ++r) {
    const auto& row = text.rows[r];
    if (row.size() != text.header.size()) {
      fail_validation("'" + path + "' line " + std::to_string(text.line_numbers[r]) + ": expected " +
                      std::to_string(text.header.size()) + " fields, found " + std::to_string(row.size()));
    }
    if (!row_of.emplace(row[0], r).second) {
      fail_validation("'" + path + "': duplicate sample id '" + row[0] + "'");
    }
  }

  const auto n = sample_ids.size();
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = row_of.find(sample_ids[i]);
    if (it == row_of.end()) fail_validation("sample id '" + sample_ids[i] + "' missing from metadata '" + path + "'");
    rows[i] = it->second;
  }

  std::vector<std::string> raw_labels;
  raw_labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = text.rows[rows[i]][label_col];
    if (is_missing(v)) fail_validation("sample '" + sample_ids[i] + "' has no label in column '" + label_column + "'");
    raw_labels.push_back(v);
  }
  Labels labels = Labels::from_raw(raw_labels);

  std::vector<Eigen::VectorXd> columns;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < cov_cols.size(); ++k) {
    const auto col = cov_cols[k];
    const auto& name = covariate_columns[k];
    std::vector<std::string> cells;
    cells.reserve(n);
    bool numeric = true;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& v = text.rows[rows[i]][col];
      if (is_missing(v)) {
        fail_validation("unparseable covariate '" + name + "' for sample '" + sample_ids[i] + "': missing value");
      }
      if (!parse_real(v)) numeric = false;
      cells.push_back(v);
    }
    if (numeric) {
      Eigen::VectorXd c(n);
      for (std::size_t i = 0; i < n; ++i) c[i] = *parse_real(cells[i]);
      columns.push_back(std::move(c));
      names.push_back(name);
      continue;
    }
    std::set<std::string> levels(cells.begin(), cells.end());
    for (auto it = std::next(levels.begin()); it != levels.end(); ++it) {
      Eigen::VectorXd c(n);
      for (std::size_t i = 0; i < n; ++i) c[i] = cells[i] == *it ? 1.0 : 0.0;
      columns.push_back(std::move(c));
      names.push_back(name + "[" + *it + "]");
    }
  }
  Eigen::MatrixXd values(n, columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) values.col(k) = columns[k];
  return Metadata{std::move(labels), CovariateMatrix(std::move(values), std::move(names))};
}

void write_metadata(const std::string& path, const std::vector<std::string>& sample_ids,
                    const std::string& label_column, const Labels& labels,
                    const CovariateMatrix& covariates, char delimiter) {
  if (static_cast<int>(sample_ids.size()) != labels.size()) fail_validation("metadata size mismatch");
  std::ofstream out(path);
  if (!out) fail_io("cannot write '" + path + "'");
  out << "sample_id" << delimiter << label_column;
  for (const auto& name : covariates.names()) out << delimiter << name;
  out << '\n';
  for (std::size_t i = 0; i < sample_ids.size(); ++i) {
    out << sample_ids[i] << delimiter << labels.class_names()[labels.y()[i]];
    for (int k = 0; k < covariates.columns(); ++k) {
      out << delimiter << detail::format_double(covariates.values()(static_cast<Eigen::Index>(i), k));
    }
    out << '\n';
  }
  if (!out) fail_io("error writing '" + path + "'");
}

}  // namespace codasep
