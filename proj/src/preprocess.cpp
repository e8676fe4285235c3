#include "codasep/preprocess.hpp"

#include <cmath>
#include <limits>

#include "codasep/error.hpp"

namespace codasep {

FilterResult filter_rare(const CountTable& table, int min_nonzero) {
  if (min_nonzero < 0) fail_validation("min_nonzero must be >= 0");
  const auto& counts = table.counts();
  std::vector<int> keep;
  std::vector<std::string> removed;
  for (int j = 0; j < table.features(); ++j) {
    const auto nonzero = (counts.col(j).array() != 0).count();
    if (nonzero >= min_nonzero) {
      keep.push_back(j);
    } else {
      removed.push_back(table.feature_ids()[j]);
    }
  }
  if (keep.size() < 2) {
    fail_validation("only " + std::to_string(keep.size()) + " feature(s) have >= " + std::to_string(min_nonzero) +
                    " non-zero counts; at least 2 are required");
  }
  CountMatrix kept(table.samples(), static_cast<Eigen::Index>(keep.size()));
  std::vector<std::string> ids;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    kept.col(static_cast<Eigen::Index>(k)) = counts.col(keep[k]);
    ids.push_back(table.feature_ids()[keep[k]]);
  }
  return FilterResult{CountTable(std::move(kept), table.sample_ids(), std::move(ids)), std::move(removed)};
}

ImputationResult impute_zeros(const CountTable& table, double prior_strength, std::uint64_t /*seed*/) {
  if (!(prior_strength > 0.0) || !std::isfinite(prior_strength)) {
    fail_validation("prior strength must be positive");
  }
  const int n = table.samples();
  const int m = table.features();
  const double prior_total = prior_strength * m;
  Eigen::MatrixXd values(n, m);
  Eigen::VectorXd totals(n);
  std::vector<ImputationWarning> warnings;

  for (int i = 0; i < n; ++i) {
    const auto row = table.counts().row(i);
    double total = 0.0;
    int zeros = 0;
    double smallest = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      const double x = static_cast<double>(row(j));
      total += x;
      if (row(j) == 0) {
        ++zeros;
      } else {
        smallest = std::min(smallest, x);
      }
    }
    if (!(total > 0.0)) fail_validation("sample '" + table.sample_ids()[i] + "' has zero total count");
    totals[i] = total;

    const double replacement = total * prior_strength / (total + prior_total);
    const double scale = 1.0 - zeros * prior_strength / (total + prior_total);
    for (int j = 0; j < m; ++j) {
      values(i, j) = row(j) == 0 ? replacement : static_cast<double>(row(j)) * scale;
    }
    if (zeros > 0 && replacement >= smallest) {
      warnings.push_back({table.sample_ids()[i], zeros, replacement, smallest});
    }
  }
  return ImputationResult{Composition(std::move(values), table.sample_ids(), table.feature_ids(), std::move(totals)),
                          std::move(warnings)};
}

ClrMatrix clr_transform(const Composition& comp) {
  const auto& logs = comp.log_values();
  Eigen::MatrixXd out = logs;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i).array() -= logs.row(i).mean();
  }
  return ClrMatrix{std::move(out)};
}

PairIndex::PairIndex(int first, int second) : first_(first), second_(second) {
  if (first < 0 || second <= first) {
    fail_validation("invalid feature pair (" + std::to_string(first) + ", " + std::to_string(second) + ")");
  }
}

std::size_t pair_count(int m) {
  return m < 2 ? 0 : static_cast<std::size_t>(m) * static_cast<std::size_t>(m - 1) / 2;
}

std::size_t pair_position(const PairIndex& pair, int m) {
  const auto j = static_cast<std::size_t>(pair.first());
  const auto k = static_cast<std::size_t>(pair.second());
  if (k >= static_cast<std::size_t>(m)) fail_validation("pair index out of range");
  return j * static_cast<std::size_t>(m) - j * (j + 1) / 2 + (k - j - 1);
}

std::vector<PairIndex> all_pairs(int m) {
  std::vector<PairIndex> out;
  out.reserve(pair_count(m));
  for (int j = 0; j < m; ++j) {
    for (int k = j + 1; k < m; ++k) out.emplace_back(j, k);
  }
  return out;
}

Eigen::VectorXd pairwise_logratio(const Composition& comp, const PairIndex& pair) {
  if (pair.second() >= comp.features()) fail_validation("pair index out of range");
  // log of the ratio rather than a difference of logs: equal ratios stay exactly tied
  return (comp.values().col(pair.first()).array() / comp.values().col(pair.second()).array()).log().matrix();
}

LogRatioDesign::LogRatioDesign(const Composition& comp, DesignOptions options)
    : log_values_(comp.log_values()), pairs_(all_pairs(comp.features())) {
  bool lazy = options.mode == DesignOptions::Mode::lazy;
  if (options.mode == DesignOptions::Mode::automatic) lazy = pairs_.size() > options.lazy_above_columns;
  if (lazy) return;
  const std::size_t cells = pairs_.size() * static_cast<std::size_t>(log_values_.rows());
  if (cells > options.max_dense_cells) {
    fail_validation("dense log-ratio design would hold " + std::to_string(cells) + " cells (cap " +
                    std::to_string(options.max_dense_cells) + "); use lazy columns");
  }
  dense_.resize(log_values_.rows(), static_cast<Eigen::Index>(pairs_.size()));
  for (std::size_t c = 0; c < pairs_.size(); ++c) {
    dense_.col(static_cast<Eigen::Index>(c)) = log_values_.col(pairs_[c].first()) - log_values_.col(pairs_[c].second());
  }
}

Eigen::VectorXd LogRatioDesign::column(std::size_t column) const {
  const auto& p = pairs_.at(column);
  if (dense_.size() != 0) return dense_.col(static_cast<Eigen::Index>(column));
  return log_values_.col(p.first()) - log_values_.col(p.second());
}

const Eigen::MatrixXd& LogRatioDesign::dense() const {
  if (dense_.size() == 0) fail_validation("log-ratio design is lazy; request columns individually");
  return dense_;
}

LogRatioDesign logratio_design(const Composition& comp, DesignOptions options) {
  return LogRatioDesign(comp, options);
}

}  // namespace codasep
