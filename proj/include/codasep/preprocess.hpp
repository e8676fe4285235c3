#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "codasep/composition.hpp"
#include "codasep/datamodel.hpp"

namespace codasep {

struct FilterResult {
  CountTable table;
  std::vector<std::string> removed;
};

/// Keeps feature j iff it has at least `min_nonzero` non-zero cells.
/// Column order of the survivors is preserved.
FilterResult filter_rare(const CountTable& table, int min_nonzero = 3);

/// Raised for rows whose zero replacement is not smaller than the row's
/// smallest non-zero count. Not an error; the composition is still valid.
struct ImputationWarning {
  std::string sample_id;
  int zero_cells = 0;
  double replacement = 0.0;
  double smallest_nonzero = 0.0;
};

struct ImputationResult {
  Composition composition;
  std::vector<ImputationWarning> warnings;
};

/// Bayesian-multiplicative zero replacement with a uniform Dirichlet prior.
///
/// For row i with total N and per-feature prior strength a (sum over all m
/// features A = m a), a zero cell becomes N a / (N + A) and every non-zero
/// cell is scaled by 1 - z a / (N + A), z being the number of zeros in the
/// row, so that the row total is unchanged. Replacement is the posterior
/// mean; `seed` is accepted for interface stability and does not affect the
/// result.
ImputationResult impute_zeros(const CountTable& table, double prior_strength = 0.5,
                              std::uint64_t seed = 0);

struct ClrMatrix {
  Eigen::MatrixXd values;
};

/// log x_ij minus the row mean of log x_il.
ClrMatrix clr_transform(const Composition& comp);

/// Unordered feature pair stored with first < second (0-based).
class PairIndex {
 public:
  PairIndex(int first, int second);

  int first() const noexcept { return first_; }
  int second() const noexcept { return second_; }

  friend bool operator==(const PairIndex&, const PairIndex&) = default;
  friend auto operator<=>(const PairIndex&, const PairIndex&) = default;

 private:
  int first_;
  int second_;
};

std::size_t pair_count(int m);

/// Position of a pair in lexicographic (first, second) order.
std::size_t pair_position(const PairIndex& pair, int m);

/// All pairs of m features in lexicographic order.
std::vector<PairIndex> all_pairs(int m);

/// log(x_ij / x_ij') for every sample.
Eigen::VectorXd pairwise_logratio(const Composition& comp, const PairIndex& pair);

struct DesignOptions {
  enum class Mode { automatic, dense, lazy };
  Mode mode = Mode::automatic;
  /// automatic mode switches to lazy columns above this many pairs
  std::size_t lazy_above_columns = 10'000;
  /// dense mode refuses designs with more cells than this
  std::size_t max_dense_cells = 50'000'000;
};

/// The n x m(m-1)/2 matrix of all pairwise log-ratios, columns in
/// lexicographic pair order. Lazy designs generate each column on demand
/// from the log composition.
class LogRatioDesign {
 public:
  LogRatioDesign(const Composition& comp, DesignOptions options);

  int rows() const noexcept { return static_cast<int>(log_values_.rows()); }
  std::size_t cols() const noexcept { return pairs_.size(); }
  int features() const noexcept { return static_cast<int>(log_values_.cols()); }
  bool is_lazy() const noexcept { return dense_.size() == 0 && !pairs_.empty(); }

  const PairIndex& pair(std::size_t column) const { return pairs_.at(column); }
  const std::vector<PairIndex>& pairs() const noexcept { return pairs_; }
  Eigen::VectorXd column(std::size_t column) const;

  /// Throws if the design is lazy.
  const Eigen::MatrixXd& dense() const;

  const Eigen::MatrixXd& log_values() const noexcept { return log_values_; }

 private:
  Eigen::MatrixXd log_values_;
  std::vector<PairIndex> pairs_;
  Eigen::MatrixXd dense_;
};

LogRatioDesign logratio_design(const Composition& comp, DesignOptions options = {});

}  // namespace codasep
