#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace codasep {

enum class VarianceMethod { hanley, delong, handtill_propagated, bootstrap };

std::string to_string(VarianceMethod method);
VarianceMethod parse_variance_method(const std::string& name);

struct AucEstimate {
  double value = 0.5;
  double variance = 0.0;
  VarianceMethod method = VarianceMethod::hanley;
  /// {n_pos, n_neg} for binary estimates, per-class sizes otherwise
  std::vector<int> class_counts;
};

/// Mann-Whitney AUC, P(score+ > score-) with ties counted 1/2.
/// `positive[i]` is non-zero for positives. O(n log n).
double binary_auc(std::span<const double> scores, std::span<const std::uint8_t> positive);

/// DeLong structural components with the same 1/2 tie rule:
/// v[i] for each positive, w[j] for each negative (input order).
struct Placements {
  double auc = 0.5;
  std::vector<double> v;
  std::vector<double> w;
};

Placements delong_placements(std::span<const double> scores, std::span<const std::uint8_t> positive);

/// Hanley-McNeil variance from (AUC, n_pos, n_neg).
double var_hanley(double auc, long n_pos, long n_neg);

/// DeLong U-statistic variance; needs >= 2 positives and >= 2 negatives.
double var_delong(std::span<const double> scores, std::span<const std::uint8_t> positive);

/// Variance of an average of two-sample U-statistics from their placements.
double var_from_placements(const Placements& p);

using ClassPair = std::pair<int, int>;

/// Hand-Till multiclass AUC. `scores` is n x C with column c ranking class c
/// (probabilities or any increasing transform of them); `y` is 0-based.
///
/// The class-pair component is 1/2 [A(c|c') + A(c'|c)], where A(c|c') is the
/// binary AUC of column c on samples of classes c and c' with c positive.
/// For C = 2 the result is exactly binary_auc of column 0 with class 0 positive.
struct HandTillResult {
  double value = 0.5;
  /// components[{c, c'}] for c < c'
  std::map<ClassPair, double> components;
};

HandTillResult hand_till_auc(const Eigen::MatrixXd& scores, std::span<const int> y, int classes);

/// (4 / [C(C-1)]^2) [sum Var + 2 sum Cov]. Covariances are keyed by ordered
/// class pairs (a, b) with a < b; absent entries count as 0.
double var_handtill(const std::map<ClassPair, double>& variances,
                    const std::map<std::pair<ClassPair, ClassPair>, double>& covariances, int classes);

/// AUC and variance of one screening model for C = 2. `scores` rank class 0
/// (the positive class); `method` is hanley or delong.
AucEstimate binary_estimate(std::span<const double> scores, std::span<const int> y, VarianceMethod method);

/// Hand-Till AUC with propagated variance. Component variances come from
/// `component_method` (hanley or delong); covariances between components
/// sharing a class are rho * sqrt(Var Var'), others 0.
AucEstimate handtill_estimate(const Eigen::MatrixXd& scores, std::span<const int> y, int classes,
                              VarianceMethod component_method, double rho);

}  // namespace codasep
