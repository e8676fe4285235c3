#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "codasep/auc.hpp"
#include "codasep/datamodel.hpp"
#include "codasep/glm.hpp"

namespace codasep {

struct ScreeningConfig {
  /// assumed correlation between AUCs of feature pairs sharing a feature
  double rho_otu = 0.2;
  /// hanley or delong; multiclass data always propagates per class pair
  VarianceMethod variance_method = VarianceMethod::hanley;
  int workers = 1;
  std::uint64_t seed = 0;
  bool covariates_included = true;
  GlmOptions glm;

  void validate() const;
};

struct PairFailure {
  int first = 0;
  int second = 0;
  std::string message;
};

/// Symmetric m x m matrix of pairwise log-ratio AUCs. Diagonal entries are NaN.
struct AucMatrix {
  Eigen::MatrixXd values;
  Eigen::MatrixXd variances;
  VarianceMethod method = VarianceMethod::hanley;
  std::vector<std::string> feature_ids;
  std::vector<PairFailure> failures;
  /// pairs whose model fit stopped on the separation rule
  int separated_pairs = 0;

  int features() const noexcept { return static_cast<int>(values.rows()); }
};

/// Fits one model per feature pair (in parallel) and scores it by AUC.
///
/// C = 2: binary AUC with class 1 (index 0) positive, ranked by the fitted
/// log-odds of class 1 (the order of its probability). C > 2: Hand-Till AUC
/// on per-class fitted log-probabilities. The result does not depend on the worker count.
AucMatrix compute_auc_matrix(const Dataset& ds, const ScreeningConfig& cfg);

struct Ranking {
  /// feature indices, best first
  std::vector<int> order;
  /// per feature (input order): sum of its row of the AUC matrix
  std::vector<double> column_scores;
};

/// Sort by descending column sum; ties by ascending feature id.
Ranking rank_features(const AucMatrix& a);

/// S_k for k = 2..m (element k-2): mean AUC over pairs among the top k.
std::vector<double> separability_curve(const AucMatrix& a, const std::vector<int>& order);

/// Smallest k attaining the maximum of the curve.
int select_k(const std::vector<double>& s_curve);

/// Variance of S_k with Cov(AUC_a, AUC_b) = rho sqrt(Var_a Var_b) for pairs
/// sharing a feature and 0 otherwise.
double var_s_k(const AucMatrix& a, const std::vector<int>& order, int k, double rho_otu);

struct SeparabilityReport {
  std::vector<std::string> feature_ids;  // input order
  Ranking ranking;
  std::vector<double> s_curve;
  int k_star = 2;
  double s = 0.5;
  double var_s = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 1.0;
  ScreeningConfig config;
  std::vector<std::string> covariate_names;
  std::vector<std::string> class_names;
  std::vector<PairFailure> failures;
  int separated_pairs = 0;

  std::vector<std::string> ranked_ids() const;
};

/// Ranking, curve, k*, Var(S_k*) and the 95% normal interval clipped to [0, 1].
SeparabilityReport build_report(const AucMatrix& a, const ScreeningConfig& cfg);

/// Full screening: AUC matrix plus report.
SeparabilityReport screen(const Dataset& ds, const ScreeningConfig& cfg, AucMatrix* matrix_out = nullptr);

}  // namespace codasep
