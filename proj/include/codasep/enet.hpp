#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "codasep/datamodel.hpp"
#include "codasep/preprocess.hpp"

namespace codasep {

/// Elastic-net logistic regression on all pairwise log-ratios.
///
/// Minimizes  (1/n) sum_i [log(1 + e^eta_i) - y_i eta_i]
///            + lambda (1 - alpha)/2 ||theta||_2^2 + lambda alpha ||theta||_1
/// over the intercept and theta, with each log-ratio column centered and
/// scaled to unit (population) variance. The response is 1 for class 1
/// (index 0) and 0 for class 2.
struct EnetConfig {
  double alpha = 0.5;
  /// explicit non-increasing path of lambdas >= 0; empty for the automatic path
  std::vector<double> lambda_path;
  int nlambda = 100;
  double lambda_min_ratio = 1e-3;
  /// quadratic-approximation rounds per lambda
  int max_iter = 1000;
  /// max coefficient change and KKT residual at convergence
  double tol = 1e-7;
  int cv_folds = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  DesignOptions design{DesignOptions::Mode::lazy};

  void validate() const;
};

struct EnetFit {
  /// non-zero log-ratio coefficients on the original scale, in pair order
  std::vector<std::pair<PairIndex, double>> theta;
  double intercept = 0.0;
  double lambda = 0.0;
  double alpha = 0.5;
  std::vector<PairIndex> nonzero_pairs;
  /// per-feature log-contrast weights: sum over pairs (j, .) minus pairs (., j)
  std::vector<double> alpha_contrast;
  double deviance = 0.0;
  bool converged = false;
  int iterations = 0;
  /// penalized objective after each accepted round
  std::vector<double> objective_trace;
  /// largest KKT residual on the standardized scale
  double kkt_residual = 0.0;
};

struct EnetPath {
  std::vector<EnetFit> fits;
  double lambda_max = 0.0;
  /// alpha = 0 has no finite lambda_max; the alpha = 0.001 bound was used
  bool alpha_fallback = false;
  std::vector<std::string> feature_ids;
};

/// Fits the whole lambda path with warm starts. Needs C = 2.
EnetPath fit_enet_logistic(const Dataset& ds, const EnetConfig& cfg);

struct CvResult {
  std::vector<double> lambdas;
  std::vector<double> mean_deviance;  // per held-out observation
  std::vector<double> se_deviance;
  double lambda_min = 0.0;
  double lambda_1se = 0.0;
  std::size_t index_min = 0;
  std::size_t index_1se = 0;
  int attempts = 1;
};

/// Stratified K-fold cross-validated deviance over the path's lambdas.
/// Returns nothing when cfg.cv_folds == 0.
std::optional<CvResult> cv_select_lambda(const EnetPath& path, const Dataset& ds, const EnetConfig& cfg);

}  // namespace codasep
