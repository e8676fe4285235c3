#pragma once

#include <span>

#include <Eigen/Dense>

#include "codasep/datamodel.hpp"

namespace codasep {

struct GlmOptions {
  int max_iter = 100;
  /// relative change in log-likelihood
  double tol = 1e-8;
  /// |slope| on the standardized scale beyond which the fit is declared
  /// (quasi-)separated
  double separation_threshold = 30.0;
  int max_halvings = 20;
};

/// Non-owning view of one screening model: y ~ predictor + covariates.
struct GlmSpec {
  int n_classes = 2;
  std::span<const double> predictor;
  const Eigen::MatrixXd* covariates = nullptr;  // n x p, may be null
  std::span<const int> labels;                 // 0-based; class n_classes-1 is the baseline
  GlmOptions options;
};

struct GlmFit {
  /// (C-1) x (2 + p): intercept, slope on the predictor, covariate
  /// coefficients, on the original scale.
  Eigen::MatrixXd coefficients;
  /// n x C class probabilities.
  Eigen::MatrixXd fitted_probs;
  /// log of fitted_probs, computed without cancellation; preserves the
  /// ordering of saturated probabilities.
  Eigen::MatrixXd log_probs;
  /// n x (C-1) linear predictors (log-odds against the baseline class)
  Eigen::MatrixXd linear_predictor;
  bool converged = false;
  int iterations = 0;
  double log_likelihood = 0.0;
  bool separation_flag = false;
  bool ridge_applied = false;
  /// max |d loglik / d coefficient| on the original scale at the returned iterate
  double gradient_max_norm = 0.0;
};

/// Baseline-category multinomial logistic regression by damped Newton.
///
/// Columns are centered and scaled internally; columns with zero variance are
/// dropped and get coefficient 0. Each accepted step does not decrease the
/// log-likelihood (step halving). The fit stops early with separation_flag
/// set when a standardized slope exceeds the separation threshold, or when
/// max_iter is exhausted.
GlmFit fit_multinomial(const GlmSpec& spec);

/// The n x C probability matrix.
const Eigen::MatrixXd& class_scores(const GlmFit& fit);

/// Log-odds of the first class against the baseline (C = 2). Ranks samples
/// exactly as the fitted probability does, and unlike a difference of logs
/// it stays monotone in the predictor under rounding.
Eigen::VectorXd binary_score(const GlmFit& fit);

}  // namespace codasep
