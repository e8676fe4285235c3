#include "codasep/screening.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "codasep/error.hpp"
#include "codasep/preprocess.hpp"
#include "parallel.hpp"

namespace codasep {

void ScreeningConfig::validate() const {
  if (!(rho_otu >= 0.0 && rho_otu <= 1.0)) fail_validation("rho_otu must lie in [0, 1]");
  if (variance_method != VarianceMethod::hanley && variance_method != VarianceMethod::delong) {
    fail_validation("screening variance method must be hanley or delong");
  }
  if (glm.max_iter < 1) fail_validation("max_iter must be >= 1");
  if (!(glm.tol > 0.0)) fail_validation("tol must be positive");
}

namespace {

struct PairResult {
  double auc = 0.5;
  double variance = 0.0;
  bool separated = false;
  std::optional<std::string> failure;
};

double fallback_variance(const std::vector<int>& sizes, double rho) {
  const int classes = static_cast<int>(sizes.size());
  if (classes == 2) return var_hanley(0.5, sizes[0], sizes[1]);
  std::map<ClassPair, double> variances;
  for (int c = 0; c < classes; ++c) {
    for (int d = c + 1; d < classes; ++d) variances[{c, d}] = var_hanley(0.5, sizes[c], sizes[d]);
  }
  std::map<std::pair<ClassPair, ClassPair>, double> cov;
  for (auto a = variances.begin(); a != variances.end(); ++a) {
    for (auto b = std::next(a); b != variances.end(); ++b) {
      const auto& p = a->first;
      const auto& q = b->first;
      if (p.first == q.first || p.first == q.second || p.second == q.first || p.second == q.second) {
        cov[{p, q}] = rho * std::sqrt(a->second * b->second);
      }
    }
  }
  return var_handtill(variances, cov, classes);
}

}  // namespace

AucMatrix compute_auc_matrix(const Dataset& ds, const ScreeningConfig& cfg) {
  cfg.validate();
  const int m = ds.features();
  if (m < 2) fail_validation("screening needs at least 2 features");
  const int classes = ds.labels().class_count();
  const auto& y = ds.labels().y();
  const bool use_cov = cfg.covariates_included && !ds.covariates().empty();
  const Eigen::MatrixXd* cov = use_cov ? &ds.covariates().values() : nullptr;
  const auto pairs = all_pairs(m);
  const auto sizes = ds.labels().class_sizes();
  const double fallback = fallback_variance(sizes, cfg.rho_otu);

  std::vector<PairResult> results(pairs.size());
  detail::parallel_for(pairs.size(), cfg.workers, [&](std::size_t k) {
    const auto& pair = pairs[k];
    PairResult& out = results[k];
    try {
      const Eigen::VectorXd z = pairwise_logratio(ds.composition(), pair);
      GlmSpec spec;
      spec.n_classes = classes;
      spec.predictor = std::span<const double>(z.data(), static_cast<std::size_t>(z.size()));
      spec.covariates = cov;
      spec.labels = y;
      spec.options = cfg.glm;
      const GlmFit fit = fit_multinomial(spec);
      if (!fit.log_probs.allFinite()) fail_runtime("non-finite fitted probabilities");
      AucEstimate est;
      if (classes == 2) {
        const Eigen::VectorXd s = binary_score(fit);
        est = binary_estimate(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())), y,
                              cfg.variance_method);
      } else {
        est = handtill_estimate(fit.log_probs, y, classes, cfg.variance_method, cfg.rho_otu);
      }
      if (!std::isfinite(est.value) || !std::isfinite(est.variance)) fail_runtime("non-finite AUC estimate");
      out.auc = est.value;
      out.variance = est.variance;
      out.separated = fit.separation_flag;
    } catch (const std::exception& e) {
      out = PairResult{0.5, fallback, false, std::string(e.what())};
    }
  });

  AucMatrix a;
  a.values = Eigen::MatrixXd::Constant(m, m, std::numeric_limits<double>::quiet_NaN());
  a.variances = a.values;
  a.method = classes == 2 ? cfg.variance_method : VarianceMethod::handtill_propagated;
  a.feature_ids = ds.composition().feature_ids();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const int i = pairs[k].first();
    const int j = pairs[k].second();
    a.values(i, j) = a.values(j, i) = results[k].auc;
    a.variances(i, j) = a.variances(j, i) = results[k].variance;
    if (results[k].separated) ++a.separated_pairs;
    if (results[k].failure) a.failures.push_back({i, j, *results[k].failure});
  }
  return a;
}

Ranking rank_features(const AucMatrix& a) {
  const int m = a.features();
  Ranking r;
  r.column_scores.assign(m, 0.0);
  for (int j = 0; j < m; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      if (i != j) s += a.values(i, j);
    }
    r.column_scores[j] = s;
  }
  r.order.resize(m);
  std::iota(r.order.begin(), r.order.end(), 0);
  std::sort(r.order.begin(), r.order.end(), [&](int x, int y) {
    if (r.column_scores[x] != r.column_scores[y]) return r.column_scores[x] > r.column_scores[y];
    return a.feature_ids[x] < a.feature_ids[y];
  });
  return r;
}

std::vector<double> separability_curve(const AucMatrix& a, const std::vector<int>& order) {
  const auto m = order.size();
  std::vector<double> curve;
  if (m < 2) return curve;
  curve.reserve(m - 1);
  double sum = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    for (std::size_t i = 0; i < k; ++i) sum += a.values(order[k], order[i]);
    const double pairs = static_cast<double>(k + 1) * static_cast<double>(k) / 2.0;
    curve.push_back(sum / pairs);
  }
  return curve;
}

int select_k(const std::vector<double>& s_curve) {
  if (s_curve.empty()) fail_validation("empty separability curve");
  std::size_t best = 0;
  for (std::size_t k = 1; k < s_curve.size(); ++k) {
    if (s_curve[k] > s_curve[best]) best = k;
  }
  return static_cast<int>(best) + 2;
}

double var_s_k(const AucMatrix& a, const std::vector<int>& order, int k, double rho_otu) {
  if (k < 2 || k > static_cast<int>(order.size())) fail_validation("k out of range");
  // Two distinct pairs share at most one feature, so the sum of sqrt(Var Var')
  // over sharing pairs is sum_f (s_f^2 - q_f) / 2, with s_f and q_f the sum of
  // standard deviations and of variances of the pairs containing f.
  std::vector<double> sd_sum(k, 0.0);
  std::vector<double> var_sum(k, 0.0);
  double total_var = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const double v = std::max(0.0, a.variances(order[i], order[j]));
      const double sd = std::sqrt(v);
      total_var += v;
      sd_sum[i] += sd;
      sd_sum[j] += sd;
      var_sum[i] += v;
      var_sum[j] += v;
    }
  }
  double shared = 0.0;
  for (int f = 0; f < k; ++f) shared += 0.5 * (sd_sum[f] * sd_sum[f] - var_sum[f]);
  const double denom = static_cast<double>(k) * (k - 1);
  return 4.0 / (denom * denom) * (total_var + 2.0 * rho_otu * shared);
}

std::vector<std::string> SeparabilityReport::ranked_ids() const {
  std::vector<std::string> out;
  out.reserve(ranking.order.size());
  for (int j : ranking.order) out.push_back(feature_ids[j]);
  return out;
}

SeparabilityReport build_report(const AucMatrix& a, const ScreeningConfig& cfg) {
  SeparabilityReport r;
  r.feature_ids = a.feature_ids;
  r.ranking = rank_features(a);
  r.s_curve = separability_curve(a, r.ranking.order);
  r.k_star = select_k(r.s_curve);
  r.s = r.s_curve[r.k_star - 2];
  r.var_s = var_s_k(a, r.ranking.order, r.k_star, cfg.rho_otu);
  const double half = 1.96 * std::sqrt(r.var_s);
  r.ci_lower = std::clamp(r.s - half, 0.0, 1.0);
  r.ci_upper = std::clamp(r.s + half, 0.0, 1.0);
  r.config = cfg;
  r.failures = a.failures;
  r.separated_pairs = a.separated_pairs;
  return r;
}

SeparabilityReport screen(const Dataset& ds, const ScreeningConfig& cfg, AucMatrix* matrix_out) {
  AucMatrix a = compute_auc_matrix(ds, cfg);
  SeparabilityReport r = build_report(a, cfg);
  if (cfg.covariates_included) r.covariate_names = ds.covariates().names();
  r.class_names = ds.labels().class_names();
  if (matrix_out) *matrix_out = std::move(a);
  return r;
}

}  // namespace codasep
