#include "codasep/report_io.hpp"

#include <cmath>
#include <fstream>

#include "codasep/error.hpp"
#include "text_table.hpp"

namespace codasep {

using nlohmann::json;

namespace {

json failures_to_json(const std::vector<PairFailure>& failures, const std::vector<std::string>& ids) {
  json out = json::array();
  for (const auto& f : failures) {
    out.push_back({{"first", ids.at(f.first)}, {"second", ids.at(f.second)}, {"message", f.message}});
  }
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_io("cannot open " + path + " for writing");
  return out;
}

}  // namespace

json report_to_json(const SeparabilityReport& report) {
  const auto ids = report.ranked_ids();
  json scores = json::array();
  for (int j : report.ranking.order) scores.push_back(report.ranking.column_scores[j]);
  json curve = json::array();
  for (std::size_t i = 0; i < report.s_curve.size(); ++i) {
    curve.push_back({{"k", static_cast<int>(i) + 2}, {"s", report.s_curve[i]}});
  }
  const auto& cfg = report.config;
  return json{
      {"ranking", ids},
      {"column_scores", scores},
      {"s_curve", curve},
      {"k_star", report.k_star},
      {"s", report.s},
      {"var_s", report.var_s},
      {"ci_95", {report.ci_lower, report.ci_upper}},
      {"top_features", std::vector<std::string>(ids.begin(), ids.begin() + report.k_star)},
      {"config",
       {{"rho_otu", cfg.rho_otu},
        {"variance", to_string(cfg.variance_method)},
        {"seed", cfg.seed},
        {"covariates", report.covariate_names},
        {"glm", {{"max_iter", cfg.glm.max_iter}, {"tol", cfg.glm.tol}, {"separation_threshold", cfg.glm.separation_threshold}}}}},
      {"classes", report.class_names},
      {"feature_ids", report.feature_ids},
      {"failures", failures_to_json(report.failures, report.feature_ids)},
      {"separated_pairs", report.separated_pairs},
  };
}

json bootstrap_to_json(const BootstrapResult& result) {
  json dist = json::object();
  for (const auto& [k, count] : result.k_star_distribution) dist[std::to_string(k)] = count;
  json out{
      {"replicates", result.replicates},
      {"seed", result.seed},
      {"stratified", result.stratified},
      {"k_policy", result.k_policy == BootstrapConfig::KPolicy::fixed_k ? "fixed" : "reselect"},
      {"k", result.k_reference},
      {"var_s", result.var_s},
      {"ci_95", {result.ci_lower, result.ci_upper}},
      {"k_star_distribution", dist},
      {"redraws", result.redraws},
      {"s_replicates", result.s_replicates},
  };
  if (result.rho_empirical) out["rho_empirical"] = *result.rho_empirical;
  if (result.var_s_analytic_empirical_rho) out["var_s_analytic_empirical_rho"] = *result.var_s_analytic_empirical_rho;
  return out;
}

json enet_to_json(const EnetPath& path, const std::optional<CvResult>& cv) {
  const auto& ids = path.feature_ids;
  json fits = json::array();
  for (const auto& fit : path.fits) {
    json support = json::array();
    for (const auto& [pair, value] : fit.theta) {
      support.push_back({{"numerator", ids.at(pair.first())}, {"denominator", ids.at(pair.second())}, {"coefficient", value}});
    }
    json contrast = json::object();
    for (std::size_t j = 0; j < fit.alpha_contrast.size(); ++j) {
      if (fit.alpha_contrast[j] != 0.0) contrast[ids.at(j)] = fit.alpha_contrast[j];
    }
    fits.push_back({
        {"lambda", fit.lambda},
        {"deviance", fit.deviance},
        {"intercept", fit.intercept},
        {"df", fit.theta.size()},
        {"support", support},
        {"alpha_contrast", contrast},
        {"converged", fit.converged},
        {"iterations", fit.iterations},
        {"kkt_residual", fit.kkt_residual},
    });
  }
  json out{
      {"alpha", path.fits.empty() ? 0.0 : path.fits.front().alpha},
      {"lambda_max", path.lambda_max},
      {"alpha_fallback", path.alpha_fallback},
      {"path", fits},
  };
  if (cv) {
    out["cv"] = {
        {"mean_deviance", cv->mean_deviance},
        {"se_deviance", cv->se_deviance},
        {"lambda_min", cv->lambda_min},
        {"lambda_1se", cv->lambda_1se},
        {"index_min", cv->index_min},
        {"index_1se", cv->index_1se},
        {"attempts", cv->attempts},
    };
  }
  return out;
}

json preprocess_to_json(int samples, int features_in, const std::vector<std::string>& removed,
                        const std::vector<ImputationWarning>& warnings) {
  json listed = json::array();
  for (const auto& w : warnings) {
    listed.push_back({{"sample_id", w.sample_id},
                      {"zero_cells", w.zero_cells},
                      {"replacement", w.replacement},
                      {"smallest_nonzero", w.smallest_nonzero}});
  }
  return json{
      {"samples", samples},
      {"features_in", features_in},
      {"features_kept", features_in - static_cast<int>(removed.size())},
      {"removed_features", removed},
      {"imputation_warnings", listed},
  };
}

json preprocess_to_json(const PreparedData& data) {
  return preprocess_to_json(data.raw.samples(), data.raw.features(), data.removed_features, data.warnings);
}

void write_auc_matrix(const AucMatrix& a, const std::string& path, bool variances) {
  auto out = open_output(path);
  const auto& values = variances ? a.variances : a.values;
  out << "feature";
  for (const auto& id : a.feature_ids) out << ',' << id;
  out << '\n';
  for (int i = 0; i < a.features(); ++i) {
    out << a.feature_ids[i];
    for (int j = 0; j < a.features(); ++j) {
      out << ',';
      if (i != j && std::isfinite(values(i, j))) out << detail::format_double(values(i, j));
    }
    out << '\n';
  }
  if (!out) fail_io("failed writing " + path);
}

void write_real_matrix(const Eigen::MatrixXd& values, const std::vector<std::string>& sample_ids,
                       const std::vector<std::string>& feature_ids, const std::string& path, char delimiter) {
  auto out = open_output(path);
  out << "sample_id";
  for (const auto& id : feature_ids) out << delimiter << id;
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out << sample_ids[i];
    for (Eigen::Index j = 0; j < values.cols(); ++j) out << delimiter << detail::format_double(values(i, j));
    out << '\n';
  }
  if (!out) fail_io("failed writing " + path);
}

}  // namespace codasep
