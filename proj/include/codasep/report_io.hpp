#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "codasep/bootstrap.hpp"
#include "codasep/enet.hpp"
#include "codasep/pipeline.hpp"
#include "codasep/preprocess.hpp"
#include "codasep/screening.hpp"

namespace codasep {

/// {ranking, column_scores, s_curve, k_star, s, var_s, ci_95, config, failures, ...}.
/// column_scores and ranking are aligned (best first); s_curve[i] is S at k = i + 2.
nlohmann::json report_to_json(const SeparabilityReport& report);

nlohmann::json bootstrap_to_json(const BootstrapResult& result);

nlohmann::json enet_to_json(const EnetPath& path, const std::optional<CvResult>& cv);

/// Removed features and imputation warnings.
nlohmann::json preprocess_to_json(const PreparedData& data);
nlohmann::json preprocess_to_json(int samples, int features_in, const std::vector<std::string>& removed,
                                  const std::vector<ImputationWarning>& warnings);

/// Square CSV with feature ids as header and first column; diagonal left empty.
/// Writes the variance matrix when `variances` is true.
void write_auc_matrix(const AucMatrix& a, const std::string& path, bool variances = false);

/// Samples x features real matrix with 17 significant digits.
void write_real_matrix(const Eigen::MatrixXd& values, const std::vector<std::string>& sample_ids,
                       const std::vector<std::string>& feature_ids, const std::string& path, char delimiter = ',');

}  // namespace codasep
