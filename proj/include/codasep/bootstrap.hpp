#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "codasep/datamodel.hpp"
#include "codasep/screening.hpp"

namespace codasep {

struct BootstrapConfig {
  enum class KPolicy { fixed_k, reselect_each_replicate };

  int replicates = 200;
  bool stratified = true;
  std::uint64_t seed = 0;
  int workers = 1;
  KPolicy k_policy = KPolicy::fixed_k;
  /// fixed k; 0 means the k* of the original data
  int fixed_k = 0;
  /// estimate rho_otu from the replicate AUC matrices
  bool estimate_rho = false;

  void validate() const;
};

/// Raw counts and preprocessing settings, for re-running filtering and
/// imputation inside each replicate.
struct ReimputeSource {
  CountTable counts;  // before rare-feature filtering, rows aligned with the dataset
  int min_nonzero = 3;
  double prior_strength = 0.5;
};

struct BootstrapResult {
  std::vector<double> s_replicates;
  double var_s = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  /// k used on the original data and per replicate policy
  int k_reference = 2;
  /// each replicate's own argmax of S_k
  std::map<int, int> k_star_distribution;
  std::uint64_t seed = 0;
  int replicates = 0;
  bool stratified = true;
  BootstrapConfig::KPolicy k_policy = BootstrapConfig::KPolicy::fixed_k;
  /// rho from replicate correlations of AUCs of top-k pairs sharing a feature
  std::optional<double> rho_empirical;
  /// analytic Var(S_k) of the original data at rho_empirical
  std::optional<double> var_s_analytic_empirical_rho;
  int redraws = 0;
};

/// Deterministic replicate index vector: class counts are preserved when
/// stratified. Depends only on (seed, replicate, labels).
std::vector<int> bootstrap_indices(const Labels& labels, bool stratified, std::uint64_t seed, int replicate,
                                   int* redraws = nullptr);

/// Resamples samples with replacement, recomputes the full AUC matrix,
/// ranking and S for each replicate. Replicates run in parallel; each uses its
/// own random stream derived from (seed, replicate), so the result does not
/// depend on the worker count.
BootstrapResult bootstrap_s(const Dataset& ds, const ScreeningConfig& scfg, const BootstrapConfig& bcfg,
                            const std::optional<ReimputeSource>& reimpute = std::nullopt);

/// Linear interpolation between order statistics (h = (B - 1) p).
double percentile(std::vector<double> values, double p);

}  // namespace codasep
