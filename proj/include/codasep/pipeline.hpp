#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "codasep/datamodel.hpp"
#include "codasep/preprocess.hpp"

namespace codasep {

struct PreprocessOptions {
  int min_nonzero = 3;
  double prior_strength = 0.5;
  std::uint64_t seed = 0;
};

/// Raw table, its filtered/imputed forms and the analysis dataset.
struct PreparedData {
  CountTable raw;
  std::vector<std::string> removed_features;
  std::vector<ImputationWarning> warnings;
  Dataset dataset;
};

PreparedData prepare(const CountTable& raw, const Labels& labels, const CovariateMatrix& covariates,
                     const PreprocessOptions& options);

/// Reads counts and metadata from disk and prepares them.
PreparedData load_and_prepare(const std::string& counts_path, const std::string& metadata_path,
                              const std::string& label_column, const std::vector<std::string>& covariates,
                              const PreprocessOptions& options, std::optional<char> delimiter = {});

}  // namespace codasep
