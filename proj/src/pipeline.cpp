#include "codasep/pipeline.hpp"

#include "codasep/error.hpp"

namespace codasep {

PreparedData prepare(const CountTable& raw, const Labels& labels, const CovariateMatrix& covariates,
                     const PreprocessOptions& options) {
  if (labels.size() != raw.samples()) fail_validation("labels do not match the count table");
  auto filtered = filter_rare(raw, options.min_nonzero);
  auto imputed = impute_zeros(filtered.table, options.prior_strength, options.seed);
  Dataset ds(std::move(imputed.composition), labels, covariates.columns() == 0 ? CovariateMatrix(raw.samples()) : covariates);
  return PreparedData{raw, std::move(filtered.removed), std::move(imputed.warnings), std::move(ds)};
}

PreparedData load_and_prepare(const std::string& counts_path, const std::string& metadata_path,
                              const std::string& label_column, const std::vector<std::string>& covariates,
                              const PreprocessOptions& options, std::optional<char> delimiter) {
  const auto raw = read_count_table(counts_path, delimiter);
  const auto meta = read_metadata(metadata_path, label_column, covariates, raw.sample_ids(), delimiter);
  return prepare(raw, meta.labels, meta.covariates, options);
}

}  // namespace codasep
