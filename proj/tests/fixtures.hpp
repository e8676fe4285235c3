#pragma once

// Small builders shared by the tests.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "codasep/datamodel.hpp"
#include "codasep/pipeline.hpp"
#include "codasep/simdata.hpp"

namespace fixture {

inline std::vector<std::string> ids(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Dataset straight from positive values (rows = samples).
inline codasep::Dataset dataset(const Eigen::MatrixXd& values, const std::vector<int>& y, int classes,
                                const Eigen::MatrixXd& covariates = Eigen::MatrixXd()) {
  std::vector<std::string> names;
  for (int c = 0; c < classes; ++c) names.push_back("c" + std::to_string(c));
  codasep::Composition comp(values, ids("s", static_cast<int>(values.rows())), ids("f", static_cast<int>(values.cols())),
                            values.rowwise().sum());
  codasep::CovariateMatrix cov;
  if (covariates.cols() > 0) cov = codasep::CovariateMatrix(covariates, ids("x", static_cast<int>(covariates.cols())));
  return codasep::Dataset(comp, codasep::Labels(y, names), cov);
}

inline codasep::Dataset dataset(const codasep::Simulation& sim, bool with_covariates = true) {
  const auto prepared = codasep::prepare(sim.counts, sim.labels,
                                         with_covariates ? sim.covariates : codasep::CovariateMatrix(), {});
  return prepared.dataset;
}

inline codasep::Simulation planted(std::uint64_t seed, int m, double effect, int n_per_class,
                                   std::vector<int> signal = {0, 1, 2}) {
  codasep::SimSpec spec;
  spec.n_per_class = {n_per_class, n_per_class};
  spec.m = m;
  spec.signal_features = std::move(signal);
  spec.effect_size = effect;
  spec.seed = seed;
  return codasep::simulate(spec);
}

}  // namespace fixture
