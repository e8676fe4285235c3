#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "codasep/datamodel.hpp"

namespace codasep {

/// Logistic-normal-multinomial generator with planted discriminant features.
///
/// Sample i of class c draws log-abundances u_ij ~ N(log base_j + shift_cj, noise_sd^2).
/// The s-th signal feature (0-based position in `signal_features`) is shifted
/// by (+1 or -1 alternating with s) * effect_size * (C - 1 - c), so the
/// baseline class is unshifted and signal features are pairwise contrasting.
/// With confounding strength g, a covariate x_i ~ N(g (C - 1 - c), 1) is
/// emitted and adds g x_i to `confounded_feature`. Counts are a multinomial
/// draw of `depth` reads from softmax(u); cells are then zeroed independently
/// with probability zero_rate (keeping at least one read per sample).
struct SimSpec {
  std::vector<int> n_per_class{50, 50};
  int m = 20;
  std::vector<int> signal_features{0, 1, 2};
  double effect_size = 1.0;
  std::optional<double> covariate_confounding;
  int confounded_feature = -1;  // -1: first feature that is not a signal
  /// per-feature base abundance; empty means uniform
  std::vector<double> base_concentration;
  double noise_sd = 1.0;
  int depth = 5000;
  double zero_rate = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Simulation {
  CountTable counts;
  Labels labels;
  CovariateMatrix covariates;
  std::vector<int> truth;
  int confounded_feature = -1;
};

/// Samples are emitted class by class; ids are S0001.., features F001..,
/// classes class01...
Simulation simulate(const SimSpec& spec);

}  // namespace codasep
