#include "codasep/simdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "codasep/error.hpp"

namespace codasep {

void SimSpec::validate() const {
  if (n_per_class.size() < 2) fail_validation("simulation needs at least 2 classes");
  for (int n : n_per_class) {
    if (n < 1) fail_validation("every class needs at least one sample");
  }
  if (m < 2) fail_validation("simulation needs m >= 2");
  for (int s : signal_features) {
    if (s < 0 || s >= m) fail_validation("signal feature index out of range");
  }
  if (!std::isfinite(effect_size)) fail_validation("effect size must be finite");
  if (!base_concentration.empty()) {
    if (static_cast<int>(base_concentration.size()) != m) fail_validation("base concentration needs m entries");
    for (double b : base_concentration) {
      if (!(b > 0.0)) fail_validation("base concentration must be positive");
    }
  }
  if (!(noise_sd >= 0.0)) fail_validation("noise_sd must be >= 0");
  if (depth < 1) fail_validation("depth must be >= 1");
  if (!(zero_rate >= 0.0 && zero_rate < 1.0)) fail_validation("zero_rate must lie in [0, 1)");
  if (covariate_confounding && !std::isfinite(*covariate_confounding)) fail_validation("confounding must be finite");
  if (confounded_feature >= m) fail_validation("confounded feature out of range");
}

namespace {

std::string numbered(const char* prefix, int value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, value);
  return buf;
}

}  // namespace

Simulation simulate(const SimSpec& spec) {
  spec.validate();
  const int classes = static_cast<int>(spec.n_per_class.size());
  const int m = spec.m;
  int n = 0;
  for (int c : spec.n_per_class) n += c;

  std::vector<double> shift_sign(m, 0.0);
  for (std::size_t s = 0; s < spec.signal_features.size(); ++s) {
    shift_sign[spec.signal_features[s]] = s % 2 == 0 ? 1.0 : -1.0;
  }
  int confounded = -1;
  if (spec.covariate_confounding) {
    confounded = spec.confounded_feature;
    for (int j = 0; confounded < 0 && j < m; ++j) {
      if (shift_sign[j] == 0.0) confounded = j;
    }
    if (confounded < 0) fail_validation("no feature left to confound");
  }
  std::vector<double> base(m, 0.0);
  for (int j = 0; j < m; ++j) base[j] = spec.base_concentration.empty() ? 0.0 : std::log(spec.base_concentration[j]);

  std::vector<int> y;
  for (int c = 0; c < classes; ++c) y.insert(y.end(), spec.n_per_class[c], c);

  CountMatrix counts(n, m);
  Eigen::VectorXd covariate(n);
  for (int i = 0; i < n; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(i), 0x51A7u};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double level = static_cast<double>(classes - 1 - y[i]);

    std::vector<double> u(m);
    for (int j = 0; j < m; ++j) {
      u[j] = base[j] + shift_sign[j] * spec.effect_size * level + spec.noise_sd * normal(rng);
    }
    if (spec.covariate_confounding) {
      const double g = *spec.covariate_confounding;
      covariate[i] = g * level + normal(rng);
      u[confounded] += g * covariate[i];
    }
    const double mx = *std::max_element(u.begin(), u.end());
    std::vector<double> prob(m);
    double total = 0.0;
    for (int j = 0; j < m; ++j) total += prob[j] = std::exp(u[j] - mx);

    // Sequential conditional binomials give an exact multinomial draw.
    int remaining = spec.depth;
    double mass = 1.0;
    for (int j = 0; j < m; ++j) {
      const double pj = prob[j] / total;
      int draw = 0;
      if (j == m - 1) {
        draw = remaining;
      } else if (remaining > 0 && pj > 0.0) {
        std::binomial_distribution<int> binom(remaining, std::clamp(pj / mass, 0.0, 1.0));
        draw = binom(rng);
      }
      counts(i, j) = draw;
      remaining -= draw;
      mass -= pj;
    }
    if (spec.zero_rate > 0.0) {
      std::bernoulli_distribution drop(spec.zero_rate);
      int largest = 0;
      for (int j = 0; j < m; ++j) {
        if (counts(i, j) > counts(i, largest)) largest = j;
      }
      for (int j = 0; j < m; ++j) {
        if (drop(rng) && j != largest) counts(i, j) = 0;
      }
    }
  }

  std::vector<std::string> samples;
  std::vector<std::string> features;
  for (int i = 0; i < n; ++i) samples.push_back(numbered("S", i + 1, 4));
  for (int j = 0; j < m; ++j) features.push_back(numbered("F", j + 1, 3));

  std::vector<std::string> class_names;
  for (int c = 0; c < classes; ++c) class_names.push_back(numbered("class", c + 1, 2));
  CovariateMatrix cov = spec.covariate_confounding ? CovariateMatrix(covariate, {"confounder"}) : CovariateMatrix(n);

  return Simulation{CountTable(std::move(counts), std::move(samples), std::move(features)),
                    Labels(std::move(y), std::move(class_names)), std::move(cov), spec.signal_features, confounded};
}

}  // namespace codasep
