#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <set>

#include "codasep/error.hpp"
#include "codasep/glm.hpp"
#include "codasep/screening.hpp"
#include "codasep/simdata.hpp"
#include "fixtures.hpp"

using namespace codasep;

TEST_CASE("simulation is deterministic and well formed") {
  SimSpec spec;
  spec.n_per_class = {7, 9, 4};
  spec.m = 12;
  spec.depth = 3000;
  spec.seed = 42;
  const auto a = simulate(spec);
  const auto b = simulate(spec);
  CHECK(a.counts.counts() == b.counts.counts());
  CHECK(a.labels.y() == b.labels.y());
  CHECK(a.labels.class_sizes() == std::vector<int>{7, 9, 4});
  CHECK(a.counts.samples() == 20);
  CHECK(a.counts.features() == 12);
  CHECK(a.counts.feature_ids().front() == "F001");
  CHECK(a.truth == std::vector<int>{0, 1, 2});
  CHECK(a.covariates.empty());
  for (int i = 0; i < 20; ++i) CHECK(a.counts.counts().row(i).sum() == 3000);
  spec.seed = 43;
  CHECK(simulate(spec).counts.counts() != a.counts.counts());

  spec.zero_rate = 0.5;
  const auto z = simulate(spec);
  for (int i = 0; i < 20; ++i) {
    CHECK(z.counts.counts().row(i).sum() >= 1);
    CHECK(z.counts.counts().row(i).sum() <= 3000);
  }
  CHECK((z.counts.counts().array() == 0).count() > 60);
}

TEST_CASE("confounding adds a covariate") {
  SimSpec spec;
  spec.covariate_confounding = 1.0;
  const auto s = simulate(spec);
  CHECK(s.covariates.columns() == 1);
  CHECK(s.confounded_feature == 3);
  spec.confounded_feature = 7;
  CHECK(simulate(spec).confounded_feature == 7);
}

TEST_CASE("invalid specifications are rejected") {
  SimSpec spec;
  spec.signal_features = {25};
  CHECK_THROWS_AS(simulate(spec), Error);
  spec = SimSpec{};
  spec.zero_rate = 1.0;
  CHECK_THROWS_AS(simulate(spec), Error);
  spec = SimSpec{};
  spec.n_per_class = {5};
  CHECK_THROWS_AS(simulate(spec), Error);
}

TEST_CASE("no effect gives AUCs near one half") {
  ScreeningConfig cfg;
  double all_pairs_mean = 0.0;
  for (int seed = 0; seed < 5; ++seed) {
    const auto r = screen(fixture::dataset(fixture::planted(seed, 10, 0.0, 50)), cfg);
    all_pairs_mean += r.s_curve.back() / 5;
    CHECK(r.s < 0.7);
  }
  CHECK(all_pairs_mean > 0.45);
  CHECK(all_pairs_mean < 0.55);
}

TEST_CASE("a strong effect puts the planted features on top") {
  ScreeningConfig cfg;
  for (int seed = 0; seed < 5; ++seed) {
    const auto sim = fixture::planted(seed, 30, 2.0, 50);
    const auto ids = screen(fixture::dataset(sim), cfg).ranked_ids();
    const std::set<std::string> got(ids.begin(), ids.begin() + 3);
    CHECK(got == std::set<std::string>{"F001", "F002", "F003"});
  }
}

TEST_CASE("adjusting for the confounder removes its apparent signal") {
  // The adjusted model also carries the covariate's own signal, so the
  // comparison is the lift over the covariate-only model.
  int agree = 0;
  for (int seed = 0; seed < 10; ++seed) {
    SimSpec spec;
    spec.n_per_class = {100, 100};
    spec.m = 6;
    spec.signal_features = {0};
    spec.effect_size = 1.0;
    spec.covariate_confounding = 1.2;
    spec.seed = 200 + static_cast<std::uint64_t>(seed);
    const auto sim = simulate(spec);
    const int c = sim.confounded_feature;
    const int other = c == 5 ? 4 : 5;

    ScreeningConfig cfg;
    const double unadjusted = compute_auc_matrix(fixture::dataset(sim, false), cfg).values(c, other);
    const auto ds = fixture::dataset(sim, true);
    const double adjusted = compute_auc_matrix(ds, cfg).values(c, other);

    const std::vector<double> constant(ds.samples(), 0.0);
    GlmSpec base;
    base.predictor = constant;
    base.labels = ds.labels().y();
    base.covariates = &ds.covariates().values();
    const auto f = fit_multinomial(base);
    std::vector<double> s(ds.samples());
    for (int i = 0; i < ds.samples(); ++i) s[i] = f.log_probs(i, 0);
    const double covariate_only = binary_estimate(s, ds.labels().y(), VarianceMethod::hanley).value;

    CHECK(unadjusted > 0.55);
    if (adjusted - covariate_only < unadjusted - 0.5) ++agree;
  }
  CHECK(agree >= 9);
}
