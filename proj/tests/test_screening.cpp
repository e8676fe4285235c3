#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "codasep/error.hpp"
#include "codasep/glm.hpp"
#include "codasep/preprocess.hpp"
#include "codasep/screening.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace codasep;
using doctest::Approx;

namespace {

AucMatrix matrix_of(const Eigen::MatrixXd& upper, double variance = 0.0) {
  const auto m = upper.rows();
  AucMatrix a;
  a.values = Eigen::MatrixXd::Constant(m, m, std::nan(""));
  a.variances = Eigen::MatrixXd::Constant(m, m, std::nan(""));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      a.values(i, j) = a.values(j, i) = upper(i, j);
      a.variances(i, j) = a.variances(j, i) = variance;
    }
  }
  a.feature_ids = fixture::ids("f", static_cast<int>(m));
  return a;
}

std::set<std::string> planted_ids(const Simulation& sim) {
  std::set<std::string> out;
  for (int j : sim.truth) out.insert(sim.counts.feature_ids()[j]);
  return out;
}

std::set<std::string> top(const SeparabilityReport& r, int k) {
  const auto ids = r.ranked_ids();
  return {ids.begin(), ids.begin() + k};
}

}  // namespace

TEST_CASE("three features give three symmetric fits") {
  const auto sim = fixture::planted(3, 3, 1.0, 20, {0});
  const auto ds = fixture::dataset(sim, false);
  ScreeningConfig cfg;
  const auto a = compute_auc_matrix(ds, cfg);
  REQUIRE(a.features() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::isnan(a.values(i, i)));
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(a.values(i, j) == a.values(j, i));
      CHECK(a.variances(i, j) == a.variances(j, i));
      CHECK(a.values(i, j) >= 0.0);
      CHECK(a.values(i, j) <= 1.0);
    }
  }
  CHECK(a.failures.empty());
}

TEST_CASE("matrix entries equal the brute-force auc of the fitted scores") {
  const auto sim = fixture::planted(8, 5, 1.0, 25);
  const auto ds = fixture::dataset(sim);
  ScreeningConfig cfg;
  const auto a = compute_auc_matrix(ds, cfg);
  const auto& y = ds.labels().y();
  std::vector<std::uint8_t> pos(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) pos[i] = y[i] == 0;
  for (const auto& p : all_pairs(5)) {
    const Eigen::VectorXd z = pairwise_logratio(ds.composition(), p);
    const std::vector<double> zv(z.data(), z.data() + z.size());
    GlmSpec spec;
    spec.predictor = zv;
    spec.labels = y;
    spec.covariates = &ds.covariates().values();
    const auto f = fit_multinomial(spec);
    // log-odds of class 0 rebuilt from the original-scale coefficients
    std::vector<double> s(y.size());
    const auto& x = ds.covariates().values();
    for (std::size_t i = 0; i < y.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      s[i] = f.coefficients(0, 0) + f.coefficients(0, 1) * z(r);
      for (Eigen::Index c = 0; c < x.cols(); ++c) s[i] += f.coefficients(0, 2 + c) * x(r, c);
    }
    const double want = oracle::auc(s, pos);
    CHECK(a.values(p.first(), p.second()) == Approx(want).epsilon(1e-12));
    CHECK(a.variances(p.first(), p.second()) == Approx(oracle::hanley(want, 25, 25)).epsilon(1e-12));
  }
}

TEST_CASE("ranking by column sums") {
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(3, 3);
  u(0, 1) = 0.9;
  u(0, 2) = 0.8;
  u(1, 2) = 0.6;
  const auto r = rank_features(matrix_of(u));
  CHECK(r.order == std::vector<int>{0, 1, 2});
  CHECK(r.column_scores[0] == Approx(1.7));
  CHECK(r.column_scores[1] == Approx(1.5));
  CHECK(r.column_scores[2] == Approx(1.4));

  // all equal: id order, which is string order
  auto flat = matrix_of(Eigen::MatrixXd::Constant(4, 4, 0.6));
  flat.feature_ids = {"b", "d", "a", "c"};
  CHECK(rank_features(flat).order == std::vector<int>{2, 0, 3, 1});
}

TEST_CASE("curve, k* and variance of S_k") {
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(3, 3);
  u(0, 1) = 0.9;
  u(0, 2) = 0.8;
  u(1, 2) = 0.7;
  const auto a = matrix_of(u, 0.01);
  const std::vector<int> order{0, 1, 2};
  const auto curve = separability_curve(a, order);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0] == 0.9);
  CHECK(curve[1] == Approx(0.8).epsilon(1e-15));
  CHECK(select_k(curve) == 2);
  CHECK(select_k({0.6, 0.7, 0.7, 0.65}) == 3);

  CHECK(var_s_k(a, order, 2, 0.2) == Approx(0.01).epsilon(1e-14));
  CHECK(var_s_k(a, order, 3, 0.0) == Approx(0.01 / 3).epsilon(1e-14));
  CHECK(var_s_k(a, order, 3, 0.2) == Approx(0.01 * 1.4 / 3).epsilon(1e-14));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const int m = 9;
    Eigen::MatrixXd vals(m, m);
    Eigen::MatrixXd vars(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        vals(i, j) = un(rng);
        vars(i, j) = vars(j, i) = 0.01 * un(rng);
      }
    }
    auto am = matrix_of(vals);
    am.variances = vars;
    std::vector<int> ord(m);
    for (int i = 0; i < m; ++i) ord[i] = i;
    std::shuffle(ord.begin(), ord.end(), rng);
    const double rho = un(rng);
    for (int k = 2; k <= m; ++k) {
      CHECK(var_s_k(am, ord, k, rho) == Approx(oracle::var_s(vars, ord, k, rho)).epsilon(1e-12));
    }
  }
}

TEST_CASE("report invariants") {
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(4, 4);
  u(0, 1) = 0.9;
  u(0, 2) = 0.85;
  u(1, 2) = 0.8;
  u(0, 3) = 0.5;
  u(1, 3) = 0.55;
  u(2, 3) = 0.52;
  ScreeningConfig cfg;
  const auto zero = build_report(matrix_of(u, 0.0), cfg);
  CHECK(zero.k_star == 2);
  CHECK(zero.s == 0.9);
  CHECK(zero.ci_lower == zero.s);
  CHECK(zero.ci_upper == zero.s);

  const auto r = build_report(matrix_of(u, 0.002), cfg);
  CHECK(r.var_s == Approx(0.002).epsilon(1e-14));
  CHECK(r.ci_lower == Approx(0.9 - 1.96 * std::sqrt(0.002)).epsilon(1e-12));
  CHECK(r.ci_upper == Approx(0.9 + 1.96 * std::sqrt(0.002)).epsilon(1e-12));
  u(0, 1) = 0.99;
  CHECK(build_report(matrix_of(u, 0.002), cfg).ci_upper == 1.0);
  for (double s : r.s_curve) CHECK(s <= r.s);
}

TEST_CASE("a separating feature dominates the ranking") {
  std::mt19937_64 rng(12);
  std::lognormal_distribution<double> ln(0.0, 0.5);
  const int n = 40;
  const int m = 6;
  Eigen::MatrixXd v(n, m);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = i < n / 2 ? 0 : 1;
    for (int j = 0; j < m; ++j) v(i, j) = ln(rng);
    v(i, 0) *= y[i] == 0 ? 50.0 : 0.02;
  }
  ScreeningConfig cfg;
  AucMatrix a;
  const auto r = screen(fixture::dataset(v, y, 2), cfg, &a);
  CHECK(r.ranking.order.front() == 0);
  for (int j = 1; j < m; ++j) CHECK(a.values(0, j) == 1.0);
  CHECK(a.separated_pairs == m - 1);
}

TEST_CASE("fitted scores preserve the ranking of the log-ratio") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 50;
    std::vector<double> z(n);
    std::vector<int> y(n);
    std::vector<std::uint8_t> pos(n);
    for (int i = 0; i < n; ++i) {
      y[i] = i % 2;
      pos[i] = y[i] == 0;
      z[i] = nd(rng) + 0.5 * (rep % 3) * y[i];
    }
    GlmSpec spec;
    spec.predictor = z;
    spec.labels = y;
    const auto f = fit_multinomial(spec);
    const auto s = binary_score(f);
    const double u = oracle::auc(z, pos);
    const double got = binary_auc(std::vector<double>(s.data(), s.data() + s.size()), pos);
    // the score is monotone in z, in the direction of the fitted slope
    const double want = f.coefficients(0, 1) > 0 ? u : 1 - u;
    CHECK(std::abs(got - want) <= 1e-9);
    // slope and rank direction agree unless u is close to 1/2
    if (std::abs(u - 0.5) >= 0.1) CHECK(std::abs(got - std::max(u, 1 - u)) <= 1e-9);
  }
}

TEST_CASE("permuting features permutes the matrix") {
  const auto sim = fixture::planted(21, 6, 1.2, 30);
  const auto ds = fixture::dataset(sim);
  const std::vector<int> perm{3, 0, 5, 1, 4, 2};
  Eigen::MatrixXd pv(ds.samples(), 6);
  std::vector<std::string> pids;
  for (int j = 0; j < 6; ++j) {
    pv.col(j) = ds.composition().values().col(perm[j]);
    pids.push_back(ds.composition().feature_ids()[perm[j]]);
  }
  const Composition pc(pv, ds.composition().sample_ids(), pids, ds.composition().row_totals());
  const Dataset pds(pc, ds.labels(), ds.covariates());
  ScreeningConfig cfg;
  const auto a = compute_auc_matrix(ds, cfg);
  const auto b = compute_auc_matrix(pds, cfg);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i != j) CHECK(std::abs(b.values(i, j) - a.values(perm[i], perm[j])) <= 1e-12);
    }
  }
  CHECK(screen(pds, cfg).ranked_ids() == screen(ds, cfg).ranked_ids());
}

TEST_CASE("worker count does not change the result") {
  const auto sim = fixture::planted(4, 12, 1.0, 30);
  const auto ds = fixture::dataset(sim);
  ScreeningConfig one;
  ScreeningConfig many;
  many.workers = 3;
  AucMatrix a;
  AucMatrix b;
  const auto r1 = screen(ds, one, &a);
  const auto r3 = screen(ds, many, &b);
  CHECK(a.values.cwiseEqual(b.values).count() + 12 == 144);  // NaN diagonal never compares equal
  CHECK(r1.s_curve == r3.s_curve);
  CHECK(r1.ranking.order == r3.ranking.order);
  CHECK(r1.var_s == r3.var_s);
}

TEST_CASE("S_k lies between the extreme entries of its pairs") {
  const auto sim = fixture::planted(5, 10, 0.8, 25);
  ScreeningConfig cfg;
  AucMatrix a;
  const auto r = screen(fixture::dataset(sim), cfg, &a);
  for (int k = 2; k <= 10; ++k) {
    double lo = 1.0;
    double hi = 0.0;
    for (int x = 0; x < k; ++x) {
      for (int w = x + 1; w < k; ++w) {
        const double v = a.values(r.ranking.order[x], r.ranking.order[w]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    CHECK(r.s_curve[k - 2] >= lo - 1e-15);
    CHECK(r.s_curve[k - 2] <= hi + 1e-15);
  }
}

TEST_CASE("an extra noise feature leaves the planted top three in place") {
  int kept = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto sim = fixture::planted(1000 + rep, 9, 1.5, 50);
    const auto ds = fixture::dataset(sim, false);
    // append an unrelated feature
    std::mt19937_64 rng(77 + rep);
    std::lognormal_distribution<double> ln(std::log(500.0), 1.0);
    Eigen::MatrixXd v(ds.samples(), 10);
    v.leftCols(9) = ds.composition().values();
    for (int i = 0; i < ds.samples(); ++i) v(i, 9) = ln(rng);
    auto fids = ds.composition().feature_ids();
    fids.push_back("noise");
    const Dataset wider(Composition(v, ds.composition().sample_ids(), fids, v.rowwise().sum()), ds.labels(),
                        ds.covariates());
    ScreeningConfig cfg;
    if (top(screen(wider, cfg), 3) == planted_ids(sim)) ++kept;
  }
  CHECK(kept >= 90);
}

TEST_CASE("configuration is validated") {
  ScreeningConfig cfg;
  cfg.rho_otu = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.rho_otu = 0.2;
  cfg.variance_method = VarianceMethod::bootstrap;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
