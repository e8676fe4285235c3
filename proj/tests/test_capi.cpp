#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>

#include "codasep/codasep.h"
#include "json.hpp"
#include "oracles.hpp"

using nlohmann::json;

namespace {

json take_json(char* s) {
  REQUIRE(s != nullptr);
  auto j = json::parse(s);
  codasep_string_free(s);
  return j;
}

codasep_simulation* make_sim(int m, double effect, int per_class, uint64_t seed) {
  const int sizes[2] = {per_class, per_class};
  codasep_sim_options o;
  codasep_sim_options_init(&o);
  o.n_per_class = sizes;
  o.classes = 2;
  o.m = m;
  o.effect_size = effect;
  o.seed = seed;
  codasep_simulation* sim = nullptr;
  REQUIRE(codasep_simulate(&o, &sim) == CODASEP_OK);
  return sim;
}

}  // namespace

TEST_CASE("option defaults") {
  codasep_screen_options s;
  codasep_screen_options_init(&s);
  CHECK(s.rho_otu == 0.2);
  CHECK(s.variance == CODASEP_VARIANCE_HANLEY);
  CHECK(s.workers == 1);
  CHECK(s.use_covariates == 1);

  codasep_bootstrap_options b;
  codasep_bootstrap_options_init(&b);
  CHECK(b.replicates == 200);
  CHECK(b.stratified == 1);
  CHECK(b.k == 0);

  codasep_enet_options e;
  codasep_enet_options_init(&e);
  CHECK(e.alpha == 0.5);
  CHECK(e.nlambda == 100);
  CHECK(e.lambda_min_ratio == 1e-3);
  CHECK(e.lambdas == nullptr);

  codasep_preprocess_options p;
  codasep_preprocess_options_init(&p);
  CHECK(p.min_nonzero == 3);
  CHECK(p.prior_strength == 0.5);
  CHECK(std::strlen(codasep_version()) > 0);
}

TEST_CASE("dataset from arrays, screening and report accessors") {
  const int n = 8;
  const int m = 3;
  const int64_t counts[n * m] = {90, 10, 30, 80, 12, 25, 85, 9, 40, 70, 11, 33,
                                 10, 90, 30, 12, 80, 28, 9, 85, 31, 11, 70, 35};
  const char* samples[n] = {"a", "b", "c", "d", "e", "f", "g", "h"};
  const char* features[m] = {"x", "y", "z"};
  const char* labels[n] = {"case", "case", "case", "case", "ctrl", "ctrl", "ctrl", "ctrl"};
  codasep_dataset* ds = nullptr;
  REQUIRE(codasep_dataset_from_arrays(counts, n, m, samples, features, labels, nullptr, 0, nullptr, nullptr, &ds) ==
          CODASEP_OK);
  CHECK(codasep_dataset_samples(ds) == 8);
  CHECK(codasep_dataset_features(ds) == 3);
  CHECK(codasep_dataset_classes(ds) == 2);

  codasep_report* r = nullptr;
  REQUIRE(codasep_screen(ds, nullptr, &r) == CODASEP_OK);
  CHECK(codasep_report_k_star(r) >= 2);
  const std::string best = codasep_report_ranked_feature(r, 0);
  CHECK((best == "x" || best == "y"));
  CHECK(codasep_report_ranked_feature(r, 3) == nullptr);
  CHECK(std::isnan(codasep_report_auc(r, 1, 1)));
  CHECK(codasep_report_auc(r, 0, 1) == 1.0);
  CHECK(codasep_report_auc(r, 0, 1) == codasep_report_auc(r, 1, 0));
  double lo = 0;
  double hi = 0;
  codasep_report_ci(r, &lo, &hi);
  CHECK(lo <= codasep_report_s(r));
  CHECK(codasep_report_s(r) <= hi);

  char* text = nullptr;
  REQUIRE(codasep_report_json(r, &text) == CODASEP_OK);
  const auto j = take_json(text);
  for (const char* key : {"ranking", "column_scores", "s_curve", "k_star", "s", "var_s", "ci_95", "config", "failures"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["k_star"].get<int>() == codasep_report_k_star(r));
  CHECK(j["ranking"].size() == 3);

  const auto dir = oracle::scratch_dir("capi_matrix");
  REQUIRE(codasep_report_write_auc_matrix(r, (dir / "a.csv").string().c_str()) == CODASEP_OK);
  CHECK(oracle::read_file(dir / "a.csv").rfind("feature,x,y,z", 0) == 0);

  codasep_report_free(r);
  codasep_dataset_free(ds);
}

TEST_CASE("errors carry a status and a message") {
  codasep_dataset* ds = nullptr;
  CHECK(codasep_dataset_load("/nonexistent/c.csv", "/nonexistent/m.csv", "dx", nullptr, 0, nullptr, &ds) ==
        CODASEP_ERR_IO);
  CHECK(ds == nullptr);
  CHECK(std::string(codasep_last_error()).find("/nonexistent/c.csv") != std::string::npos);

  CHECK(codasep_screen(nullptr, nullptr, nullptr) == CODASEP_ERR_ARGUMENT);

  codasep_sim_options o;
  codasep_sim_options_init(&o);
  o.zero_rate = 2.0;
  codasep_simulation* sim = nullptr;
  CHECK(codasep_simulate(&o, &sim) == CODASEP_ERR_VALIDATION);
  CHECK(std::string(codasep_last_error()).find("zero_rate") != std::string::npos);

  // freeing null handles is a no-op
  codasep_dataset_free(nullptr);
  codasep_report_free(nullptr);
  codasep_string_free(nullptr);
}

TEST_CASE("simulate, write, load and analyse") {
  codasep_simulation* sim = make_sim(8, 1.5, 30, 5);
  const auto dir = oracle::scratch_dir("capi_sim");
  const auto counts = (dir / "counts.csv").string();
  const auto meta = (dir / "meta.csv").string();
  REQUIRE(codasep_simulation_write(sim, counts.c_str(), meta.c_str(), "group") == CODASEP_OK);
  char* truth = nullptr;
  REQUIRE(codasep_simulation_json(sim, &truth) == CODASEP_OK);
  const auto t = take_json(truth);
  CHECK(t["signal_features"] == json::array({"F001", "F002", "F003"}));

  codasep_dataset* from_sim = nullptr;
  REQUIRE(codasep_dataset_from_simulation(sim, nullptr, &from_sim) == CODASEP_OK);
  codasep_dataset* loaded = nullptr;
  REQUIRE(codasep_dataset_load(counts.c_str(), meta.c_str(), "group", "", 0, nullptr, &loaded) == CODASEP_OK);

  codasep_report* a = nullptr;
  codasep_report* b = nullptr;
  REQUIRE(codasep_screen(from_sim, nullptr, &a) == CODASEP_OK);
  REQUIRE(codasep_screen(loaded, nullptr, &b) == CODASEP_OK);
  char* ja = nullptr;
  char* jb = nullptr;
  codasep_report_json(a, &ja);
  codasep_report_json(b, &jb);
  CHECK(std::string(ja) == std::string(jb));
  codasep_string_free(ja);
  codasep_string_free(jb);

  codasep_bootstrap_options bo;
  codasep_bootstrap_options_init(&bo);
  bo.replicates = 6;
  bo.seed = 3;
  codasep_bootstrap* boot = nullptr;
  REQUIRE(codasep_bootstrap_run(loaded, nullptr, &bo, &boot) == CODASEP_OK);
  CHECK(codasep_bootstrap_var_s(boot) >= 0.0);
  char* jboot = nullptr;
  REQUIRE(codasep_bootstrap_json(boot, &jboot) == CODASEP_OK);
  CHECK(take_json(jboot)["s_replicates"].size() == 6);

  codasep_enet_options eo;
  codasep_enet_options_init(&eo);
  eo.nlambda = 10;
  codasep_enet* en = nullptr;
  REQUIRE(codasep_enet_fit(loaded, &eo, &en) == CODASEP_OK);
  CHECK(codasep_enet_path_length(en) == 10);
  CHECK(codasep_enet_support_size(en, 0) == 0);
  CHECK(codasep_enet_lambda(en, 0) > codasep_enet_lambda(en, 9));
  CHECK(codasep_enet_deviance(en, 9) <= codasep_enet_deviance(en, 0));
  char* jen = nullptr;
  REQUIRE(codasep_enet_json(en, &jen) == CODASEP_OK);
  CHECK(take_json(jen)["path"].size() == 10);

  codasep_enet_free(en);
  codasep_bootstrap_free(boot);
  codasep_report_free(a);
  codasep_report_free(b);
  codasep_dataset_free(from_sim);
  codasep_dataset_free(loaded);
  codasep_simulation_free(sim);
}

TEST_CASE("preprocess without labels") {
  const auto dir = oracle::scratch_dir("capi_pre");
  const auto in = oracle::write_file(dir / "c.csv", "sample_id,a,b,c,d\ns1,0,5,5,0\ns2,3,4,1,0\ns3,2,2,2,1\ns4,1,0,9,0\n");
  const auto comp = (dir / "comp.csv").string();
  const auto side = (dir / "side.json").string();
  REQUIRE(codasep_preprocess_file(in.c_str(), 0, nullptr, comp.c_str(), nullptr, side.c_str()) == CODASEP_OK);
  const auto j = json::parse(oracle::read_file(side));
  CHECK(j["removed_features"] == json::array({"d"}));
  CHECK(oracle::read_file(comp).rfind("sample_id,a,b,c\n", 0) == 0);
}
