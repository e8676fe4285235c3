#include "codasep/codasep.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "codasep/bootstrap.hpp"
#include "codasep/enet.hpp"
#include "codasep/error.hpp"
#include "codasep/pipeline.hpp"
#include "codasep/report_io.hpp"
#include "codasep/screening.hpp"
#include "codasep/simdata.hpp"

struct codasep_dataset {
  codasep::PreparedData data;
  codasep::PreprocessOptions options;
};

struct codasep_report {
  codasep::SeparabilityReport report;
  codasep::AucMatrix matrix;
  std::vector<std::string> ranked;
};

struct codasep_bootstrap {
  codasep::BootstrapResult result;
};

struct codasep_enet {
  codasep::EnetPath path;
  std::optional<codasep::CvResult> cv;
};

struct codasep_simulation {
  codasep::Simulation sim;
};

namespace {

thread_local std::string last_error;

codasep_status fail(codasep_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <typename F>
codasep_status guarded(F&& body) {
  try {
    body();
    return CODASEP_OK;
  } catch (const codasep::Error& e) {
    switch (e.kind()) {
      case codasep::ErrorKind::validation: return fail(CODASEP_ERR_VALIDATION, e.what());
      case codasep::ErrorKind::io: return fail(CODASEP_ERR_IO, e.what());
      case codasep::ErrorKind::runtime: return fail(CODASEP_ERR_RUNTIME, e.what());
    }
    return fail(CODASEP_ERR_RUNTIME, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CODASEP_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(CODASEP_ERR_RUNTIME, e.what());
  }
}

codasep::PreprocessOptions to_options(const codasep_preprocess_options* opts) {
  codasep::PreprocessOptions out;
  if (opts) {
    out.min_nonzero = opts->min_nonzero;
    out.prior_strength = opts->prior_strength;
    out.seed = opts->seed;
  }
  return out;
}

codasep::ScreeningConfig to_config(const codasep_screen_options* opts) {
  codasep::ScreeningConfig cfg;
  if (!opts) return cfg;
  cfg.rho_otu = opts->rho_otu;
  switch (opts->variance) {
    case CODASEP_VARIANCE_HANLEY: cfg.variance_method = codasep::VarianceMethod::hanley; break;
    case CODASEP_VARIANCE_DELONG: cfg.variance_method = codasep::VarianceMethod::delong; break;
    default: codasep::fail_validation("unknown variance method");
  }
  cfg.workers = opts->workers;
  cfg.seed = opts->seed;
  cfg.covariates_included = opts->use_covariates != 0;
  cfg.glm.max_iter = opts->max_iter;
  return cfg;
}

std::vector<std::string> split_names(const char* list) {
  std::vector<std::string> out;
  if (!list) return out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

codasep_status copy_out(const std::string& text, char** out) {
  char* buf = static_cast<char*>(std::malloc(text.size() + 1));
  if (!buf) return fail(CODASEP_ERR_RUNTIME, "out of memory");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  *out = buf;
  return CODASEP_OK;
}

void write_json(const nlohmann::json& j, const char* path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) codasep::fail_io(std::string("cannot open ") + path + " for writing");
  f << j.dump(2) << '\n';
  if (!f) codasep::fail_io(std::string("failed writing ") + path);
}

#define REQUIRE_ARG(cond)                                                   \
  do {                                                                      \
    if (!(cond)) return fail(CODASEP_ERR_ARGUMENT, "invalid argument: " #cond); \
  } while (0)

}  // namespace

extern "C" {

const char* codasep_version(void) { return CODASEP_VERSION; }

const char* codasep_last_error(void) { return last_error.c_str(); }

void codasep_string_free(char* s) { std::free(s); }

void codasep_preprocess_options_init(codasep_preprocess_options* opts) {
  if (!opts) return;
  const codasep::PreprocessOptions d;
  opts->min_nonzero = d.min_nonzero;
  opts->prior_strength = d.prior_strength;
  opts->seed = d.seed;
}

codasep_status codasep_dataset_load(const char* counts_path, const char* metadata_path, const char* label_column,
                                    const char* covariates, char delimiter, const codasep_preprocess_options* opts,
                                    codasep_dataset** out) {
  REQUIRE_ARG(counts_path && metadata_path && label_column && out);
  *out = nullptr;
  return guarded([&] {
    const auto options = to_options(opts);
    std::optional<char> delim;
    if (delimiter != 0) delim = delimiter;
    auto data = codasep::load_and_prepare(counts_path, metadata_path, label_column, split_names(covariates), options, delim);
    *out = new codasep_dataset{std::move(data), options};
  });
}

codasep_status codasep_dataset_from_arrays(const int64_t* counts, int n, int m, const char* const* sample_ids,
                                           const char* const* feature_ids, const char* const* labels,
                                           const double* covariates, int p, const char* const* covariate_names,
                                           const codasep_preprocess_options* opts, codasep_dataset** out) {
  REQUIRE_ARG(counts && sample_ids && feature_ids && labels && out && n > 0 && m > 0 && p >= 0);
  REQUIRE_ARG(p == 0 || (covariates && covariate_names));
  *out = nullptr;
  return guarded([&] {
    codasep::CountMatrix mat(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) mat(i, j) = counts[static_cast<std::size_t>(i) * m + j];
    }
    std::vector<std::string> samples(sample_ids, sample_ids + n);
    std::vector<std::string> features(feature_ids, feature_ids + m);
    std::vector<std::string> raw(labels, labels + n);
    codasep::CovariateMatrix cov(n);
    if (p > 0) {
      Eigen::MatrixXd values(n, p);
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < p; ++k) values(i, k) = covariates[static_cast<std::size_t>(i) * p + k];
      }
      cov = codasep::CovariateMatrix(std::move(values), std::vector<std::string>(covariate_names, covariate_names + p));
    }
    const auto options = to_options(opts);
    codasep::CountTable table(std::move(mat), std::move(samples), std::move(features));
    auto data = codasep::prepare(table, codasep::Labels::from_raw(raw), cov, options);
    *out = new codasep_dataset{std::move(data), options};
  });
}

codasep_status codasep_dataset_from_simulation(const codasep_simulation* sim, const codasep_preprocess_options* opts,
                                               codasep_dataset** out) {
  REQUIRE_ARG(sim && out);
  *out = nullptr;
  return guarded([&] {
    const auto options = to_options(opts);
    auto data = codasep::prepare(sim->sim.counts, sim->sim.labels, sim->sim.covariates, options);
    *out = new codasep_dataset{std::move(data), options};
  });
}

codasep_status codasep_preprocess_file(const char* counts_path, char delimiter,
                                       const codasep_preprocess_options* opts, const char* composition_path,
                                       const char* clr_path, const char* sidecar_path) {
  REQUIRE_ARG(counts_path);
  return guarded([&] {
    const auto options = to_options(opts);
    std::optional<char> delim;
    if (delimiter != 0) delim = delimiter;
    const auto raw = codasep::read_count_table(counts_path, delim);
    auto filtered = codasep::filter_rare(raw, options.min_nonzero);
    auto imputed = codasep::impute_zeros(filtered.table, options.prior_strength, options.seed);
    const auto& comp = imputed.composition;
    if (composition_path) {
      codasep::write_real_matrix(comp.values(), comp.sample_ids(), comp.feature_ids(), composition_path);
    }
    if (clr_path) {
      codasep::write_real_matrix(codasep::clr_transform(comp).values, comp.sample_ids(), comp.feature_ids(), clr_path);
    }
    if (sidecar_path) {
      write_json(codasep::preprocess_to_json(raw.samples(), raw.features(), filtered.removed, imputed.warnings),
                 sidecar_path);
    }
  });
}

int codasep_dataset_samples(const codasep_dataset* ds) { return ds ? ds->data.dataset.samples() : 0; }
int codasep_dataset_features(const codasep_dataset* ds) { return ds ? ds->data.dataset.features() : 0; }
int codasep_dataset_classes(const codasep_dataset* ds) { return ds ? ds->data.dataset.labels().class_count() : 0; }

codasep_status codasep_dataset_write(const codasep_dataset* ds, const char* composition_path, const char* clr_path,
                                     const char* sidecar_path) {
  REQUIRE_ARG(ds);
  return guarded([&] {
    const auto& comp = ds->data.dataset.composition();
    if (composition_path) {
      codasep::write_real_matrix(comp.values(), comp.sample_ids(), comp.feature_ids(), composition_path);
    }
    if (clr_path) {
      codasep::write_real_matrix(codasep::clr_transform(comp).values, comp.sample_ids(), comp.feature_ids(), clr_path);
    }
    if (sidecar_path) {
      write_json(codasep::preprocess_to_json(ds->data), sidecar_path);
    }
  });
}

void codasep_dataset_free(codasep_dataset* ds) { delete ds; }

void codasep_screen_options_init(codasep_screen_options* opts) {
  if (!opts) return;
  const codasep::ScreeningConfig d;
  opts->rho_otu = d.rho_otu;
  opts->variance = CODASEP_VARIANCE_HANLEY;
  opts->workers = d.workers;
  opts->seed = d.seed;
  opts->use_covariates = 1;
  opts->max_iter = d.glm.max_iter;
}

codasep_status codasep_screen(const codasep_dataset* ds, const codasep_screen_options* opts, codasep_report** out) {
  REQUIRE_ARG(ds && out);
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<codasep_report>();
    r->report = codasep::screen(ds->data.dataset, to_config(opts), &r->matrix);
    r->ranked = r->report.ranked_ids();
    *out = r.release();
  });
}

int codasep_report_k_star(const codasep_report* r) { return r ? r->report.k_star : 0; }
double codasep_report_s(const codasep_report* r) {
  return r ? r->report.s : std::numeric_limits<double>::quiet_NaN();
}
double codasep_report_var_s(const codasep_report* r) {
  return r ? r->report.var_s : std::numeric_limits<double>::quiet_NaN();
}

void codasep_report_ci(const codasep_report* r, double* lower, double* upper) {
  if (!r) return;
  if (lower) *lower = r->report.ci_lower;
  if (upper) *upper = r->report.ci_upper;
}

const char* codasep_report_ranked_feature(const codasep_report* r, int rank) {
  if (!r || rank < 0 || rank >= static_cast<int>(r->ranked.size())) return nullptr;
  return r->ranked[rank].c_str();
}

double codasep_report_auc(const codasep_report* r, int i, int j) {
  if (!r || i < 0 || j < 0 || i >= r->matrix.features() || j >= r->matrix.features()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return r->matrix.values(i, j);
}

codasep_status codasep_report_json(const codasep_report* r, char** out) {
  REQUIRE_ARG(r && out);
  std::string text;
  const auto status = guarded([&] { text = codasep::report_to_json(r->report).dump(2); });
  return status == CODASEP_OK ? copy_out(text, out) : status;
}

codasep_status codasep_report_write_auc_matrix(const codasep_report* r, const char* path) {
  REQUIRE_ARG(r && path);
  return guarded([&] { codasep::write_auc_matrix(r->matrix, path); });
}

void codasep_report_free(codasep_report* r) { delete r; }

void codasep_bootstrap_options_init(codasep_bootstrap_options* opts) {
  if (!opts) return;
  const codasep::BootstrapConfig d;
  opts->replicates = d.replicates;
  opts->stratified = d.stratified ? 1 : 0;
  opts->seed = d.seed;
  opts->workers = d.workers;
  opts->k = d.fixed_k;
  opts->reselect_k = 0;
  opts->reimpute = 0;
  opts->estimate_rho = 0;
}

codasep_status codasep_bootstrap_run(const codasep_dataset* ds, const codasep_screen_options* screen,
                                     const codasep_bootstrap_options* opts, codasep_bootstrap** out) {
  REQUIRE_ARG(ds && opts && out);
  *out = nullptr;
  return guarded([&] {
    codasep::BootstrapConfig cfg;
    cfg.replicates = opts->replicates;
    cfg.stratified = opts->stratified != 0;
    cfg.seed = opts->seed;
    cfg.workers = opts->workers;
    cfg.fixed_k = opts->k;
    cfg.k_policy = opts->reselect_k ? codasep::BootstrapConfig::KPolicy::reselect_each_replicate
                                    : codasep::BootstrapConfig::KPolicy::fixed_k;
    cfg.estimate_rho = opts->estimate_rho != 0;
    std::optional<codasep::ReimputeSource> source;
    if (opts->reimpute) {
      source = codasep::ReimputeSource{ds->data.raw, ds->options.min_nonzero, ds->options.prior_strength};
    }
    auto scfg = to_config(screen);
    scfg.workers = cfg.workers;
    *out = new codasep_bootstrap{codasep::bootstrap_s(ds->data.dataset, scfg, cfg, source)};
  });
}

double codasep_bootstrap_var_s(const codasep_bootstrap* b) {
  return b ? b->result.var_s : std::numeric_limits<double>::quiet_NaN();
}

void codasep_bootstrap_ci(const codasep_bootstrap* b, double* lower, double* upper) {
  if (!b) return;
  if (lower) *lower = b->result.ci_lower;
  if (upper) *upper = b->result.ci_upper;
}

codasep_status codasep_bootstrap_json(const codasep_bootstrap* b, char** out) {
  REQUIRE_ARG(b && out);
  std::string text;
  const auto status = guarded([&] { text = codasep::bootstrap_to_json(b->result).dump(2); });
  return status == CODASEP_OK ? copy_out(text, out) : status;
}

void codasep_bootstrap_free(codasep_bootstrap* b) { delete b; }

void codasep_enet_options_init(codasep_enet_options* opts) {
  if (!opts) return;
  const codasep::EnetConfig d;
  opts->alpha = d.alpha;
  opts->nlambda = d.nlambda;
  opts->lambda_min_ratio = d.lambda_min_ratio;
  opts->lambdas = nullptr;
  opts->n_lambdas = 0;
  opts->max_iter = d.max_iter;
  opts->tol = d.tol;
  opts->cv_folds = d.cv_folds;
  opts->seed = d.seed;
  opts->workers = d.workers;
}

codasep_status codasep_enet_fit(const codasep_dataset* ds, const codasep_enet_options* opts, codasep_enet** out) {
  REQUIRE_ARG(ds && opts && out);
  REQUIRE_ARG(opts->n_lambdas == 0 || opts->lambdas);
  *out = nullptr;
  return guarded([&] {
    codasep::EnetConfig cfg;
    cfg.alpha = opts->alpha;
    cfg.nlambda = opts->nlambda;
    cfg.lambda_min_ratio = opts->lambda_min_ratio;
    if (opts->n_lambdas > 0) cfg.lambda_path.assign(opts->lambdas, opts->lambdas + opts->n_lambdas);
    cfg.max_iter = opts->max_iter;
    cfg.tol = opts->tol;
    cfg.cv_folds = opts->cv_folds;
    cfg.seed = opts->seed;
    cfg.workers = opts->workers;
    auto e = std::make_unique<codasep_enet>();
    e->path = codasep::fit_enet_logistic(ds->data.dataset, cfg);
    e->cv = codasep::cv_select_lambda(e->path, ds->data.dataset, cfg);
    *out = e.release();
  });
}

int codasep_enet_path_length(const codasep_enet* e) { return e ? static_cast<int>(e->path.fits.size()) : 0; }

double codasep_enet_lambda(const codasep_enet* e, int index) {
  if (!e || index < 0 || index >= codasep_enet_path_length(e)) return std::numeric_limits<double>::quiet_NaN();
  return e->path.fits[index].lambda;
}

double codasep_enet_deviance(const codasep_enet* e, int index) {
  if (!e || index < 0 || index >= codasep_enet_path_length(e)) return std::numeric_limits<double>::quiet_NaN();
  return e->path.fits[index].deviance;
}

int codasep_enet_support_size(const codasep_enet* e, int index) {
  if (!e || index < 0 || index >= codasep_enet_path_length(e)) return -1;
  return static_cast<int>(e->path.fits[index].theta.size());
}

codasep_status codasep_enet_json(const codasep_enet* e, char** out) {
  REQUIRE_ARG(e && out);
  std::string text;
  const auto status = guarded([&] { text = codasep::enet_to_json(e->path, e->cv).dump(2); });
  return status == CODASEP_OK ? copy_out(text, out) : status;
}

void codasep_enet_free(codasep_enet* e) { delete e; }

void codasep_sim_options_init(codasep_sim_options* opts) {
  if (!opts) return;
  static const int default_sizes[] = {50, 50};
  static const int default_signal[] = {0, 1, 2};
  const codasep::SimSpec d;
  opts->n_per_class = default_sizes;
  opts->classes = 2;
  opts->m = d.m;
  opts->signal_features = default_signal;
  opts->n_signal = 3;
  opts->effect_size = d.effect_size;
  opts->confounded = 0;
  opts->confounding = 0.0;
  opts->confounded_feature = d.confounded_feature;
  opts->noise_sd = d.noise_sd;
  opts->depth = d.depth;
  opts->zero_rate = d.zero_rate;
  opts->seed = d.seed;
}

codasep_status codasep_simulate(const codasep_sim_options* opts, codasep_simulation** out) {
  REQUIRE_ARG(opts && out && opts->classes >= 0 && opts->n_signal >= 0);
  REQUIRE_ARG(opts->n_per_class || opts->classes == 0);
  REQUIRE_ARG(opts->signal_features || opts->n_signal == 0);
  *out = nullptr;
  return guarded([&] {
    codasep::SimSpec spec;
    spec.n_per_class.assign(opts->n_per_class, opts->n_per_class + opts->classes);
    spec.m = opts->m;
    spec.signal_features.assign(opts->signal_features, opts->signal_features + opts->n_signal);
    spec.effect_size = opts->effect_size;
    if (opts->confounded) spec.covariate_confounding = opts->confounding;
    spec.confounded_feature = opts->confounded_feature;
    spec.noise_sd = opts->noise_sd;
    spec.depth = opts->depth;
    spec.zero_rate = opts->zero_rate;
    spec.seed = opts->seed;
    *out = new codasep_simulation{codasep::simulate(spec)};
  });
}

codasep_status codasep_simulation_write(const codasep_simulation* sim, const char* counts_path,
                                        const char* metadata_path, const char* label_column) {
  REQUIRE_ARG(sim && counts_path && metadata_path && label_column);
  return guarded([&] {
    codasep::write_count_table(sim->sim.counts, counts_path);
    codasep::write_metadata(metadata_path, sim->sim.counts.sample_ids(), label_column, sim->sim.labels,
                            sim->sim.covariates);
  });
}

codasep_status codasep_simulation_json(const codasep_simulation* sim, char** out) {
  REQUIRE_ARG(sim && out);
  std::string text;
  const auto status = guarded([&] {
    const auto& ids = sim->sim.counts.feature_ids();
    std::vector<std::string> truth;
    for (int j : sim->sim.truth) truth.push_back(ids.at(j));
    nlohmann::json j{{"signal_features", truth},
                     {"classes", sim->sim.labels.class_names()},
                     {"class_sizes", sim->sim.labels.class_sizes()}};
    if (sim->sim.confounded_feature >= 0) j["confounded_feature"] = ids.at(sim->sim.confounded_feature);
    text = j.dump(2);
  });
  return status == CODASEP_OK ? copy_out(text, out) : status;
}

void codasep_simulation_free(codasep_simulation* sim) { delete sim; }

}  // extern "C"
