// codasep command-line front end. Talks to the library only through codasep.h.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "codasep/codasep.h"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_runtime = 2;

bool verbose = false;

void log(const std::string& message) {
  if (verbose) std::cerr << "[codasep] " << message << '\n';
}

// Carries a library status up to main.
struct Failure {
  int code;
  std::string message;
};

void check(codasep_status status, const std::string& what) {
  if (status == CODASEP_OK) return;
  const int code = status == CODASEP_ERR_VALIDATION || status == CODASEP_ERR_ARGUMENT ? exit_validation : exit_runtime;
  throw Failure{code, what + ": " + codasep_last_error()};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using DatasetPtr = std::unique_ptr<codasep_dataset, Deleter<codasep_dataset, codasep_dataset_free>>;
using ReportPtr = std::unique_ptr<codasep_report, Deleter<codasep_report, codasep_report_free>>;
using BootPtr = std::unique_ptr<codasep_bootstrap, Deleter<codasep_bootstrap, codasep_bootstrap_free>>;
using EnetPtr = std::unique_ptr<codasep_enet, Deleter<codasep_enet, codasep_enet_free>>;
using SimPtr = std::unique_ptr<codasep_simulation, Deleter<codasep_simulation, codasep_simulation_free>>;

std::string take_string(char* s) {
  std::string out(s ? s : "");
  codasep_string_free(s);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{exit_runtime, "cannot open " + path + " for writing"};
  out << text << '\n';
  if (!out) throw Failure{exit_runtime, "failed writing " + path};
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{exit_validation, "cannot read " + path};
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

char delimiter_char(const std::string& name) {
  if (name == "auto") return 0;
  if (name == "comma" || name == ",") return ',';
  if (name == "tab" || name == "\\t" || name == "\t") return '\t';
  throw Failure{exit_validation, "unknown delimiter '" + name + "' (use auto, comma or tab)"};
}

std::string default_manifest(const std::string& out) {
  std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + ".manifest.json")).string();
}

// Options shared by the commands that analyse a labelled table.
struct InputOptions {
  std::string counts;
  std::string metadata;
  std::string label_column;
  std::vector<std::string> covariates;
  std::string delimiter = "auto";
  int min_nonzero = 3;
  double prior_strength = 0.5;
};

struct RunOptions {
  std::uint64_t seed = 0;
  int workers = 0;  // 0: CODASEP_WORKERS or 1
  std::string manifest;
};

void add_input_options(CLI::App* cmd, InputOptions& in, bool covariates) {
  cmd->add_option("--counts", in.counts, "count table (sample_id + one column per feature)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--metadata", in.metadata, "sample metadata keyed by sample_id")->required()->check(CLI::ExistingFile);
  cmd->add_option("--label-column", in.label_column, "metadata column holding the class label")->required();
  if (covariates) {
    cmd->add_option("--covariates", in.covariates, "metadata columns to adjust for, comma separated")->delimiter(',');
  }
  cmd->add_option("--delimiter", in.delimiter, "auto, comma or tab")->capture_default_str();
  cmd->add_option("--min-nonzero", in.min_nonzero, "keep features with at least this many non-zero samples")
      ->capture_default_str();
  cmd->add_option("--prior-strength", in.prior_strength, "per-feature Dirichlet prior for zero replacement")
      ->capture_default_str();
}

void add_run_options(CLI::App* cmd, RunOptions& run, bool workers) {
  cmd->add_option("--seed", run.seed, "seed for every random stage")->capture_default_str();
  if (workers) cmd->add_option("--workers", run.workers, "worker threads (default: $CODASEP_WORKERS or 1)");
  cmd->add_option("--manifest", run.manifest, "run manifest path (default: next to the main output)");
}

int resolve_workers(int flag) {
  if (flag > 0) return flag;
  if (flag < 0) throw Failure{exit_validation, "--workers must be positive"};
  if (const char* env = std::getenv("CODASEP_WORKERS")) {
    try {
      std::size_t used = 0;
      const int value = std::stoi(env, &used);
      if (used == std::string(env).size() && value > 0) return value;
    } catch (const std::exception&) {
    }
    throw Failure{exit_validation, std::string("CODASEP_WORKERS must be a positive integer, got '") + env + "'"};
  }
  return 1;
}

codasep_preprocess_options preprocess_options(const InputOptions& in, std::uint64_t seed) {
  codasep_preprocess_options opts;
  codasep_preprocess_options_init(&opts);
  opts.min_nonzero = in.min_nonzero;
  opts.prior_strength = in.prior_strength;
  opts.seed = seed;
  return opts;
}

DatasetPtr load_dataset(const InputOptions& in, std::uint64_t seed, bool covariates) {
  const auto opts = preprocess_options(in, seed);
  std::string joined;
  if (covariates) {
    for (const auto& c : in.covariates) joined += (joined.empty() ? "" : ",") + c;
  }
  codasep_dataset* ds = nullptr;
  check(codasep_dataset_load(in.counts.c_str(), in.metadata.c_str(), in.label_column.c_str(), joined.c_str(),
                             delimiter_char(in.delimiter), &opts, &ds),
        "loading " + in.counts);
  log("loaded " + std::to_string(codasep_dataset_samples(ds)) + " samples, " +
      std::to_string(codasep_dataset_features(ds)) + " features, " + std::to_string(codasep_dataset_classes(ds)) +
      " classes");
  return DatasetPtr(ds);
}

codasep_screen_options screen_options(const std::string& variance, double rho, int workers, std::uint64_t seed) {
  codasep_screen_options opts;
  codasep_screen_options_init(&opts);
  if (variance == "hanley") {
    opts.variance = CODASEP_VARIANCE_HANLEY;
  } else if (variance == "delong") {
    opts.variance = CODASEP_VARIANCE_DELONG;
  } else {
    throw Failure{exit_validation, "unknown --variance '" + variance + "' (use hanley or delong)"};
  }
  opts.rho_otu = rho;
  opts.workers = workers;
  opts.seed = seed;
  return opts;
}

// Every option of the subcommand with its resolved value.
json resolved_flags(const CLI::App* cmd) {
  json flags = json::object();
  for (const CLI::Option* opt : cmd->get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help") continue;
    const auto& results = opt->results();
    if (!results.empty()) {
      flags[names.front()] = results.size() == 1 ? json(results.front()) : json(results);
    } else {
      flags[names.front()] = opt->get_default_str();
    }
  }
  return flags;
}

struct ManifestContext {
  const CLI::App* cmd = nullptr;
  std::vector<std::string> argv;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  int workers = 1;
  std::uint64_t seed = 0;
  std::chrono::steady_clock::time_point started;
};

void write_manifest(const ManifestContext& ctx, const std::string& path) {
  json digests = json::object();
  for (const auto& in : ctx.inputs) digests[in] = sha256_file(in);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.started).count();
  json manifest{
      {"tool", "codasep"},
      {"version", codasep_version()},
      {"command", ctx.cmd->get_name()},
      {"argv", ctx.argv},
      {"flags", resolved_flags(ctx.cmd)},
      {"input_digests", digests},
      {"outputs", ctx.outputs},
      {"workers", ctx.workers},
      {"seed", ctx.seed},
      {"wall_time_seconds", wall},
  };
  write_text(path, manifest.dump(2));
  log("manifest written to " + path);
}

int run(const std::vector<std::string>& args);

int replay(const std::string& manifest_path, bool check_digests) {
  std::ifstream in(manifest_path);
  if (!in) throw Failure{exit_validation, "cannot read manifest " + manifest_path};
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw Failure{exit_validation, "manifest " + manifest_path + " is not valid JSON: " + e.what()};
  }
  if (!manifest.contains("argv") || !manifest["argv"].is_array()) {
    throw Failure{exit_validation, "manifest " + manifest_path + " has no argv array"};
  }
  if (check_digests && manifest.contains("input_digests")) {
    for (const auto& [path, digest] : manifest["input_digests"].items()) {
      if (sha256_file(path) != digest.get<std::string>()) {
        throw Failure{exit_validation, "input " + path + " changed since the manifest was written"};
      }
    }
  }
  const auto args = manifest["argv"].get<std::vector<std::string>>();
  if (!args.empty() && args.front() == "replay") throw Failure{exit_validation, "manifest records a replay"};
  log("replaying " + manifest.value("command", std::string("?")));
  return run(args);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Pairwise log-ratio separability screening for compositional count data", "codasep"};
  app.set_version_flag("--version", std::string(codasep_version()));
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("-v,--verbose", verbose, "progress messages on stderr");

  ManifestContext ctx;
  ctx.started = std::chrono::steady_clock::now();
  ctx.argv = args;

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "filter rare features, replace zeros, write composition and clr");
  std::string pre_counts;
  std::string pre_delim = "auto";
  InputOptions pre_in;
  RunOptions pre_run;
  std::string composition_out = "composition.csv";
  std::string clr_out = "clr.csv";
  std::string sidecar_out = "preprocess.json";
  pre->add_option("--counts", pre_counts, "count table")->required()->check(CLI::ExistingFile);
  pre->add_option("--delimiter", pre_delim, "auto, comma or tab")->capture_default_str();
  pre->add_option("--min-nonzero", pre_in.min_nonzero, "keep features with at least this many non-zero samples")
      ->capture_default_str();
  pre->add_option("--prior-strength", pre_in.prior_strength, "per-feature Dirichlet prior for zero replacement")
      ->capture_default_str();
  pre->add_option("--composition-out", composition_out, "imputed composition")->capture_default_str();
  pre->add_option("--clr-out", clr_out, "clr matrix")->capture_default_str();
  pre->add_option("--out", sidecar_out, "removed features and imputation warnings (JSON)")->capture_default_str();
  add_run_options(pre, pre_run, false);

  // screen
  auto* scr = app.add_subcommand("screen", "rank features by pairwise log-ratio AUC and pick the separating set");
  InputOptions scr_in;
  RunOptions scr_run;
  std::string variance = "hanley";
  double rho = 0.2;
  std::string report_out = "report.json";
  std::string auc_matrix_out;
  add_input_options(scr, scr_in, true);
  scr->add_option("--variance", variance, "per-pair AUC variance: hanley or delong")->capture_default_str();
  scr->add_option("--rho", rho, "correlation of AUCs of pairs sharing a feature")->capture_default_str();
  scr->add_option("--out", report_out, "report JSON")->capture_default_str();
  scr->add_option("--auc-matrix", auc_matrix_out, "write the m x m AUC matrix as CSV");
  add_run_options(scr, scr_run, true);

  // bootstrap
  auto* boot = app.add_subcommand("bootstrap", "bootstrap the separation index");
  InputOptions boot_in;
  RunOptions boot_run;
  std::string boot_variance = "hanley";
  double boot_rho = 0.2;
  int replicates = 200;
  bool stratified = true;
  std::string k_choice = "auto";
  bool reimpute = false;
  bool estimate_rho = false;
  std::string boot_out = "boot.json";
  add_input_options(boot, boot_in, true);
  boot->add_option("--variance", boot_variance, "per-pair AUC variance: hanley or delong")->capture_default_str();
  boot->add_option("--rho", boot_rho, "correlation of AUCs of pairs sharing a feature")->capture_default_str();
  boot->add_option("--replicates", replicates, "bootstrap replicates")->capture_default_str();
  boot->add_flag("--stratified,!--no-stratified", stratified, "resample within each class")->capture_default_str();
  boot->add_option("--k", k_choice, "auto (k* of the data), reselect (per replicate) or a fixed k")
      ->capture_default_str();
  boot->add_flag("--reimpute", reimpute, "redo filtering and zero replacement inside each replicate");
  boot->add_flag("--estimate-rho", estimate_rho, "estimate rho from the replicates");
  boot->add_option("--out", boot_out, "bootstrap JSON")->capture_default_str();
  add_run_options(boot, boot_run, true);

  // enet
  auto* en = app.add_subcommand("enet", "elastic-net logistic regression on all pairwise log-ratios");
  InputOptions en_in;
  RunOptions en_run;
  codasep_enet_options en_opts;
  codasep_enet_options_init(&en_opts);
  std::vector<double> lambdas;
  std::string enet_out = "enet.json";
  add_input_options(en, en_in, false);
  en->add_option("--alpha", en_opts.alpha, "mix of L1 (1) and L2 (0) penalty")->capture_default_str();
  en->add_option("--nlambda", en_opts.nlambda, "length of the automatic path")->capture_default_str();
  en->add_option("--lambda-min-ratio", en_opts.lambda_min_ratio, "smallest lambda as a fraction of lambda_max")
      ->capture_default_str();
  en->add_option("--lambda", lambdas, "explicit descending lambda path, comma separated")->delimiter(',');
  en->add_option("--max-iter", en_opts.max_iter, "iterations per lambda")->capture_default_str();
  en->add_option("--tol", en_opts.tol, "convergence tolerance")->capture_default_str();
  en->add_option("--cv-folds", en_opts.cv_folds, "cross-validation folds (0: none)")->capture_default_str();
  en->add_option("--out", enet_out, "path JSON")->capture_default_str();
  add_run_options(en, en_run, true);

  // simulate
  auto* sim = app.add_subcommand("simulate", "write a synthetic count table with planted signal features");
  RunOptions sim_run;
  sim_run.seed = 1;
  std::vector<int> n_per_class{50, 50};
  int sim_m = 20;
  std::vector<int> signal{0, 1, 2};
  codasep_sim_options sim_opts;
  codasep_sim_options_init(&sim_opts);
  std::optional<double> confounding;
  std::string counts_out = "counts.csv";
  std::string metadata_out = "metadata.csv";
  std::string label_out = "label";
  std::string truth_out = "truth.json";
  sim->add_option("--n-per-class", n_per_class, "samples per class, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  sim->add_option("--m", sim_m, "number of features")->capture_default_str();
  sim->add_option("--signal", signal, "0-based signal feature indices, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  sim->add_option("--effect-size", sim_opts.effect_size, "log-scale shift of signal features")->capture_default_str();
  sim->add_option("--confounding", confounding, "strength of a confounding covariate");
  sim->add_option("--confounded-feature", sim_opts.confounded_feature, "feature shifted by the covariate (-1: auto)")
      ->capture_default_str();
  sim->add_option("--noise-sd", sim_opts.noise_sd, "log-abundance noise")->capture_default_str();
  sim->add_option("--depth", sim_opts.depth, "reads per sample")->capture_default_str();
  sim->add_option("--zero-rate", sim_opts.zero_rate, "probability of zeroing a cell")->capture_default_str();
  sim->add_option("--counts-out", counts_out, "count table")->capture_default_str();
  sim->add_option("--metadata-out", metadata_out, "metadata table")->capture_default_str();
  sim->add_option("--label-column", label_out, "label column name in the metadata")->capture_default_str();
  sim->add_option("--out", truth_out, "planted features (JSON)")->capture_default_str();
  add_run_options(sim, sim_run, false);

  // replay
  auto* rep = app.add_subcommand("replay", "rerun a command from its manifest");
  std::string manifest_in;
  bool skip_digests = false;
  rep->add_option("manifest", manifest_in, "manifest JSON")->required()->check(CLI::ExistingFile);
  rep->add_flag("--no-verify", skip_digests, "do not check input digests");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* shown = &app;
    for (const auto* sub : app.get_subcommands()) shown = sub;
    std::cerr << shown->help();
    return exit_validation;
  }

  if (rep->parsed()) return replay(manifest_in, !skip_digests);

  if (pre->parsed()) {
    ctx.cmd = pre;
    ctx.seed = pre_run.seed;
    ctx.inputs = {pre_counts};
    const auto opts = preprocess_options(pre_in, pre_run.seed);
    check(codasep_preprocess_file(pre_counts.c_str(), delimiter_char(pre_delim), &opts, composition_out.c_str(),
                                  clr_out.c_str(), sidecar_out.c_str()),
          "preprocessing " + pre_counts);
    ctx.outputs = {composition_out, clr_out, sidecar_out};
    write_manifest(ctx, pre_run.manifest.empty() ? default_manifest(sidecar_out) : pre_run.manifest);
    return exit_ok;
  }

  if (scr->parsed()) {
    ctx.cmd = scr;
    ctx.seed = scr_run.seed;
    ctx.workers = resolve_workers(scr_run.workers);
    ctx.inputs = {scr_in.counts, scr_in.metadata};
    const auto opts = screen_options(variance, rho, ctx.workers, scr_run.seed);
    auto ds = load_dataset(scr_in, scr_run.seed, true);
    const int m = codasep_dataset_features(ds.get());
    log("screening " + std::to_string(static_cast<long long>(m) * (m - 1) / 2) + " pairs on " +
        std::to_string(ctx.workers) + " workers");
    codasep_report* raw = nullptr;
    check(codasep_screen(ds.get(), &opts, &raw), "screening");
    ReportPtr report(raw);
    char* text = nullptr;
    check(codasep_report_json(report.get(), &text), "serializing the report");
    write_text(report_out, take_string(text));
    ctx.outputs = {report_out};
    if (!auc_matrix_out.empty()) {
      check(codasep_report_write_auc_matrix(report.get(), auc_matrix_out.c_str()), "writing the AUC matrix");
      ctx.outputs.push_back(auc_matrix_out);
    }
    double lo = 0.0;
    double hi = 0.0;
    codasep_report_ci(report.get(), &lo, &hi);
    log("k* = " + std::to_string(codasep_report_k_star(report.get())) + ", S = " +
        std::to_string(codasep_report_s(report.get())) + " [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    write_manifest(ctx, scr_run.manifest.empty() ? default_manifest(report_out) : scr_run.manifest);
    return exit_ok;
  }

  if (boot->parsed()) {
    ctx.cmd = boot;
    ctx.seed = boot_run.seed;
    ctx.workers = resolve_workers(boot_run.workers);
    ctx.inputs = {boot_in.counts, boot_in.metadata};
    const auto sopts = screen_options(boot_variance, boot_rho, ctx.workers, boot_run.seed);
    codasep_bootstrap_options bopts;
    codasep_bootstrap_options_init(&bopts);
    bopts.replicates = replicates;
    bopts.stratified = stratified ? 1 : 0;
    bopts.seed = boot_run.seed;
    bopts.workers = ctx.workers;
    bopts.reimpute = reimpute ? 1 : 0;
    bopts.estimate_rho = estimate_rho ? 1 : 0;
    if (k_choice == "reselect") {
      bopts.reselect_k = 1;
    } else if (k_choice != "auto") {
      try {
        std::size_t used = 0;
        bopts.k = std::stoi(k_choice, &used);
        if (used != k_choice.size() || bopts.k < 2) throw std::invalid_argument("k");
      } catch (const std::exception&) {
        throw Failure{exit_validation, "--k must be auto, reselect or an integer >= 2, got '" + k_choice + "'"};
      }
    }
    auto ds = load_dataset(boot_in, boot_run.seed, true);
    log("running " + std::to_string(replicates) + " replicates on " + std::to_string(ctx.workers) + " workers");
    codasep_bootstrap* raw = nullptr;
    check(codasep_bootstrap_run(ds.get(), &sopts, &bopts, &raw), "bootstrap");
    BootPtr result(raw);
    char* text = nullptr;
    check(codasep_bootstrap_json(result.get(), &text), "serializing the bootstrap result");
    write_text(boot_out, take_string(text));
    ctx.outputs = {boot_out};
    write_manifest(ctx, boot_run.manifest.empty() ? default_manifest(boot_out) : boot_run.manifest);
    return exit_ok;
  }

  if (en->parsed()) {
    ctx.cmd = en;
    ctx.seed = en_run.seed;
    ctx.workers = resolve_workers(en_run.workers);
    ctx.inputs = {en_in.counts, en_in.metadata};
    en_opts.seed = en_run.seed;
    en_opts.workers = ctx.workers;
    en_opts.lambdas = lambdas.empty() ? nullptr : lambdas.data();
    en_opts.n_lambdas = static_cast<int>(lambdas.size());
    auto ds = load_dataset(en_in, en_run.seed, false);
    codasep_enet* raw = nullptr;
    check(codasep_enet_fit(ds.get(), &en_opts, &raw), "elastic net");
    EnetPtr fit(raw);
    log("fitted " + std::to_string(codasep_enet_path_length(fit.get())) + " lambdas");
    char* text = nullptr;
    check(codasep_enet_json(fit.get(), &text), "serializing the elastic-net path");
    write_text(enet_out, take_string(text));
    ctx.outputs = {enet_out};
    write_manifest(ctx, en_run.manifest.empty() ? default_manifest(enet_out) : en_run.manifest);
    return exit_ok;
  }

  if (sim->parsed()) {
    ctx.cmd = sim;
    ctx.seed = sim_run.seed;
    sim_opts.n_per_class = n_per_class.data();
    sim_opts.classes = static_cast<int>(n_per_class.size());
    sim_opts.m = sim_m;
    sim_opts.signal_features = signal.data();
    sim_opts.n_signal = static_cast<int>(signal.size());
    sim_opts.confounded = confounding.has_value() ? 1 : 0;
    sim_opts.confounding = confounding.value_or(0.0);
    sim_opts.seed = sim_run.seed;
    codasep_simulation* raw = nullptr;
    check(codasep_simulate(&sim_opts, &raw), "simulation");
    SimPtr data(raw);
    check(codasep_simulation_write(data.get(), counts_out.c_str(), metadata_out.c_str(), label_out.c_str()),
          "writing the simulated tables");
    char* text = nullptr;
    check(codasep_simulation_json(data.get(), &text), "serializing the planted features");
    write_text(truth_out, take_string(text));
    ctx.outputs = {counts_out, metadata_out, truth_out};
    write_manifest(ctx, sim_run.manifest.empty() ? default_manifest(truth_out) : sim_run.manifest);
    return exit_ok;
  }
  return exit_validation;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_runtime;
  }
}
