#include "codasep/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "codasep/error.hpp"
#include "codasep/preprocess.hpp"
#include "parallel.hpp"

namespace codasep {

void BootstrapConfig::validate() const {
  if (replicates < 2) fail_validation("bootstrap needs at least 2 replicates");
  if (fixed_k != 0 && fixed_k < 2) fail_validation("fixed k must be >= 2");
}

namespace {

std::mt19937_64 replicate_stream(std::uint64_t seed, int replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate), 0xB0075u};
  return std::mt19937_64(seq);
}

double sample_variance(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / (n - 1.0);
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::nan("");
  return sab / std::sqrt(saa * sbb);
}

Dataset reimputed_dataset(const Dataset& ds, const ReimputeSource& src, const std::vector<int>& rows) {
  const auto& raw = src.counts;
  CountMatrix counts(static_cast<Eigen::Index>(rows.size()), raw.features());
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  std::unordered_map<int, int> uses;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    counts.row(static_cast<Eigen::Index>(r)) = raw.counts().row(rows[r]);
    const int use = uses[rows[r]]++;
    ids.push_back(raw.sample_ids()[rows[r]] + (use == 0 ? "" : "#" + std::to_string(use)));
  }
  const auto filtered = filter_rare(CountTable(std::move(counts), std::move(ids), raw.feature_ids()), src.min_nonzero);
  auto imputed = impute_zeros(filtered.table, src.prior_strength);
  return Dataset(std::move(imputed.composition), ds.labels().select_rows(rows), ds.covariates().select_rows(rows));
}

}  // namespace

std::vector<int> bootstrap_indices(const Labels& labels, bool stratified, std::uint64_t seed, int replicate,
                                   int* redraws) {
  auto rng = replicate_stream(seed, replicate);
  const int n = labels.size();
  const int classes = labels.class_count();
  std::vector<int> out;
  out.reserve(n);
  if (stratified) {
    std::vector<std::vector<int>> members(classes);
    for (int i = 0; i < n; ++i) members[labels.y()[i]].push_back(i);
    for (const auto& group : members) {
      std::uniform_int_distribution<std::size_t> pick(0, group.size() - 1);
      for (std::size_t k = 0; k < group.size(); ++k) out.push_back(group[pick(rng)]);
    }
    return out;
  }
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int attempt = 0; attempt < 10; ++attempt) {
    out.clear();
    std::vector<int> seen(classes, 0);
    for (int k = 0; k < n; ++k) {
      out.push_back(pick(rng));
      seen[labels.y()[out.back()]] = 1;
    }
    if (std::all_of(seen.begin(), seen.end(), [](int s) { return s != 0; })) return out;
    if (redraws) ++*redraws;
  }
  fail_runtime("bootstrap replicate " + std::to_string(replicate) + " lost a class in 10 draws");
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) fail_validation("percentile of empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BootstrapResult bootstrap_s(const Dataset& ds, const ScreeningConfig& scfg, const BootstrapConfig& bcfg,
                            const std::optional<ReimputeSource>& reimpute) {
  bcfg.validate();
  scfg.validate();
  if (reimpute && reimpute->counts.samples() != ds.samples()) {
    fail_validation("reimputation counts do not match the dataset's samples");
  }

  ScreeningConfig inner = scfg;
  inner.workers = 1;
  ScreeningConfig outer = scfg;
  const AucMatrix original = compute_auc_matrix(ds, outer);
  const SeparabilityReport reference = build_report(original, scfg);

  BootstrapResult result;
  result.seed = bcfg.seed;
  result.replicates = bcfg.replicates;
  result.stratified = bcfg.stratified;
  result.k_policy = bcfg.k_policy;
  result.k_reference = bcfg.fixed_k != 0 ? std::min(bcfg.fixed_k, ds.features()) : reference.k_star;

  // Pairs among the reference top features, tracked by id for rho estimation.
  const int tracked = std::min(ds.features(), std::max(result.k_reference, 3));
  std::vector<std::pair<std::string, std::string>> tracked_pairs;
  for (int i = 0; i < tracked; ++i) {
    for (int j = i + 1; j < tracked; ++j) {
      tracked_pairs.emplace_back(ds.composition().feature_ids()[reference.ranking.order[i]],
                                 ds.composition().feature_ids()[reference.ranking.order[j]]);
    }
  }

  const auto b_count = static_cast<std::size_t>(bcfg.replicates);
  std::vector<double> s(b_count);
  std::vector<int> k_own(b_count);
  std::vector<int> redraws(b_count, 0);
  std::vector<std::vector<double>> pair_aucs(bcfg.estimate_rho ? b_count : 0);

  detail::parallel_for(b_count, bcfg.workers, [&](std::size_t b) {
    const auto rows = bootstrap_indices(ds.labels(), bcfg.stratified, bcfg.seed, static_cast<int>(b), &redraws[b]);
    const Dataset rep = reimpute ? reimputed_dataset(ds, *reimpute, rows) : ds.select_rows(rows);
    const AucMatrix a = compute_auc_matrix(rep, inner);
    const Ranking r = rank_features(a);
    const auto curve = separability_curve(a, r.order);
    k_own[b] = select_k(curve);
    const int k = bcfg.k_policy == BootstrapConfig::KPolicy::fixed_k
                      ? std::min(result.k_reference, rep.features())
                      : k_own[b];
    s[b] = curve[k - 2];
    if (bcfg.estimate_rho) {
      std::unordered_map<std::string, int> index;
      for (int j = 0; j < rep.features(); ++j) index[rep.composition().feature_ids()[j]] = j;
      auto& out = pair_aucs[b];
      for (const auto& [f, g] : tracked_pairs) {
        auto fi = index.find(f);
        auto gi = index.find(g);
        out.push_back(fi == index.end() || gi == index.end() ? std::nan("") : a.values(fi->second, gi->second));
      }
    }
  });

  result.s_replicates = s;
  result.var_s = sample_variance(s);
  result.ci_lower = percentile(s, 0.025);
  result.ci_upper = percentile(s, 0.975);
  for (int k : k_own) ++result.k_star_distribution[k];
  for (int r : redraws) result.redraws += r;

  if (bcfg.estimate_rho) {
    // Mean replicate correlation over pairs of tracked pairs sharing a feature.
    double sum = 0.0;
    int count = 0;
    for (std::size_t p = 0; p < tracked_pairs.size(); ++p) {
      for (std::size_t q = p + 1; q < tracked_pairs.size(); ++q) {
        const auto& [a1, a2] = tracked_pairs[p];
        const auto& [b1, b2] = tracked_pairs[q];
        if (a1 != b1 && a1 != b2 && a2 != b1 && a2 != b2) continue;
        std::vector<double> x;
        std::vector<double> y;
        for (const auto& rep : pair_aucs) {
          if (std::isnan(rep[p]) || std::isnan(rep[q])) continue;
          x.push_back(rep[p]);
          y.push_back(rep[q]);
        }
        if (x.size() < 3) continue;
        const double c = correlation(x, y);
        if (std::isnan(c)) continue;
        sum += c;
        ++count;
      }
    }
    if (count > 0) {
      const double rho = std::clamp(sum / count, 0.0, 1.0);
      result.rho_empirical = rho;
      result.var_s_analytic_empirical_rho = var_s_k(original, reference.ranking.order, result.k_reference, rho);
    }
  }
  return result;
}

}  // namespace codasep
