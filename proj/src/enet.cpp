#include "codasep/enet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "codasep/error.hpp"
#include "parallel.hpp"

namespace codasep {

void EnetConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail_validation("alpha must lie in [0, 1]");
  for (std::size_t i = 0; i < lambda_path.size(); ++i) {
    if (!(lambda_path[i] >= 0.0) || !std::isfinite(lambda_path[i])) fail_validation("lambdas must be finite and >= 0");
    if (i > 0 && !(lambda_path[i] < lambda_path[i - 1])) fail_validation("lambda path must be strictly descending");
  }
  if (lambda_path.empty() && nlambda < 1) fail_validation("nlambda must be >= 1");
  if (!(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0)) fail_validation("lambda_min_ratio must lie in (0, 1)");
  if (max_iter < 1) fail_validation("max_iter must be >= 1");
  if (!(tol > 0.0)) fail_validation("tol must be positive");
  if (cv_folds == 1 || cv_folds < 0) fail_validation("cv_folds must be 0 or >= 2");
}

namespace {

constexpr double kMinWeight = 1e-5;

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

double log1p_exp(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Coordinate descent over the standardized pairwise log-ratio design. Columns
// are generated from the log composition when first needed.
class PathSolver {
 public:
  PathSolver(const LogRatioDesign& design, const Eigen::VectorXd& y, double alpha, double tol, int max_iter)
      : design_(design), y_(y), n_(design.rows()), p_(design.cols()), alpha_(alpha), tol_(tol), max_iter_(max_iter) {
    const auto& logs = design.log_values();
    const Eigen::RowVectorXd means = logs.colwise().mean();
    const Eigen::MatrixXd centered = logs.rowwise() - means;
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n_);
    mean_.resize(p_);
    scale_.resize(p_);
    usable_.assign(p_, 1);
    for (std::size_t k = 0; k < p_; ++k) {
      const auto& pr = design.pair(k);
      const int a = pr.first();
      const int b = pr.second();
      mean_[k] = means[a] - means[b];
      const double var = cov(a, a) + cov(b, b) - 2.0 * cov(a, b);
      if (!(var > 1e-20 * (cov(a, a) + cov(b, b)) && var > 1e-300)) {
        usable_[k] = 0;
        scale_[k] = 1.0;
      } else {
        scale_[k] = std::sqrt(var);
      }
    }
    theta_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p_));
    const double ybar = y_.mean();
    intercept_ = std::log(ybar / (1.0 - ybar));
    eta_ = Eigen::VectorXd::Constant(n_, intercept_);
  }

  // (1/n) sum_i omega_i z_ik for every column, via u = L' omega.
  Eigen::VectorXd gradient_all(const Eigen::VectorXd& omega) const {
    const Eigen::VectorXd u = design_.log_values().transpose() * omega;
    const double total = omega.sum();
    Eigen::VectorXd g(static_cast<Eigen::Index>(p_));
    for (std::size_t k = 0; k < p_; ++k) {
      const auto& pr = design_.pair(k);
      g[static_cast<Eigen::Index>(k)] =
          usable_[k] ? (u[pr.first()] - u[pr.second()] - mean_[k] * total) / (static_cast<double>(n_) * scale_[k]) : 0.0;
    }
    return g;
  }

  double null_lambda_max() const {
    const double ybar = y_.mean();
    const Eigen::VectorXd omega = (y_.array() - ybar).matrix();
    return gradient_all(omega).cwiseAbs().maxCoeff();
  }

  double objective(const Eigen::VectorXd& eta, const Eigen::VectorXd& theta, double lambda) const {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n_; ++i) loss += log1p_exp(eta[i]) - y_[i] * eta[i];
    loss /= static_cast<double>(n_);
    return loss + lambda * (0.5 * (1.0 - alpha_) * theta.squaredNorm() + alpha_ * theta.lpNorm<1>());
  }

  double deviance() const {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n_; ++i) loss += log1p_exp(eta_[i]) - y_[i] * eta_[i];
    return 2.0 * loss;
  }

  double kkt_residual(double lambda) const {
    Eigen::VectorXd r(n_);
    for (Eigen::Index i = 0; i < n_; ++i) r[i] = y_[i] - sigmoid(eta_[i]);
    const Eigen::VectorXd g = gradient_all(r);
    double worst = std::abs(r.sum()) / static_cast<double>(n_);
    for (std::size_t k = 0; k < p_; ++k) {
      if (!usable_[k]) continue;
      const auto ki = static_cast<Eigen::Index>(k);
      const double t = theta_[ki];
      const double res = t == 0.0 ? std::max(0.0, std::abs(g[ki]) - lambda * alpha_)
                                  : std::abs(g[ki] - lambda * (1.0 - alpha_) * t - lambda * alpha_ * (t > 0 ? 1.0 : -1.0));
      worst = std::max(worst, res);
    }
    return worst;
  }

  EnetFit fit(double lambda) {
    EnetFit out;
    out.lambda = lambda;
    out.alpha = alpha_;
    const double l1 = lambda * alpha_;
    const double l2 = lambda * (1.0 - alpha_);
    double obj = objective(eta_, theta_, lambda);

    for (out.iterations = 1; out.iterations <= max_iter_; ++out.iterations) {
      Eigen::VectorXd w(n_);
      Eigen::VectorXd res(n_);
      for (Eigen::Index i = 0; i < n_; ++i) {
        const double p = sigmoid(eta_[i]);
        w[i] = std::max(p * (1.0 - p), kMinWeight);
        res[i] = (y_[i] - p) / w[i];
      }
      const double wsum = w.sum();
      std::unordered_map<std::size_t, double> h;
      auto curvature = [&](std::size_t k) {
        auto it = h.find(k);
        if (it != h.end()) return it->second;
        const auto& z = column(k);
        const double v = (w.array() * z.array().square()).sum() / static_cast<double>(n_);
        h.emplace(k, v);
        return v;
      };

      const Eigen::VectorXd theta_old = theta_;
      const double intercept_old = intercept_;
      const Eigen::VectorXd eta_old = eta_;
      Eigen::VectorXd eta = eta_;
      double intercept = intercept_;

      std::vector<std::size_t> active;
      std::vector<char> in_active(p_, 0);
      for (std::size_t k = 0; k < p_; ++k) {
        if (theta_[static_cast<Eigen::Index>(k)] != 0.0) {
          active.push_back(k);
          in_active[k] = 1;
        }
      }
      for (int pass = 0; pass < 10000; ++pass) {
        for (int sweep = 0; sweep < 100000; ++sweep) {
          double change = 0.0;
          const double d0 = (w.array() * res.array()).sum() / wsum;
          intercept += d0;
          res.array() -= d0;
          eta.array() += d0;
          change = std::max(change, std::abs(d0));
          for (std::size_t k : active) {
            const auto ki = static_cast<Eigen::Index>(k);
            const auto& z = column(k);
            const double hk = curvature(k);
            const double g = (w.array() * res.array() * z.array()).sum() / static_cast<double>(n_) + hk * theta_[ki];
            const double updated = soft_threshold(g, l1) / (hk + l2);
            const double delta = updated - theta_[ki];
            if (delta == 0.0) continue;
            theta_[ki] = updated;
            res.noalias() -= delta * z;
            eta.noalias() += delta * z;
            change = std::max(change, std::abs(delta) * std::sqrt(hk));
          }
          if (change < 0.1 * tol_) break;
        }
        const Eigen::VectorXd g = gradient_all((w.array() * res.array()).matrix());
        bool added = false;
        for (std::size_t k = 0; k < p_; ++k) {
          const auto ki = static_cast<Eigen::Index>(k);
          if (!usable_[k] || in_active[k]) continue;
          // at lambda_max the top gradient equals l1 up to rounding
          if (std::abs(g[ki]) > l1 * (1.0 + 1e-10)) {
            active.push_back(k);
            in_active[k] = 1;
            added = true;
          }
        }
        if (!added) break;
        std::sort(active.begin(), active.end());
      }

      // Guard the true objective: back off toward the previous iterate if the
      // quadratic model overshot.
      double new_obj = objective(eta, theta_, lambda);
      const Eigen::VectorXd theta_new = theta_;
      const double intercept_new = intercept;
      const Eigen::VectorXd eta_new = eta;
      double t = 1.0;
      bool accepted = new_obj <= obj;
      for (int halving = 0; !accepted && halving < 30; ++halving) {
        t *= 0.5;
        theta_ = theta_old + t * (theta_new - theta_old);
        intercept = intercept_old + t * (intercept_new - intercept_old);
        eta = eta_old + t * (eta_new - eta_old);
        new_obj = objective(eta, theta_, lambda);
        accepted = new_obj <= obj;
      }
      if (!accepted) {
        theta_ = theta_old;
        intercept_ = intercept_old;
        eta_ = eta_old;
        break;
      }
      intercept_ = intercept;
      eta_ = eta;
      obj = new_obj;
      out.objective_trace.push_back(obj);

      const double change = std::max((theta_ - theta_old).cwiseAbs().maxCoeff(), std::abs(intercept_ - intercept_old));
      if (change < tol_ && kkt_residual(lambda) <= tol_) {
        out.converged = true;
        break;
      }
    }
    if (out.iterations > max_iter_) out.iterations = max_iter_;
    // Recompute the linear predictor exactly to shed accumulated drift.
    eta_ = Eigen::VectorXd::Constant(n_, intercept_);
    for (std::size_t k = 0; k < p_; ++k) {
      const double t = theta_[static_cast<Eigen::Index>(k)];
      if (t != 0.0) eta_.noalias() += t * column(k);
    }
    out.kkt_residual = kkt_residual(lambda);
    out.deviance = deviance();
    unstandardize(out);
    return out;
  }

 private:
  const Eigen::VectorXd& column(std::size_t k) {
    auto it = columns_.find(k);
    if (it != columns_.end()) return it->second;
    Eigen::VectorXd z = (design_.column(k).array() - mean_[k]) / scale_[k];
    return columns_.emplace(k, std::move(z)).first->second;
  }

  void unstandardize(EnetFit& out) const {
    const int m = design_.features();
    out.alpha_contrast.assign(m, 0.0);
    double intercept = intercept_;
    for (std::size_t k = 0; k < p_; ++k) {
      const double t = theta_[static_cast<Eigen::Index>(k)];
      if (t == 0.0) continue;
      const double b = t / scale_[k];
      const auto& pr = design_.pair(k);
      out.theta.emplace_back(pr, b);
      out.nonzero_pairs.push_back(pr);
      intercept -= b * mean_[k];
      out.alpha_contrast[pr.first()] += b;
      out.alpha_contrast[pr.second()] -= b;
    }
    out.intercept = intercept;
  }

  const LogRatioDesign& design_;
  const Eigen::VectorXd& y_;
  Eigen::Index n_;
  std::size_t p_;
  double alpha_;
  double tol_;
  int max_iter_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  std::vector<char> usable_;
  std::unordered_map<std::size_t, Eigen::VectorXd> columns_;
  Eigen::VectorXd theta_;
  double intercept_ = 0.0;
  Eigen::VectorXd eta_;
};

Eigen::VectorXd binary_response(const Labels& labels) {
  if (labels.class_count() != 2) fail_validation("elastic-net model supports exactly 2 classes");
  Eigen::VectorXd y(labels.size());
  for (int i = 0; i < labels.size(); ++i) y[i] = labels.y()[i] == 0 ? 1.0 : 0.0;
  return y;
}

struct RawPath {
  std::vector<EnetFit> fits;
  double lambda_max = 0.0;
  bool fallback = false;
};

RawPath fit_path(const Composition& comp, const Eigen::VectorXd& y, const EnetConfig& cfg,
                 const std::vector<double>& lambdas_in) {
  const auto design = logratio_design(comp, cfg.design);
  PathSolver solver(design, y, cfg.alpha, cfg.tol, cfg.max_iter);
  RawPath out;
  out.fallback = cfg.alpha == 0.0;
  out.lambda_max = solver.null_lambda_max() / std::max(cfg.alpha, 1e-3);
  std::vector<double> lambdas = lambdas_in;
  if (lambdas.empty()) {
    const int count = cfg.nlambda;
    for (int i = 0; i < count; ++i) {
      const double frac = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      lambdas.push_back(out.lambda_max * std::pow(cfg.lambda_min_ratio, frac));
    }
  }
  for (double lambda : lambdas) out.fits.push_back(solver.fit(lambda));
  return out;
}

double mean_deviance(const EnetFit& fit, const Composition& comp, const Eigen::VectorXd& y) {
  const auto& logs = comp.log_values();
  double total = 0.0;
  for (Eigen::Index i = 0; i < logs.rows(); ++i) {
    double eta = fit.intercept;
    for (const auto& [pr, b] : fit.theta) eta += b * (logs(i, pr.first()) - logs(i, pr.second()));
    total += 2.0 * (log1p_exp(eta) - y[i] * eta);
  }
  return total / static_cast<double>(logs.rows());
}

}  // namespace

EnetPath fit_enet_logistic(const Dataset& ds, const EnetConfig& cfg) {
  cfg.validate();
  const Eigen::VectorXd y = binary_response(ds.labels());
  auto raw = fit_path(ds.composition(), y, cfg, cfg.lambda_path);
  EnetPath path;
  path.fits = std::move(raw.fits);
  path.lambda_max = raw.lambda_max;
  path.alpha_fallback = raw.fallback;
  path.feature_ids = ds.composition().feature_ids();
  return path;
}

std::optional<CvResult> cv_select_lambda(const EnetPath& path, const Dataset& ds, const EnetConfig& cfg) {
  cfg.validate();
  if (cfg.cv_folds == 0) return std::nullopt;
  if (path.fits.empty()) fail_validation("empty elastic-net path");
  const Eigen::VectorXd y = binary_response(ds.labels());
  const int folds = cfg.cv_folds;
  const int n = ds.samples();

  std::vector<double> lambdas;
  for (const auto& f : path.fits) lambdas.push_back(f.lambda);

  std::vector<int> fold_of(n);
  int attempts = 0;
  for (;; ++attempts) {
    if (attempts == 10) fail_validation("could not build " + std::to_string(folds) + " folds with both classes");
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(attempts), 0xCF01Du};
    std::mt19937_64 rng(seq);
    std::size_t offset = 0;
    for (int c = 0; c < 2; ++c) {
      std::vector<int> members;
      for (int i = 0; i < n; ++i) {
        if (ds.labels().y()[i] == c) members.push_back(i);
      }
      std::shuffle(members.begin(), members.end(), rng);
      // Continue the round-robin across classes so fold sizes stay balanced.
      for (std::size_t k = 0; k < members.size(); ++k) fold_of[members[k]] = static_cast<int>((offset + k) % folds);
      offset += members.size();
    }
    bool ok = true;
    for (int f = 0; f < folds && ok; ++f) {
      int test_pos = 0, test_neg = 0, train_pos = 0, train_neg = 0;
      for (int i = 0; i < n; ++i) {
        const bool pos = y[i] == 1.0;
        if (fold_of[i] == f) {
          (pos ? test_pos : test_neg)++;
        } else {
          (pos ? train_pos : train_neg)++;
        }
      }
      ok = test_pos > 0 && test_neg > 0 && train_pos > 0 && train_neg > 0;
    }
    if (ok) break;
  }

  std::vector<std::vector<double>> fold_dev(folds);
  EnetConfig inner = cfg;
  inner.lambda_path = lambdas;
  detail::parallel_for(static_cast<std::size_t>(folds), cfg.workers, [&](std::size_t f) {
    std::vector<int> train;
    std::vector<int> test;
    for (int i = 0; i < n; ++i) (fold_of[i] == static_cast<int>(f) ? test : train).push_back(i);
    const Composition train_comp = ds.composition().select_rows(train);
    const Composition test_comp = ds.composition().select_rows(test);
    Eigen::VectorXd y_train(static_cast<Eigen::Index>(train.size()));
    Eigen::VectorXd y_test(static_cast<Eigen::Index>(test.size()));
    for (std::size_t i = 0; i < train.size(); ++i) y_train[static_cast<Eigen::Index>(i)] = y[train[i]];
    for (std::size_t i = 0; i < test.size(); ++i) y_test[static_cast<Eigen::Index>(i)] = y[test[i]];
    const auto raw = fit_path(train_comp, y_train, inner, lambdas);
    for (const auto& fit : raw.fits) fold_dev[f].push_back(mean_deviance(fit, test_comp, y_test));
  });

  CvResult cv;
  cv.lambdas = lambdas;
  cv.attempts = attempts + 1;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    double mean = 0.0;
    for (int f = 0; f < folds; ++f) mean += fold_dev[f][l];
    mean /= folds;
    double ss = 0.0;
    for (int f = 0; f < folds; ++f) ss += (fold_dev[f][l] - mean) * (fold_dev[f][l] - mean);
    cv.mean_deviance.push_back(mean);
    cv.se_deviance.push_back(std::sqrt(ss / (folds - 1)) / std::sqrt(static_cast<double>(folds)));
  }
  cv.index_min = static_cast<std::size_t>(
      std::min_element(cv.mean_deviance.begin(), cv.mean_deviance.end()) - cv.mean_deviance.begin());
  const double bound = cv.mean_deviance[cv.index_min] + cv.se_deviance[cv.index_min];
  cv.index_1se = cv.index_min;
  for (std::size_t l = 0; l < cv.index_min; ++l) {
    if (cv.mean_deviance[l] <= bound) {
      cv.index_1se = l;
      break;
    }
  }
  cv.lambda_min = lambdas[cv.index_min];
  cv.lambda_1se = lambdas[cv.index_1se];
  return cv;
}

}  // namespace codasep
