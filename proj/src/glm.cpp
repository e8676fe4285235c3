#include "codasep/glm.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "codasep/error.hpp"

namespace codasep {

namespace {

struct Standardized {
  Eigen::MatrixXd design;       // n x q, column 0 is the intercept
  std::vector<int> source;      // original column (1-based, 0 = intercept) of each design column
  Eigen::VectorXd mean;         // per original non-intercept column
  Eigen::VectorXd scale;        // 0 for dropped constant columns
};

Standardized standardize(std::span<const double> predictor, const Eigen::MatrixXd* covariates) {
  const auto n = static_cast<Eigen::Index>(predictor.size());
  const Eigen::Index p = covariates ? covariates->cols() : 0;
  Eigen::MatrixXd raw(n, 1 + p);
  raw.col(0) = Eigen::Map<const Eigen::VectorXd>(predictor.data(), n);
  if (p > 0) raw.rightCols(p) = *covariates;

  Standardized s;
  s.mean = raw.colwise().mean().transpose();
  s.scale = Eigen::VectorXd::Zero(1 + p);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index a = 0; a < raw.cols(); ++a) {
    const double sd = std::sqrt((raw.col(a).array() - s.mean[a]).square().mean());
    if (sd > 1e-12 * std::max(1.0, std::abs(s.mean[a]))) {
      s.scale[a] = sd;
      kept.push_back(a);
    }
  }
  s.design.resize(n, 1 + static_cast<Eigen::Index>(kept.size()));
  s.design.col(0).setOnes();
  s.source.push_back(0);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto a = kept[k];
    s.design.col(static_cast<Eigen::Index>(k) + 1) = (raw.col(a).array() - s.mean[a]) / s.scale[a];
    s.source.push_back(static_cast<int>(a) + 1);
  }
  return s;
}

// Log-probabilities of all C classes for one row given K = C-1 linear predictors.
template <class Eta, class Out>
void log_softmax_baseline(const Eta& eta, Out&& out) {
  const auto k = eta.size();
  double mx = 0.0;
  for (Eigen::Index c = 0; c < k; ++c) mx = std::max(mx, eta[c]);
  double s = std::exp(-mx);
  for (Eigen::Index c = 0; c < k; ++c) s += std::exp(eta[c] - mx);
  const double lse = mx + std::log(s);
  for (Eigen::Index c = 0; c < k; ++c) out[c] = eta[c] - lse;
  out[k] = -lse;
}

class Problem {
 public:
  Problem(const Eigen::MatrixXd& x, std::span<const int> y, int classes)
      : x_(x), y_(y), k_(classes - 1), q_(static_cast<int>(x.cols())) {}

  Eigen::MatrixXd linear_predictor(const Eigen::MatrixXd& beta) const { return x_ * beta.transpose(); }

  double log_likelihood(const Eigen::MatrixXd& beta, Eigen::MatrixXd* log_probs = nullptr) const {
    const Eigen::MatrixXd eta = x_ * beta.transpose();  // n x K
    Eigen::VectorXd lp(k_ + 1);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.rows(); ++i) {
      log_softmax_baseline(eta.row(i), lp);
      ll += lp[y_[i]];
      if (log_probs) log_probs->row(i) = lp.transpose();
    }
    return ll;
  }

  // Gradient of the log-likelihood and the negative Hessian, parameters
  // ordered class-major: index k * q + a.
  void derivatives(const Eigen::MatrixXd& beta, Eigen::VectorXd& grad, Eigen::MatrixXd& neg_hess) const {
    const int dim = k_ * q_;
    grad.setZero(dim);
    neg_hess.setZero(dim, dim);
    const Eigen::MatrixXd eta = x_ * beta.transpose();
    Eigen::VectorXd lp(k_ + 1);
    Eigen::VectorXd p(k_);
    for (Eigen::Index i = 0; i < eta.rows(); ++i) {
      log_softmax_baseline(eta.row(i), lp);
      for (int c = 0; c < k_; ++c) p[c] = std::exp(lp[c]);
      const auto xi = x_.row(i);
      for (int c = 0; c < k_; ++c) {
        const double r = (y_[i] == c ? 1.0 : 0.0) - p[c];
        grad.segment(c * q_, q_).noalias() += r * xi.transpose();
        for (int d = c; d < k_; ++d) {
          const double w = p[c] * ((c == d ? 1.0 : 0.0) - p[d]);
          if (w == 0.0) continue;
          neg_hess.block(c * q_, d * q_, q_, q_).noalias() += w * xi.transpose() * xi;
        }
      }
    }
    for (int c = 0; c < k_; ++c) {
      for (int d = c + 1; d < k_; ++d) {
        neg_hess.block(d * q_, c * q_, q_, q_) = neg_hess.block(c * q_, d * q_, q_, q_).transpose();
      }
    }
  }

  int classes_minus_one() const { return k_; }
  int columns() const { return q_; }

 private:
  const Eigen::MatrixXd& x_;
  std::span<const int> y_;
  int k_;
  int q_;
};

bool solve_pd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, Eigen::VectorXd& out) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
  const auto& d = ldlt.vectorD();
  if (!(d.minCoeff() > 1e-13 * std::max(1.0, d.maxCoeff()))) return false;
  out = ldlt.solve(b);
  return out.allFinite();
}

}  // namespace

GlmFit fit_multinomial(const GlmSpec& spec) {
  const int classes = spec.n_classes;
  const auto n = static_cast<Eigen::Index>(spec.predictor.size());
  if (classes < 2) fail_validation("multinomial fit needs at least 2 classes");
  if (static_cast<Eigen::Index>(spec.labels.size()) != n) fail_validation("label and predictor lengths differ");
  if (spec.covariates && spec.covariates->rows() != n) fail_validation("covariate rows differ from predictor length");

  std::vector<int> sizes(classes, 0);
  for (int v : spec.labels) {
    if (v < 0 || v >= classes) fail_validation("label out of range");
    ++sizes[v];
  }
  for (int c = 0; c < classes; ++c) {
    if (sizes[c] == 0) fail_validation("class " + std::to_string(c + 1) + " is empty");
  }

  const auto st = standardize(spec.predictor, spec.covariates);
  const Problem problem(st.design, spec.labels, classes);
  const int k = classes - 1;
  const int q = problem.columns();
  const auto& opt = spec.options;

  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(k, q);
  for (int c = 0; c < k; ++c) beta(c, 0) = std::log(static_cast<double>(sizes[c]) / sizes[k]);

  GlmFit fit;
  double ll = problem.log_likelihood(beta);
  Eigen::VectorXd grad;
  Eigen::MatrixXd neg_hess;
  Eigen::VectorXd step;
  const Eigen::Index raw_columns = 1 + (spec.covariates ? spec.covariates->cols() : 0);

  // Gradient with respect to original-scale coefficients, from the
  // standardized one: d/d b_a = scale_a * g_a + mean_a * g_0.
  auto original_gradient_max = [&](const Eigen::VectorXd& g) {
    double mx = 0.0;
    for (int c = 0; c < k; ++c) {
      const double g0 = g[c * q];
      mx = std::max(mx, std::abs(g0));
      Eigen::VectorXd full = Eigen::VectorXd::Zero(raw_columns);
      for (int a = 1; a < q; ++a) full[st.source[a] - 1] = g[c * q + a];
      for (Eigen::Index a = 0; a < raw_columns; ++a) {
        mx = std::max(mx, std::abs(st.scale[a] * full[a] + st.mean[a] * g0));
      }
    }
    return mx;
  };

  bool stalled = false;
  for (fit.iterations = 0; fit.iterations < opt.max_iter; ++fit.iterations) {
    problem.derivatives(beta, grad, neg_hess);
    fit.gradient_max_norm = original_gradient_max(grad);
    if (fit.gradient_max_norm <= 1e-7) {
      fit.converged = true;
      break;
    }
    if (!solve_pd(neg_hess, grad, step)) {
      neg_hess.diagonal().array() += 1e-8;
      fit.ridge_applied = true;
      if (!solve_pd(neg_hess, grad, step)) fail_runtime("singular Hessian in multinomial fit");
    }
    const Eigen::Map<const Eigen::MatrixXd> delta(step.data(), q, k);  // column c = class c
    // near the optimum the likelihood is flat to rounding, so a step that
    // loses less than that still counts as an ascent
    const double slack = 1e-12 * (1.0 + std::abs(ll));
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
      Eigen::MatrixXd trial = beta + t * delta.transpose();
      const double ll_trial = problem.log_likelihood(trial);
      if (std::isfinite(ll_trial) && ll_trial >= ll - slack) {
        beta = std::move(trial);
        ll = ll_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    bool separated = false;
    for (int c = 0; c < k; ++c) {
      for (int a = 1; a < q; ++a) separated = separated || std::abs(beta(c, a)) > opt.separation_threshold;
    }
    if (separated) {
      fit.separation_flag = true;
      ++fit.iterations;
      break;
    }
  }
  if (!fit.converged) {
    problem.derivatives(beta, grad, neg_hess);
    fit.gradient_max_norm = original_gradient_max(grad);
    if (stalled && fit.gradient_max_norm <= 1e-6) {
      fit.converged = true;
    } else {
      fit.separation_flag = true;
    }
  }

  fit.log_probs.resize(n, classes);
  fit.log_likelihood = problem.log_likelihood(beta, &fit.log_probs);
  fit.linear_predictor = problem.linear_predictor(beta);
  fit.fitted_probs = fit.log_probs.array().exp().matrix();

  // A coefficient vector that classifies every sample correctly exists only
  // for separated data, where the likelihood has no finite maximum.
  if (!fit.separation_flag) {
    bool perfect = true;
    for (Eigen::Index i = 0; perfect && i < n; ++i) {
      const int own = spec.labels[static_cast<std::size_t>(i)];
      for (int c = 0; c < classes; ++c) {
        if (c != own && fit.log_probs(i, c) >= fit.log_probs(i, own)) {
          perfect = false;
          break;
        }
      }
    }
    fit.separation_flag = perfect;
  }

  fit.coefficients = Eigen::MatrixXd::Zero(k, 1 + raw_columns);
  for (int c = 0; c < k; ++c) {
    double intercept = beta(c, 0);
    for (int a = 1; a < q; ++a) {
      const int src = st.source[a] - 1;
      const double b = beta(c, a) / st.scale[src];
      fit.coefficients(c, 1 + src) = b;
      intercept -= b * st.mean[src];
    }
    fit.coefficients(c, 0) = intercept;
  }
  return fit;
}

const Eigen::MatrixXd& class_scores(const GlmFit& fit) { return fit.fitted_probs; }

Eigen::VectorXd binary_score(const GlmFit& fit) { return fit.linear_predictor.col(0); }

}  // namespace codasep
