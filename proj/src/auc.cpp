#include "codasep/auc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "codasep/error.hpp"

namespace codasep {

std::string to_string(VarianceMethod method) {
  switch (method) {
    case VarianceMethod::hanley: return "hanley";
    case VarianceMethod::delong: return "delong";
    case VarianceMethod::handtill_propagated: return "handtill_propagated";
    case VarianceMethod::bootstrap: return "bootstrap";
  }
  return "unknown";
}

VarianceMethod parse_variance_method(const std::string& name) {
  if (name == "hanley") return VarianceMethod::hanley;
  if (name == "delong") return VarianceMethod::delong;
  fail_validation("unknown variance method '" + name + "' (expected hanley or delong)");
}

namespace {

// Walks the scores in ascending order one tie group at a time.
template <class Visit>
void for_each_tie_group(std::span<const double> scores, Visit&& visit) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && scores[order[end]] == scores[order[start]]) ++end;
    visit(std::span<const std::size_t>(order.data() + start, end - start));
    start = end;
  }
}

void check_binary_input(std::span<const double> scores, std::span<const std::uint8_t> positive, long& n_pos,
                        long& n_neg) {
  if (scores.size() != positive.size()) fail_validation("scores and labels differ in length");
  n_pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) fail_validation("NaN score");
    if (positive[i]) ++n_pos;
  }
  n_neg = static_cast<long>(scores.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) fail_validation("AUC needs at least one positive and one negative");
}

}  // namespace

double binary_auc(std::span<const double> scores, std::span<const std::uint8_t> positive) {
  long n_pos = 0;
  long n_neg = 0;
  check_binary_input(scores, positive, n_pos, n_neg);
  double wins = 0.0;
  long neg_below = 0;
  for_each_tie_group(scores, [&](std::span<const std::size_t> group) {
    long pos = 0;
    for (auto i : group) pos += positive[i] ? 1 : 0;
    const long neg = static_cast<long>(group.size()) - pos;
    wins += static_cast<double>(pos) * static_cast<double>(neg_below) + 0.5 * static_cast<double>(pos * neg);
    neg_below += neg;
  });
  return wins / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

Placements delong_placements(std::span<const double> scores, std::span<const std::uint8_t> positive) {
  long n_pos = 0;
  long n_neg = 0;
  check_binary_input(scores, positive, n_pos, n_neg);
  std::vector<double> raw(scores.size(), 0.0);
  long neg_below = 0;
  long pos_below = 0;
  double wins = 0.0;
  for_each_tie_group(scores, [&](std::span<const std::size_t> group) {
    long pos = 0;
    for (auto i : group) pos += positive[i] ? 1 : 0;
    const long neg = static_cast<long>(group.size()) - pos;
    const long pos_above = n_pos - pos_below - pos;
    for (auto i : group) {
      raw[i] = positive[i] ? (static_cast<double>(neg_below) + 0.5 * static_cast<double>(neg)) / n_neg
                           : (static_cast<double>(pos_above) + 0.5 * static_cast<double>(pos)) / n_pos;
    }
    wins += static_cast<double>(pos) * static_cast<double>(neg_below) + 0.5 * static_cast<double>(pos * neg);
    neg_below += neg;
    pos_below += pos;
  });
  Placements out;
  out.auc = wins / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
  out.v.reserve(n_pos);
  out.w.reserve(n_neg);
  for (std::size_t i = 0; i < scores.size(); ++i) (positive[i] ? out.v : out.w).push_back(raw[i]);
  return out;
}

double var_hanley(double auc, long n_pos, long n_neg) {
  if (!(auc >= 0.0 && auc <= 1.0)) fail_validation("AUC must lie in [0, 1]");
  if (n_pos < 1 || n_neg < 1) fail_validation("Hanley variance needs n_pos, n_neg >= 1");
  const double q1 = auc / (2.0 - auc);
  const double q2 = 2.0 * auc * auc / (1.0 + auc);
  const double a2 = auc * auc;
  double v = (auc * (1.0 - auc) + (n_pos - 1) * (q1 - a2) + (n_neg - 1) * (q2 - a2)) /
             (static_cast<double>(n_pos) * static_cast<double>(n_neg));
  if (v < 0.0 && v > -1e-15) v = 0.0;
  return v;
}

double var_from_placements(const Placements& p) {
  const auto n1 = static_cast<double>(p.v.size());
  const auto n0 = static_cast<double>(p.w.size());
  if (p.v.size() < 2 || p.w.size() < 2) {
    fail_validation("DeLong variance needs at least 2 positives and 2 negatives");
  }
  double sv = 0.0;
  for (double v : p.v) sv += (v - p.auc) * (v - p.auc);
  double sw = 0.0;
  for (double w : p.w) sw += (w - p.auc) * (w - p.auc);
  return sv / (n1 * (n1 - 1.0)) + sw / (n0 * (n0 - 1.0));
}

double var_delong(std::span<const double> scores, std::span<const std::uint8_t> positive) {
  return var_from_placements(delong_placements(scores, positive));
}

namespace {

struct PairSubset {
  std::vector<double> first_scores;   // column c
  std::vector<double> second_scores;  // column c'
  std::vector<std::uint8_t> is_first;
};

PairSubset subset_for(const Eigen::MatrixXd& scores, std::span<const int> y, int c, int d) {
  PairSubset s;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != c && y[i] != d) continue;
    const auto row = static_cast<Eigen::Index>(i);
    s.first_scores.push_back(scores(row, c));
    s.second_scores.push_back(scores(row, d));
    s.is_first.push_back(y[i] == c ? 1 : 0);
  }
  return s;
}

void check_multiclass(const Eigen::MatrixXd& scores, std::span<const int> y, int classes) {
  if (classes < 2) fail_validation("Hand-Till AUC needs C >= 2");
  if (scores.cols() != classes) fail_validation("score matrix must have one column per class");
  if (scores.rows() != static_cast<Eigen::Index>(y.size())) fail_validation("score rows differ from label count");
  std::vector<int> sizes(classes, 0);
  for (int v : y) {
    if (v < 0 || v >= classes) fail_validation("label out of range");
    ++sizes[v];
  }
  for (int c = 0; c < classes; ++c) {
    if (sizes[c] == 0) fail_validation("class " + std::to_string(c + 1) + " is empty");
  }
}

std::vector<std::uint8_t> flipped(const std::vector<std::uint8_t>& v) {
  std::vector<std::uint8_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] ? 0 : 1;
  return out;
}

}  // namespace

HandTillResult hand_till_auc(const Eigen::MatrixXd& scores, std::span<const int> y, int classes) {
  check_multiclass(scores, y, classes);
  HandTillResult out;
  if (classes == 2) {
    std::vector<std::uint8_t> pos(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) pos[i] = y[i] == 0 ? 1 : 0;
    const Eigen::VectorXd col = scores.col(0);
    out.value = binary_auc(std::span<const double>(col.data(), col.size()), pos);
    out.components[{0, 1}] = out.value;
    return out;
  }
  double sum = 0.0;
  for (int c = 0; c < classes; ++c) {
    for (int d = c + 1; d < classes; ++d) {
      const auto s = subset_for(scores, y, c, d);
      const double a = 0.5 * (binary_auc(s.first_scores, s.is_first) + binary_auc(s.second_scores, flipped(s.is_first)));
      out.components[{c, d}] = a;
      sum += a;
    }
  }
  out.value = 2.0 * sum / (static_cast<double>(classes) * (classes - 1));
  return out;
}

double var_handtill(const std::map<ClassPair, double>& variances,
                    const std::map<std::pair<ClassPair, ClassPair>, double>& covariances, int classes) {
  if (classes < 2) fail_validation("propagation needs C >= 2");
  double sum_var = 0.0;
  for (int c = 0; c < classes; ++c) {
    for (int d = c + 1; d < classes; ++d) {
      auto it = variances.find({c, d});
      if (it == variances.end()) {
        fail_validation("missing variance for class pair (" + std::to_string(c + 1) + ", " + std::to_string(d + 1) + ")");
      }
      sum_var += it->second;
    }
  }
  double sum_cov = 0.0;
  for (const auto& [key, cov] : covariances) {
    if (key.first < key.second) sum_cov += cov;
  }
  const double denom = static_cast<double>(classes) * (classes - 1);
  return 4.0 / (denom * denom) * (sum_var + 2.0 * sum_cov);
}

AucEstimate binary_estimate(std::span<const double> scores, std::span<const int> y, VarianceMethod method) {
  std::vector<std::uint8_t> pos(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) pos[i] = y[i] == 0 ? 1 : 0;
  AucEstimate est;
  est.method = method;
  if (method == VarianceMethod::delong) {
    const auto pl = delong_placements(scores, pos);
    est.value = pl.auc;
    est.variance = var_from_placements(pl);
    est.class_counts = {static_cast<int>(pl.v.size()), static_cast<int>(pl.w.size())};
    return est;
  }
  if (method != VarianceMethod::hanley) fail_validation("binary estimate supports hanley or delong");
  est.value = binary_auc(scores, pos);
  const int n_pos = static_cast<int>(std::count(pos.begin(), pos.end(), 1));
  est.class_counts = {n_pos, static_cast<int>(pos.size()) - n_pos};
  est.variance = var_hanley(est.value, est.class_counts[0], est.class_counts[1]);
  return est;
}

AucEstimate handtill_estimate(const Eigen::MatrixXd& scores, std::span<const int> y, int classes,
                              VarianceMethod component_method, double rho) {
  check_multiclass(scores, y, classes);
  if (component_method != VarianceMethod::hanley && component_method != VarianceMethod::delong) {
    fail_validation("component variance method must be hanley or delong");
  }
  std::vector<int> sizes(classes, 0);
  for (int v : y) ++sizes[v];

  std::map<ClassPair, double> variances;
  double sum = 0.0;
  for (int c = 0; c < classes; ++c) {
    for (int d = c + 1; d < classes; ++d) {
      const auto s = subset_for(scores, y, c, d);
      const auto other = flipped(s.is_first);
      double a = 0.0;
      double var = 0.0;
      if (component_method == VarianceMethod::delong) {
        const auto p1 = delong_placements(s.first_scores, s.is_first);
        const auto p2 = delong_placements(s.second_scores, other);
        // Class-c samples are positives of p1 and negatives of p2.
        Placements combined;
        combined.auc = 0.5 * (p1.auc + p2.auc);
        for (std::size_t i = 0; i < p1.v.size(); ++i) combined.v.push_back(0.5 * (p1.v[i] + p2.w[i]));
        for (std::size_t j = 0; j < p1.w.size(); ++j) combined.w.push_back(0.5 * (p1.w[j] + p2.v[j]));
        a = combined.auc;
        var = var_from_placements(combined);
      } else {
        a = 0.5 * (binary_auc(s.first_scores, s.is_first) + binary_auc(s.second_scores, other));
        var = var_hanley(a, sizes[c], sizes[d]);
      }
      variances[{c, d}] = var;
      sum += a;
    }
  }
  std::map<std::pair<ClassPair, ClassPair>, double> covariances;
  for (auto a = variances.begin(); a != variances.end(); ++a) {
    for (auto b = std::next(a); b != variances.end(); ++b) {
      const auto& [p, q] = std::pair{a->first, b->first};
      const bool share = p.first == q.first || p.first == q.second || p.second == q.first || p.second == q.second;
      if (share) covariances[{p, q}] = rho * std::sqrt(a->second * b->second);
    }
  }
  AucEstimate est;
  est.value = 2.0 * sum / (static_cast<double>(classes) * (classes - 1));
  est.variance = var_handtill(variances, covariances, classes);
  est.method = VarianceMethod::handtill_propagated;
  est.class_counts = sizes;
  return est;
}

}  // namespace codasep
