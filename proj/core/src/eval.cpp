#include "manie/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "manie/error.hpp"

namespace manie {

double mann_whitney_auc(std::span<const double> scores, std::span<const bool> positive) {
  if (scores.size() != positive.size()) throw ParameterError("mann_whitney_auc: length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Tied run occupies ranks i+1 .. j; every member gets the mean rank.
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (positive[order[k]]) {
        rank_sum += mid;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw MetricError("AUC undefined without both positives and negatives");
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

EvalReport auc(const Eigen::MatrixXd& scores, const Network& truth, const EntryFilter& keep) {
  const Eigen::Index n = truth.size();
  if (scores.rows() != n || scores.cols() != n) throw ParameterError("auc: score matrix shape differs from truth");
  if (!scores.allFinite()) throw ParameterError("auc: non-finite scores");
  std::vector<double> values;
  std::vector<Eigen::Index> rows;
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = truth.directed ? 0 : i + 1; j < n; ++j) {
      if (i == j || (keep && !keep(i, j))) continue;
      values.push_back(std::abs(scores(i, j)));
      rows.push_back(i);
      cols.push_back(j);
    }
  }
  // std::vector<bool> is not contiguous, so labels live in a plain array.
  const auto labels = std::make_unique<bool[]>(values.size());
  EvalReport r;
  for (std::size_t k = 0; k < values.size(); ++k) {
    labels[k] = truth.adj(rows[k], cols[k]) != 0.0;
    if (labels[k]) ++r.n_pos;
  }
  r.n_neg = values.size() - r.n_pos;
  r.auc = mann_whitney_auc(values, std::span<const bool>(labels.get(), values.size()));
  // A fully inverted ranking is a valid outcome; its score diverges.
  r.neg_log2_auc = r.auc > 0.0 ? neg_log2(r.auc) : std::numeric_limits<double>::infinity();
  return r;
}

EntryFilter exclude_nodes(std::vector<bool> missing) {
  return [missing = std::move(missing)](Eigen::Index i, Eigen::Index j) {
    const auto ok = [&](Eigen::Index k) {
      return static_cast<std::size_t>(k) >= missing.size() || !missing[static_cast<std::size_t>(k)];
    };
    return ok(i) && ok(j);
  };
}

double neg_log2(double auc) {
  if (!(auc > 0.0 && auc <= 1.0)) throw MetricError("neg_log2: AUC must lie in (0, 1]");
  return auc == 1.0 ? 0.0 : -std::log2(auc);
}

}  // namespace manie
