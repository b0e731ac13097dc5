#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "manie/graph.hpp"

namespace manie {

struct EvalReport {
  double auc = 0.0;
  double neg_log2_auc = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

/// Returns true for candidate entries (i, j) that take part in scoring.
using EntryFilter = std::function<bool(Eigen::Index i, Eigen::Index j)>;

/// Normalized Mann-Whitney U with mid-ranks for ties:
/// (sum of positive ranks - n_pos (n_pos + 1) / 2) / (n_pos n_neg).
/// Throws MetricError without at least one positive and one negative.
double mann_whitney_auc(std::span<const double> scores, std::span<const bool> positive);

/// AUC of |scores| against the links of `truth`. Directed truths use all
/// off-diagonal entries; undirected truths use the upper triangle (i < j).
/// `keep`, when set, further restricts the candidate entries.
EvalReport auc(const Eigen::MatrixXd& scores, const Network& truth, const EntryFilter& keep = {});

/// Filter dropping every entry whose row or column is a missing node.
EntryFilter exclude_nodes(std::vector<bool> missing);

/// -log2(auc); throws MetricError unless auc lies in (0, 1].
double neg_log2(double auc);

}  // namespace manie
