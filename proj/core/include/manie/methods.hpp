#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "manie/dynamics.hpp"
#include "manie/solvers.hpp"

namespace manie {

/// One loss value per sample (time step); non-negative and finite.
using LossVector = Eigen::VectorXd;

/// Basis-regression model retained for one node by the model-free method.
struct NodeBasisFit {
  std::vector<Eigen::Index> blocks;  // source nodes, in selection order
  Eigen::VectorXd coef;              // self columns first, then one block per entry of `blocks`
};

/// Output of a fit. `scores(i, j)` rates the link j -> i; larger magnitude
/// means stronger evidence. The diagonal is zero.
struct Reconstruction {
  Eigen::MatrixXd scores;
  std::vector<NodeBasisFit> basis;    // filled by the model-free method only
  std::vector<Eigen::Index> flagged;  // rows that were rank deficient or unidentifiable
};

/// What the enhancement loop needs from an embedded method: a fit under
/// per-sample weights and the per-sample loss of a reconstruction.
class InferenceMethod {
 public:
  virtual ~InferenceMethod() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index sample_count() const = 0;
  virtual Reconstruction fit(const Eigen::VectorXd& weights) const = 0;
  virtual LossVector per_sample_loss(const Reconstruction& rec) const = 0;

  /// The plain, unweighted base method.
  Reconstruction fit() const { return fit(Eigen::VectorXd::Ones(sample_count())); }
};

// ---------------------------------------------------------------------------
// Evolutionary-game payoffs: g_i(t) = sum_j a_ij P(S_i(t), S_j(t)).

enum class SparseSolver { lasso, stridge };

std::string to_string(SparseSolver s);

struct EgInferOptions {
  SparseSolver solver = SparseSolver::stridge;
  double alpha = 1e-8;     // L1 penalty (lasso) or ridge penalty (stridge), standardized units
  double threshold = 0.1;  // stridge cutoff on unscaled coefficients
  bool standardize = true;
  LassoOptions lasso;
  int stridge_iters = 10;
};

/// Columns are the other nodes in index order (node i itself is skipped).
DesignProblem eg_design(const EgRecord& eg, Eigen::Index node, const Eigen::VectorXd& weights);

Reconstruction eg_infer(const EgRecord& eg, const EgInferOptions& opts, const Eigen::VectorXd& weights);

/// loss_t = sum_i (g_i(t) - sum_j P(S_i(t), S_j(t)) scores_ij)^2.
LossVector eg_per_sample_loss(const EgRecord& eg, const Eigen::MatrixXd& scores);

class EgMethod final : public InferenceMethod {
 public:
  EgMethod(EgRecord eg, EgInferOptions opts) : eg_(std::move(eg)), opts_(opts) {}
  std::string name() const override { return "eg_" + to_string(opts_.solver); }
  Eigen::Index sample_count() const override { return eg_.samples(); }
  Reconstruction fit(const Eigen::VectorXd& weights) const override { return eg_infer(eg_, opts_, weights); }
  LossVector per_sample_loss(const Reconstruction& rec) const override {
    return eg_per_sample_loss(eg_, rec.scores);
  }
  using InferenceMethod::fit;

 private:
  EgRecord eg_;
  EgInferOptions opts_;
};

// ---------------------------------------------------------------------------
// Binary propagation records, linearized infection model solved by
// weighted L1 regression.

struct EpidemicInferOptions {
  EpidemicModel model = EpidemicModel::sis;
  double beta_hat = 0.2;  // only rescales scores; the fitted prediction is invariant to it
  double alpha = 1e-2;    // L1 penalty in standardized units
  bool standardize = true;
  LassoOptions lasso;
};

/// Regression problem for one node: one row per transition t -> t + 1 with
/// s_i(t) = 0; target s_i(t + 1); predictors beta_hat * s_j(t) for
/// non-missing j != i.
struct EpidemicDesign {
  DesignProblem problem;
  std::vector<Eigen::Index> predictors;  // node index of each column
  std::vector<Eigen::Index> rows;        // sample index t of each row
};

EpidemicDesign epidemic_design(const BinaryTimeSeries& bts, Eigen::Index node, double beta_hat,
                               const Eigen::VectorXd& weights);

Reconstruction epidemic_infer(const BinaryTimeSeries& bts, const EpidemicInferOptions& opts,
                              const Eigen::VectorXd& weights);

/// loss_t = sum over non-missing i susceptible at t of
/// (s_i(t + 1) - clamp(beta_hat * sum_j scores_ij s_j(t), 0, 1))^2.
/// Samples without a successor in the same trajectory get loss 0.
LossVector epidemic_per_sample_loss(const BinaryTimeSeries& bts, const Eigen::MatrixXd& scores, double beta_hat);

class EpidemicMethod final : public InferenceMethod {
 public:
  EpidemicMethod(BinaryTimeSeries bts, EpidemicInferOptions opts) : bts_(std::move(bts)), opts_(opts) {}
  std::string name() const override { return "cs_" + to_string(opts_.model); }
  Eigen::Index sample_count() const override { return bts_.samples(); }
  Reconstruction fit(const Eigen::VectorXd& weights) const override {
    return epidemic_infer(bts_, opts_, weights);
  }
  LossVector per_sample_loss(const Reconstruction& rec) const override {
    return epidemic_per_sample_loss(bts_, rec.scores, opts_.beta_hat);
  }
  using InferenceMethod::fit;

 private:
  BinaryTimeSeries bts_;
  EpidemicInferOptions opts_;
};

// ---------------------------------------------------------------------------
// Model-free greedy basis regression on derivatives.

/// Pair block for j -> i: sin(h (x_j - x_i)), cos(h (x_j - x_i)) for
/// h = 1..harmonics. Self block: 1, plus sin(x_i), cos(x_i) when
/// `self_harmonics` is set.
struct BasisSpec {
  int harmonics = 2;
  bool self_harmonics = true;

  Eigen::Index self_width() const { return self_harmonics ? 3 : 1; }
  Eigen::Index block_width() const { return 2 * harmonics; }
};

struct ArniOptions {
  BasisSpec basis;
  int kmax = -1;                  // max incoming links per node; -1 means N - 1
  double min_improvement = 1e-4;  // stop when a block explains less than this share
  double ridge = 1e-8;
};

/// For each node, forward selection of source blocks minimizing the weighted
/// residual of the derivative. The score of j -> i is the share of the
/// weighted target energy removed when block j was added (0 if never
/// selected). Requires `ts.deriv`.
Reconstruction arni_infer(const TimeSeries& ts, const ArniOptions& opts, const Eigen::VectorXd& weights);

/// loss_t = sum_i (deriv_i(t) - basis_i(t) . coef_i)^2 with the retained fits.
LossVector arni_per_sample_loss(const TimeSeries& ts, const Reconstruction& rec, const BasisSpec& basis);

class ArniMethod final : public InferenceMethod {
 public:
  ArniMethod(TimeSeries ts, ArniOptions opts);
  std::string name() const override { return "arni"; }
  Eigen::Index sample_count() const override { return ts_.samples(); }
  Reconstruction fit(const Eigen::VectorXd& weights) const override { return arni_infer(ts_, opts_, weights); }
  LossVector per_sample_loss(const Reconstruction& rec) const override {
    return arni_per_sample_loss(ts_, rec, opts_.basis);
  }
  using InferenceMethod::fit;

 private:
  TimeSeries ts_;
  ArniOptions opts_;
};

enum class DerivativeScheme { forward, central };

std::string to_string(DerivativeScheme s);

/// Finite differences inside each segment. Forward assigns
/// (x(t+1) - x(t)) / dt to sample t and falls back to a backward difference
/// on a segment's last sample; central uses one-sided differences at segment
/// ends. Every segment needs at least two samples.
TimeSeries estimate_derivatives(const TimeSeries& ts, DerivativeScheme scheme);

}  // namespace manie
