#include "manie/methods.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "manie/error.hpp"

namespace manie {

std::string to_string(SparseSolver s) { return s == SparseSolver::lasso ? "lasso" : "stridge"; }

std::string to_string(DerivativeScheme s) { return s == DerivativeScheme::forward ? "forward" : "central"; }

namespace {

void check_weights(const Eigen::VectorXd& w, Eigen::Index m, const char* what) {
  if (w.size() != m) throw ParameterError(std::string(what) + ": weight vector length differs from sample count");
  if (!w.allFinite() || (w.array() < 0.0).any() || (w.array() > 1.0).any()) {
    throw ParameterError(std::string(what) + ": weights must lie in [0, 1]");
  }
}

bool rank_deficient(const DesignProblem& prob) {
  const Eigen::MatrixXd weighted = prob.w.cwiseSqrt().asDiagonal() * prob.phi;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(weighted);
  return qr.rank() < prob.features();
}

}  // namespace

// ---------------------------------------------------------------------------

DesignProblem eg_design(const EgRecord& eg, Eigen::Index node, const Eigen::VectorXd& weights) {
  const Eigen::Index n = eg.nodes();
  const Eigen::Index m = eg.samples();
  DesignProblem prob;
  prob.phi.resize(m, n - 1);
  for (Eigen::Index t = 0; t < m; ++t) {
    const int own = eg.strategies(node, t);
    Eigen::Index col = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == node) continue;
      prob.phi(t, col++) = eg.game.payoff(own, eg.strategies(j, t));
    }
  }
  prob.y = eg.payoffs.row(node).transpose();
  prob.w = weights;
  return prob;
}

Reconstruction eg_infer(const EgRecord& eg, const EgInferOptions& opts, const Eigen::VectorXd& weights) {
  const Eigen::Index n = eg.nodes();
  const Eigen::Index m = eg.samples();
  if (m < 2) throw ParameterError("eg_infer: at least two rounds are required");
  if (n < 2) throw ParameterError("eg_infer: at least two nodes are required");
  check_weights(weights, m, "eg_infer");

  const bool frozen = (eg.strategies.array() == eg.strategies(0, 0)).all();
  if (frozen) warn("eg_infer: every strategy is identical in every round; design is degenerate");

  Reconstruction rec;
  rec.scores = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const DesignProblem prob = eg_design(eg, i, weights);
    if (frozen || rank_deficient(prob)) rec.flagged.push_back(i);
    Coefficients c;
    if (opts.solver == SparseSolver::lasso) {
      LassoOptions lo = opts.lasso;
      lo.scaling.standardize = opts.standardize;
      c = weighted_lasso(prob, opts.alpha, lo);
    } else {
      c = stridge(prob, opts.alpha, opts.threshold, {opts.stridge_iters, {opts.standardize}});
    }
    Eigen::Index col = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) rec.scores(i, j) = c.beta(col++);
    }
  }
  return rec;
}

LossVector eg_per_sample_loss(const EgRecord& eg, const Eigen::MatrixXd& scores) {
  const Eigen::Index n = eg.nodes();
  if (scores.rows() != n || scores.cols() != n) throw ParameterError("eg_per_sample_loss: score matrix shape");
  LossVector loss = LossVector::Zero(eg.samples());
  for (Eigen::Index t = 0; t < eg.samples(); ++t) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double pred = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i) pred += eg.game.payoff(eg.strategies(i, t), eg.strategies(j, t)) * scores(i, j);
      }
      const double r = eg.payoffs(i, t) - pred;
      sum += r * r;
    }
    loss(t) = sum;
  }
  return loss;
}

// ---------------------------------------------------------------------------

namespace {

bool is_missing(const BinaryTimeSeries& bts, Eigen::Index i) {
  return !bts.missing.empty() && bts.missing[static_cast<std::size_t>(i)];
}

}  // namespace

EpidemicDesign epidemic_design(const BinaryTimeSeries& bts, Eigen::Index node, double beta_hat,
                               const Eigen::VectorXd& weights) {
  EpidemicDesign d;
  for (Eigen::Index j = 0; j < bts.nodes(); ++j) {
    if (j != node && !is_missing(bts, j)) d.predictors.push_back(j);
  }
  for (Eigen::Index t = 0; t < bts.samples(); ++t) {
    if (bts.has_successor(t) && bts.states(node, t) == 0) d.rows.push_back(t);
  }
  const auto rows = static_cast<Eigen::Index>(d.rows.size());
  const auto cols = static_cast<Eigen::Index>(d.predictors.size());
  d.problem.phi.resize(rows, cols);
  d.problem.y.resize(rows);
  d.problem.w.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index t = d.rows[r];
    for (Eigen::Index c = 0; c < cols; ++c) d.problem.phi(r, c) = beta_hat * bts.states(d.predictors[c], t);
    d.problem.y(r) = bts.states(node, t + 1);
    d.problem.w(r) = weights(t);
  }
  return d;
}

Reconstruction epidemic_infer(const BinaryTimeSeries& bts, const EpidemicInferOptions& opts,
                              const Eigen::VectorXd& weights) {
  if (!(opts.beta_hat > 0.0)) throw ParameterError("epidemic_infer: beta_hat must be positive");
  check_weights(weights, bts.samples(), "epidemic_infer");
  const Eigen::Index n = bts.nodes();
  Reconstruction rec;
  rec.scores = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (is_missing(bts, i)) continue;
    const EpidemicDesign d = epidemic_design(bts, i, opts.beta_hat, weights);
    const bool identifiable = !d.rows.empty() && !d.predictors.empty() && (d.problem.phi.array() != 0.0).any() &&
                              (d.problem.w.array() > 0.0).any();
    if (!identifiable) {
      rec.flagged.push_back(i);
      continue;
    }
    LassoOptions lo = opts.lasso;
    lo.scaling.standardize = opts.standardize;
    const Coefficients c = weighted_lasso(d.problem, opts.alpha, lo);
    for (std::size_t k = 0; k < d.predictors.size(); ++k) {
      rec.scores(i, d.predictors[k]) = c.beta(static_cast<Eigen::Index>(k));
    }
  }
  if (static_cast<Eigen::Index>(rec.flagged.size()) == n) {
    warn("epidemic_infer: no node has an identifiable infection model");
  }
  return rec;
}

LossVector epidemic_per_sample_loss(const BinaryTimeSeries& bts, const Eigen::MatrixXd& scores, double beta_hat) {
  const Eigen::Index n = bts.nodes();
  if (scores.rows() != n || scores.cols() != n) throw ParameterError("epidemic_per_sample_loss: score matrix shape");
  LossVector loss = LossVector::Zero(bts.samples());
  for (Eigen::Index t = 0; t < bts.samples(); ++t) {
    if (!bts.has_successor(t)) continue;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (is_missing(bts, i) || bts.states(i, t) != 0) continue;
      double drive = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i && !is_missing(bts, j) && bts.states(j, t) != 0) drive += scores(i, j);
      }
      const double pred = std::clamp(beta_hat * drive, 0.0, 1.0);
      const double r = bts.states(i, t + 1) - pred;
      sum += r * r;
    }
    loss(t) = sum;
  }
  return loss;
}

// ---------------------------------------------------------------------------

namespace {

// Full basis matrix for node i: self columns, then one block per other node
// in index order.
Eigen::MatrixXd node_basis(const TimeSeries& ts, Eigen::Index i, const BasisSpec& spec) {
  const Eigen::Index n = ts.nodes();
  const Eigen::Index m = ts.samples();
  const Eigen::Index sw = spec.self_width();
  const Eigen::Index bw = spec.block_width();
  Eigen::MatrixXd phi(m, sw + (n - 1) * bw);
  for (Eigen::Index t = 0; t < m; ++t) {
    const double xi = ts.values(i, t);
    phi(t, 0) = 1.0;
    if (spec.self_harmonics) {
      phi(t, 1) = std::sin(xi);
      phi(t, 2) = std::cos(xi);
    }
    Eigen::Index col = sw;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = ts.values(j, t) - xi;
      for (int h = 1; h <= spec.harmonics; ++h) {
        phi(t, col++) = std::sin(h * d);
        phi(t, col++) = std::cos(h * d);
      }
    }
  }
  return phi;
}

Eigen::Index block_offset(Eigen::Index source, Eigen::Index target, const BasisSpec& spec) {
  const Eigen::Index slot = source < target ? source : source - 1;
  return spec.self_width() + slot * spec.block_width();
}

// Incremental block Cholesky of (G + ridge I) over the selected columns.
// Row k of `proj` holds L^{-1} G(selected, :) and `proj_y` holds L^{-1} b,
// so the weighted residual of the current least-squares fit is
// yy - |proj_y|^2 and the reduction offered by a candidate block is the
// squared norm of its would-be proj_y rows.
class GreedyState {
 public:
  GreedyState(const Eigen::MatrixXd& gram, const Eigen::VectorXd& moment, double ridge)
      : gram_(gram), moment_(moment), ridge_(ridge), proj_(0, gram.cols()), proj_y_(0) {}

  double reduction(Eigen::Index first, Eigen::Index width) const {
    Eigen::MatrixXd schur;
    Eigen::VectorXd u;
    residual_block(first, width, schur, u);
    Eigen::LLT<Eigen::MatrixXd> llt(schur);
    if (llt.info() != Eigen::Success) return 0.0;
    return llt.matrixL().solve(u).squaredNorm();
  }

  void add(Eigen::Index first, Eigen::Index width) {
    Eigen::MatrixXd schur;
    Eigen::VectorXd u;
    residual_block(first, width, schur, u);
    Eigen::LLT<Eigen::MatrixXd> llt(schur);
    if (llt.info() != Eigen::Success) {
      // Numerically redundant block: lean on a larger diagonal shift.
      schur.diagonal().array() += std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff()) * 1e-8;
      llt.compute(schur);
    }
    const Eigen::Index k = proj_.rows();
    Eigen::MatrixXd rows = gram_.middleRows(first, width);
    if (k > 0) rows -= proj_.middleCols(first, width).transpose() * proj_;
    const auto L = llt.matrixL();
    proj_.conservativeResize(k + width, Eigen::NoChange);
    proj_.bottomRows(width) = L.solve(rows);
    proj_y_.conservativeResize(k + width);
    proj_y_.tail(width) = L.solve(u);
  }

  double explained() const { return proj_y_.squaredNorm(); }

 private:
  void residual_block(Eigen::Index first, Eigen::Index width, Eigen::MatrixXd& schur, Eigen::VectorXd& u) const {
    schur = gram_.block(first, first, width, width);
    schur.diagonal().array() += ridge_;
    u = moment_.segment(first, width);
    if (proj_.rows() > 0) {
      const auto h = proj_.middleCols(first, width);
      schur.noalias() -= h.transpose() * h;
      u.noalias() -= h.transpose() * proj_y_;
    }
  }

  const Eigen::MatrixXd& gram_;
  const Eigen::VectorXd& moment_;
  double ridge_;
  Eigen::MatrixXd proj_;
  Eigen::VectorXd proj_y_;
};

}  // namespace

Reconstruction arni_infer(const TimeSeries& ts, const ArniOptions& opts, const Eigen::VectorXd& weights) {
  if (!ts.deriv) throw ParameterError("arni_infer: time series has no derivative estimates");
  if (ts.deriv->rows() != ts.nodes() || ts.deriv->cols() != ts.samples()) {
    throw ParameterError("arni_infer: derivative block shape differs from values");
  }
  if (!ts.values.allFinite() || !ts.deriv->allFinite()) throw ParameterError("arni_infer: non-finite data");
  if (opts.basis.harmonics < 1) throw ParameterError("arni_infer: at least one harmonic is required");
  if (!(opts.ridge > 0.0)) throw ParameterError("arni_infer: ridge must be positive");
  check_weights(weights, ts.samples(), "arni_infer");

  const Eigen::Index n = ts.nodes();
  const Eigen::Index sw = opts.basis.self_width();
  const Eigen::Index bw = opts.basis.block_width();
  const Eigen::Index kmax = opts.kmax < 0 ? n - 1 : std::min<Eigen::Index>(opts.kmax, n - 1);

  Reconstruction rec;
  rec.scores = Eigen::MatrixXd::Zero(n, n);
  rec.basis.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::MatrixXd phi = node_basis(ts, i, opts.basis);
    const Eigen::VectorXd y = ts.deriv->row(i).transpose();
    const Eigen::MatrixXd wphi = weights.asDiagonal() * phi;
    const Eigen::MatrixXd gram = phi.transpose() * wphi;
    const Eigen::VectorXd moment = wphi.transpose() * y;
    const double total = (weights.array() * y.array().square()).sum();

    GreedyState state(gram, moment, opts.ridge);
    state.add(0, sw);
    double explained = state.explained();
    std::vector<bool> taken(n, false);
    taken[i] = true;
    NodeBasisFit& fit = rec.basis[i];
    while (static_cast<Eigen::Index>(fit.blocks.size()) < kmax && total > 0.0) {
      Eigen::Index best = -1;
      double best_gain = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (taken[j]) continue;
        const double gain = state.reduction(block_offset(j, i, opts.basis), bw);
        if (gain > best_gain) {
          best_gain = gain;
          best = j;
        }
      }
      if (best < 0 || best_gain / total < opts.min_improvement) break;
      state.add(block_offset(best, i, opts.basis), bw);
      const double now = state.explained();
      rec.scores(i, best) = (now - explained) / total;
      explained = now;
      taken[best] = true;
      fit.blocks.push_back(best);
    }

    // Final coefficients on the selected columns.
    std::vector<Eigen::Index> cols;
    for (Eigen::Index c = 0; c < sw; ++c) cols.push_back(c);
    for (Eigen::Index j : fit.blocks) {
      for (Eigen::Index c = 0; c < bw; ++c) cols.push_back(block_offset(j, i, opts.basis) + c);
    }
    const auto k = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXd g(k, k);
    Eigen::VectorXd b(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      b(a) = moment(cols[a]);
      for (Eigen::Index c = 0; c < k; ++c) g(a, c) = gram(cols[a], cols[c]);
    }
    g.diagonal().array() += opts.ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
    if (ldlt.info() != Eigen::Success) {
      rec.flagged.push_back(i);
      fit.coef = Eigen::VectorXd::Zero(k);
    } else {
      fit.coef = ldlt.solve(b);
    }
  }
  return rec;
}

LossVector arni_per_sample_loss(const TimeSeries& ts, const Reconstruction& rec, const BasisSpec& basis) {
  if (!ts.deriv) throw ParameterError("arni_per_sample_loss: time series has no derivative estimates");
  const Eigen::Index n = ts.nodes();
  if (static_cast<Eigen::Index>(rec.basis.size()) != n) {
    throw ParameterError("arni_per_sample_loss: reconstruction carries no basis fits for this series");
  }
  LossVector loss = LossVector::Zero(ts.samples());
  for (Eigen::Index i = 0; i < n; ++i) {
    const NodeBasisFit& fit = rec.basis[i];
    const Eigen::Index expected = basis.self_width() + static_cast<Eigen::Index>(fit.blocks.size()) * basis.block_width();
    if (fit.coef.size() != expected) throw ParameterError("arni_per_sample_loss: basis fit size mismatch");
    for (Eigen::Index t = 0; t < ts.samples(); ++t) {
      const double xi = ts.values(i, t);
      double pred = fit.coef(0);
      Eigen::Index c = 1;
      if (basis.self_harmonics) {
        pred += fit.coef(1) * std::sin(xi) + fit.coef(2) * std::cos(xi);
        c = 3;
      }
      for (Eigen::Index j : fit.blocks) {
        const double d = ts.values(j, t) - xi;
        for (int h = 1; h <= basis.harmonics; ++h) {
          pred += fit.coef(c) * std::sin(h * d) + fit.coef(c + 1) * std::cos(h * d);
          c += 2;
        }
      }
      const double r = (*ts.deriv)(i, t) - pred;
      loss(t) += r * r;
    }
  }
  return loss;
}

ArniMethod::ArniMethod(TimeSeries ts, ArniOptions opts) : ts_(std::move(ts)), opts_(opts) {
  if (!ts_.deriv) throw ParameterError("ArniMethod: time series has no derivative estimates");
}

TimeSeries estimate_derivatives(const TimeSeries& ts, DerivativeScheme scheme) {
  if (!(ts.dt > 0.0)) throw ParameterError("estimate_derivatives: dt must be positive");
  const Eigen::Index m = ts.samples();
  TimeSeries out = ts;
  out.deriv = Eigen::MatrixXd::Zero(ts.nodes(), m);
  auto& d = *out.deriv;
  Eigen::Index start = 0;
  while (start < m) {
    Eigen::Index end = start + 1;
    while (end < m && ts.segment_of(end) == ts.segment_of(start)) ++end;
    if (end - start < 2) throw ParameterError("estimate_derivatives: segment with fewer than two samples");
    for (Eigen::Index t = start; t < end; ++t) {
      const bool has_next = t + 1 < end;
      const bool has_prev = t > start;
      if (scheme == DerivativeScheme::central && has_next && has_prev) {
        d.col(t) = (ts.values.col(t + 1) - ts.values.col(t - 1)) / (2.0 * ts.dt);
      } else if (has_next) {
        d.col(t) = (ts.values.col(t + 1) - ts.values.col(t)) / ts.dt;
      } else {
        d.col(t) = (ts.values.col(t) - ts.values.col(t - 1)) / ts.dt;
      }
    }
    start = end;
  }
  return out;
}

}  // namespace manie
