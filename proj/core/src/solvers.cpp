#include "manie/solvers.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "manie/error.hpp"

namespace manie {

void DesignProblem::validate() const {
  if (y.size() != phi.rows() || w.size() != phi.rows()) {
    throw ParameterError("DesignProblem: phi, y and w must have the same number of rows");
  }
  if (phi.cols() < 1) throw ParameterError("DesignProblem: at least one feature is required");
  if (!phi.allFinite() || !y.allFinite() || !w.allFinite()) {
    throw ParameterError("DesignProblem: non-finite entries");
  }
  if ((w.array() < 0.0).any() || (w.array() > 1.0).any()) {
    throw ParameterError("DesignProblem: weights must lie in [0, 1]");
  }
}

DesignProblem DesignProblem::unweighted(Eigen::MatrixXd phi, Eigen::VectorXd y) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(phi.rows());
  return {std::move(phi), std::move(y), std::move(w)};
}

Coefficients Coefficients::from_beta(Eigen::VectorXd beta) {
  Coefficients c;
  c.beta = std::move(beta);
  for (Eigen::Index p = 0; p < c.beta.size(); ++p) {
    if (c.beta(p) != 0.0) c.support.push_back(p);
  }
  return c;
}

namespace {

// Weighted Gram matrix and moment vector. Samples are accumulated one at a
// time in index order, so a zero-weight sample leaves every partial sum
// bitwise unchanged and is indistinguishable from a deleted row.
struct Moments {
  Eigen::MatrixXd gram;  // phi^T W phi
  Eigen::VectorXd rhs;   // phi^T W y
};

Moments weighted_moments(const DesignProblem& prob, const std::vector<Eigen::Index>& cols,
                         const Eigen::VectorXd& scale) {
  const auto k = static_cast<Eigen::Index>(cols.size());
  Moments m{Eigen::MatrixXd::Zero(k, k), Eigen::VectorXd::Zero(k)};
  Eigen::VectorXd row(k);
  for (Eigen::Index t = 0; t < prob.samples(); ++t) {
    const double wt = prob.w(t);
    if (wt == 0.0) continue;
    for (Eigen::Index a = 0; a < k; ++a) row(a) = prob.phi(t, cols[a]) / scale(cols[a]);
    for (Eigen::Index a = 0; a < k; ++a) {
      const double wa = wt * row(a);
      m.rhs(a) += wa * prob.y(t);
      for (Eigen::Index b = 0; b <= a; ++b) m.gram(a, b) += wa * row(b);
    }
  }
  m.gram.triangularView<Eigen::StrictlyUpper>() = m.gram.transpose();
  return m;
}

// Per-column scale factors; 0 marks a column that carries no weighted signal
// and is excluded. Without standardization every usable column has scale 1.
Eigen::VectorXd column_scales(const DesignProblem& prob, SolverScaling scaling) {
  Eigen::VectorXd scale(prob.features());
  for (Eigen::Index p = 0; p < prob.features(); ++p) {
    double ss = 0.0;
    for (Eigen::Index t = 0; t < prob.samples(); ++t) ss += prob.w(t) * prob.phi(t, p) * prob.phi(t, p);
    if (scaling.standardize) {
      scale(p) = std::sqrt(ss);
    } else {
      scale(p) = 1.0;
    }
  }
  return scale;
}

std::vector<Eigen::Index> usable_columns(const Eigen::VectorXd& scale) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index p = 0; p < scale.size(); ++p) {
    if (scale(p) > 0.0) cols.push_back(p);
  }
  return cols;
}

// Ridge solve restricted to `cols`; returns the full-length unscaled beta.
Eigen::VectorXd ridge_on(const DesignProblem& prob, const std::vector<Eigen::Index>& cols,
                         const Eigen::VectorXd& scale, double alpha) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(prob.features());
  if (cols.empty()) return beta;
  Moments m = weighted_moments(prob, cols, scale);
  m.gram.diagonal().array() += alpha;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m.gram);
  const auto d = ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !(dmax > 0.0) ||
      d.cwiseAbs().minCoeff() <= dmax * static_cast<double>(cols.size()) * std::numeric_limits<double>::epsilon() ||
      (d.array() < 0.0).any()) {
    throw SingularError("weighted_ridge: normal equations are singular");
  }
  const Eigen::VectorXd sol = ldlt.solve(m.rhs);
  for (std::size_t a = 0; a < cols.size(); ++a) beta(cols[a]) = sol(static_cast<Eigen::Index>(a)) / scale(cols[a]);
  return beta;
}

}  // namespace

Coefficients weighted_ridge(const DesignProblem& prob, double alpha, SolverScaling scaling) {
  prob.validate();
  if (!(alpha >= 0.0)) throw ParameterError("weighted_ridge: alpha must be non-negative");
  const Eigen::VectorXd scale = column_scales(prob, scaling);
  return Coefficients::from_beta(ridge_on(prob, usable_columns(scale), scale, alpha));
}

double lasso_objective(const DesignProblem& prob, const Eigen::VectorXd& beta, double alpha) {
  const Eigen::VectorXd r = prob.y - prob.phi * beta;
  return 0.5 * (prob.w.array() * r.array().square()).sum() + alpha * beta.cwiseAbs().sum();
}

Coefficients weighted_lasso(const DesignProblem& prob, double alpha, const LassoOptions& opts) {
  prob.validate();
  if (!(alpha >= 0.0)) throw ParameterError("weighted_lasso: alpha must be non-negative");
  if (!(opts.tol > 0.0) || opts.max_iter < 1) throw ParameterError("weighted_lasso: bad tolerance settings");

  const Eigen::VectorXd scale = column_scales(prob, opts.scaling);
  const auto cols = usable_columns(scale);
  const auto k = static_cast<Eigen::Index>(cols.size());
  Coefficients out;
  out.beta = Eigen::VectorXd::Zero(prob.features());
  if (k == 0) return out;

  // Covariance-form coordinate descent on the k usable columns.
  const Moments m = weighted_moments(prob, cols, scale);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd gb = Eigen::VectorXd::Zero(k);  // gram * b, kept current
  bool converged = false;
  int sweep = 0;
  while (sweep < opts.max_iter) {
    ++sweep;
    double max_change = 0.0;
    for (Eigen::Index p = 0; p < k; ++p) {
      const double gpp = m.gram(p, p);
      if (!(gpp > 0.0)) continue;
      const double z = m.rhs(p) - (gb(p) - gpp * b(p));
      double next = 0.0;
      if (z > alpha) {
        next = (z - alpha) / gpp;
      } else if (z < -alpha) {
        next = (z + alpha) / gpp;
      }
      const double delta = next - b(p);
      if (delta != 0.0) {
        gb += delta * m.gram.col(p);
        b(p) = next;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change < opts.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    warn("weighted_lasso: no convergence after " + std::to_string(opts.max_iter) + " sweeps");
  }
  for (Eigen::Index a = 0; a < k; ++a) out.beta(cols[a]) = b(a) / scale(cols[a]);
  Coefficients c = Coefficients::from_beta(std::move(out.beta));
  c.converged = converged;
  c.iterations = sweep;
  return c;
}

Coefficients stridge(const DesignProblem& prob, double alpha, double threshold, const StridgeOptions& opts) {
  prob.validate();
  if (!(alpha >= 0.0)) throw ParameterError("stridge: alpha must be non-negative");
  if (!(threshold >= 0.0)) throw ParameterError("stridge: threshold must be non-negative");
  if (opts.iters < 1) throw ParameterError("stridge: iters must be positive");

  const Eigen::VectorXd scale = column_scales(prob, opts.scaling);
  std::vector<Eigen::Index> active = usable_columns(scale);
  Eigen::VectorXd beta = ridge_on(prob, active, scale, alpha);
  int round = 0;
  while (round < opts.iters) {
    ++round;
    std::vector<Eigen::Index> survivors;
    for (Eigen::Index p : active) {
      if (std::abs(beta(p)) >= threshold) survivors.push_back(p);
    }
    if (survivors.size() == active.size()) break;
    active = std::move(survivors);
    beta = ridge_on(prob, active, scale, alpha);
  }
  Coefficients c = Coefficients::from_beta(std::move(beta));
  c.iterations = round;
  return c;
}

}  // namespace manie
