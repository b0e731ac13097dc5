#pragma once

#include <vector>

#include <Eigen/Dense>

namespace manie {

/// Weighted regression problem: rows of `phi` are samples, `w` their weights.
struct DesignProblem {
  Eigen::MatrixXd phi;
  Eigen::VectorXd y;
  Eigen::VectorXd w;

  Eigen::Index samples() const { return phi.rows(); }
  Eigen::Index features() const { return phi.cols(); }

  /// Throws ParameterError on shape mismatch, non-finite entries or weights
  /// outside [0, 1].
  void validate() const;

  static DesignProblem unweighted(Eigen::MatrixXd phi, Eigen::VectorXd y);
};

struct Coefficients {
  Eigen::VectorXd beta;
  std::vector<Eigen::Index> support;  // indices with beta != 0
  bool converged = true;
  int iterations = 0;

  static Coefficients from_beta(Eigen::VectorXd beta);
};

/// Columns are rescaled to unit weighted norm sqrt(sum_t w_t phi_tp^2)
/// before solving and coefficients mapped back afterwards, so penalties act
/// on the standardized problem. Columns with zero weighted norm get a zero
/// coefficient.
struct SolverScaling {
  bool standardize = false;
};

/// argmin sum_t w_t (y_t - phi_t beta)^2 + alpha |beta|^2, via a Cholesky
/// (LDL^T) factorization of the weighted normal equations. Throws
/// SingularError when the system is singular (possible only for alpha = 0).
Coefficients weighted_ridge(const DesignProblem& prob, double alpha, SolverScaling scaling = {});

struct LassoOptions {
  double tol = 1e-8;
  int max_iter = 10000;
  SolverScaling scaling;
};

/// argmin 1/2 sum_t w_t (y_t - phi_t beta)^2 + alpha |beta|_1 by cyclic
/// coordinate descent with soft-thresholding. Stops when the largest
/// coordinate change in a sweep drops below tol; otherwise warns and returns
/// the last iterate with converged = false.
Coefficients weighted_lasso(const DesignProblem& prob, double alpha, const LassoOptions& opts = {});

/// Objective minimized by weighted_lasso (unstandardized coordinates).
double lasso_objective(const DesignProblem& prob, const Eigen::VectorXd& beta, double alpha);

struct StridgeOptions {
  int iters = 10;
  SolverScaling scaling;
};

/// Sequential threshold ridge: ridge on the active set, drop coefficients
/// with |beta_p| < threshold, repeat until the support is stable or `iters`
/// rounds have run, then refit on the survivors.
Coefficients stridge(const DesignProblem& prob, double alpha, double threshold, const StridgeOptions& opts = {});

}  // namespace manie
