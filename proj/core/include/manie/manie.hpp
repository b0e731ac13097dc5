#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "manie/methods.hpp"

namespace manie {

/// Per-sample weights v in [0, 1]^M.
using SampleWeights = Eigen::VectorXd;

/// How lambda0 is picked from the losses of the first, unweighted fit.
enum class LambdaInit {
  quantile,   // init_lambda with `lambda_quantile`
  log_split,  // init_lambda_log_split
};

struct ManieConfig {
  /// Initial pace parameter. Non-positive means "pick from the first losses"
  /// according to `lambda_init`.
  double lambda0 = 0.0;
  LambdaInit lambda_init = LambdaInit::quantile;
  double lambda_quantile = 0.75;
  double growth = 1.25;  // lambda <- growth * lambda after every weight update
  double eps = 1e-3;     // stop when max_t |v_t - v_t^prev| < eps
  int max_outer = 50;
  int max_zero_retries = 10;

  void validate() const;
};

struct ManieResult {
  Reconstruction reconstruction;  // fit from the last outer iteration
  Reconstruction base;            // first fit, made with all-ones weights
  SampleWeights v_final;
  std::vector<SampleWeights> v_trajectory;  // weights produced by each iteration
  std::vector<LossVector> loss_trajectory;  // losses seen by each iteration
  std::vector<double> lambda_trajectory;    // pace used by each weight update
  int iterations = 0;
  bool converged = false;
};

/// Closed-form minimizer of v L + lambda/2 (v^2 - 2 v) over v in [0, 1]:
/// v = 1 - L / lambda when L < lambda, else 0.
SampleWeights update_weights(const LossVector& losses, double lambda);

/// Linear-interpolated quantile of the losses, floored at 1e-12.
double init_lambda(const LossVector& losses, double quantile = 0.75);

/// Splits the log-losses into a low and a high group by maximizing the
/// between-group variance (Otsu's threshold) and returns the geometric mean
/// of the two losses adjacent to the split, floored at 1e-12. Samples in the
/// low group start with positive weight. Losses at or below the floor take
/// no part in the split; with fewer than two left, the largest loss (or the
/// floor) is returned.
double init_lambda_log_split(const LossVector& losses);

std::string to_string(LambdaInit rule);
LambdaInit lambda_init_from_string(const std::string& name);

/// Alternates weighted fits and closed-form weight updates, starting from
/// all-ones weights, growing lambda geometrically until the weights settle.
ManieResult run_manie(const InferenceMethod& method, const ManieConfig& cfg);

/// Self-paced objective sum_t v_t L_t + lambda/2 sum_t (v_t^2 - 2 v_t).
double self_paced_objective(const LossVector& losses, const SampleWeights& v, double lambda);

}  // namespace manie
