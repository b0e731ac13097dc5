#include "manie/manie.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "manie/error.hpp"

namespace manie {

void ManieConfig::validate() const {
  if (!(growth > 1.0)) throw ParameterError("ManieConfig: growth factor must exceed 1");
  if (!(eps > 0.0)) throw ParameterError("ManieConfig: eps must be positive");
  if (max_outer < 1) throw ParameterError("ManieConfig: max_outer must be positive");
  if (max_zero_retries < 0) throw ParameterError("ManieConfig: max_zero_retries must be non-negative");
  if (!(lambda_quantile >= 0.0 && lambda_quantile <= 1.0)) {
    throw ParameterError("ManieConfig: lambda_quantile must lie in [0, 1]");
  }
  if (!std::isfinite(lambda0)) throw ParameterError("ManieConfig: lambda0 must be finite");
}

SampleWeights update_weights(const LossVector& losses, double lambda) {
  if (!(lambda > 0.0)) throw ContractError("update_weights: lambda must be positive");
  SampleWeights v(losses.size());
  for (Eigen::Index t = 0; t < losses.size(); ++t) {
    const double l = losses(t);
    if (!(l >= 0.0)) throw ContractError("update_weights: losses must be non-negative");
    v(t) = l < lambda ? 1.0 - l / lambda : 0.0;
  }
  return v;
}

double init_lambda(const LossVector& losses, double quantile) {
  constexpr double floor = 1e-12;
  if (!(quantile >= 0.0 && quantile <= 1.0)) throw ParameterError("init_lambda: quantile must lie in [0, 1]");
  if (losses.size() == 0) return floor;
  std::vector<double> sorted(losses.data(), losses.data() + losses.size());
  std::sort(sorted.begin(), sorted.end());
  const double pos = quantile * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double q = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  return std::max(q, floor);
}

double init_lambda_log_split(const LossVector& losses) {
  constexpr double floor = 1e-12;
  std::vector<double> sorted(losses.data(), losses.data() + losses.size());
  std::sort(sorted.begin(), sorted.end());
  // Losses at the floor (exact fits, leverage-one rows) are active whatever
  // lambda is; on a log scale they would dominate the split.
  sorted.erase(sorted.begin(), std::upper_bound(sorted.begin(), sorted.end(), floor));
  const std::size_t m = sorted.size();
  if (m == 0) return floor;
  if (m < 2) return std::max(sorted.back(), floor);

  std::vector<double> logs(m);
  for (std::size_t t = 0; t < m; ++t) logs[t] = std::log(sorted[t]);
  double total = 0.0;
  for (double x : logs) total += x;

  double best = -1.0, prefix = 0.0;
  std::size_t split = 1;  // size of the low group
  for (std::size_t k = 1; k < m; ++k) {
    prefix += logs[k - 1];
    if (logs[k] == logs[k - 1]) continue;  // never split tied values
    const double n0 = static_cast<double>(k), n1 = static_cast<double>(m - k);
    const double mu0 = prefix / n0, mu1 = (total - prefix) / n1;
    const double between = n0 * n1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      split = k;
    }
  }
  if (best < 0.0) return std::max(sorted.back(), floor);  // all losses equal
  return std::max(std::sqrt(sorted[split - 1]) * std::sqrt(sorted[split]), floor);
}

std::string to_string(LambdaInit rule) { return rule == LambdaInit::quantile ? "quantile" : "log_split"; }

LambdaInit lambda_init_from_string(const std::string& name) {
  if (name == "quantile") return LambdaInit::quantile;
  if (name == "log_split") return LambdaInit::log_split;
  throw ParameterError("unknown lambda initialization '" + name + "'");
}

double self_paced_objective(const LossVector& losses, const SampleWeights& v, double lambda) {
  return v.dot(losses) + 0.5 * lambda * (v.array().square() - 2.0 * v.array()).sum();
}

ManieResult run_manie(const InferenceMethod& method, const ManieConfig& cfg) {
  cfg.validate();
  const Eigen::Index m = method.sample_count();
  ManieResult out;
  SampleWeights v = SampleWeights::Ones(m);
  double lambda = cfg.lambda0;

  for (int iter = 0; iter < cfg.max_outer; ++iter) {
    Reconstruction rec = method.fit(v);
    LossVector losses = method.per_sample_loss(rec);
    if (losses.size() != m) {
      throw NumericalError(method.name() + ": per-sample loss has wrong length at iteration " +
                           std::to_string(iter + 1));
    }
    if (!losses.allFinite()) {
      throw NumericalError(method.name() + ": non-finite per-sample loss at iteration " + std::to_string(iter + 1));
    }
    if (iter == 0) {
      out.base = rec;
      if (!(lambda > 0.0)) {
        lambda = cfg.lambda_init == LambdaInit::quantile ? init_lambda(losses, cfg.lambda_quantile)
                                                         : init_lambda_log_split(losses);
      }
    }

    SampleWeights next = update_weights(losses, lambda);
    for (int retry = 0; (next.array() == 0.0).all() && m > 0; ++retry) {
      if (retry >= cfg.max_zero_retries) {
        throw NumericalError(method.name() + ": every sample rejected at iteration " + std::to_string(iter + 1) +
                             " even after growing lambda");
      }
      lambda *= cfg.growth;
      next = update_weights(losses, lambda);
    }

    out.v_trajectory.push_back(next);
    out.loss_trajectory.push_back(std::move(losses));
    out.lambda_trajectory.push_back(lambda);
    out.reconstruction = std::move(rec);
    out.iterations = iter + 1;
    lambda *= cfg.growth;

    const double change = m > 0 ? (next - v).cwiseAbs().maxCoeff() : 0.0;
    v = std::move(next);
    if (change < cfg.eps) {
      out.converged = true;
      break;
    }
  }
  out.v_final = v;
  return out;
}

}  // namespace manie
