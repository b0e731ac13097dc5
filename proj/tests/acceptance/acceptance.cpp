// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "manie/csv.hpp"
#include "manie/error.hpp"
#include "manie/eval.hpp"
#include "manie/experiment.hpp"
#include "manie/manie.hpp"
#include "manie/random.hpp"
#include "manie/solvers.hpp"

using namespace manie;

namespace {

const std::string kConfigs = MANIE_CONFIG_DIR;
const std::string kFixtures = MANIE_FIXTURE_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void check(const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream timing;
  timing.precision(3);
  timing << secs << " s";
  if (budget_s > 0) {
    timing << " of " << budget_s << " s";
    if (secs >= budget_s) {
      o.pass = false;
      o.detail += "; over time budget";
    }
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << timing.str() << "]\n"
            << std::flush;
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

double mean(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / double(x.size()); }

double std_error(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / double(x.size() - 1) / double(x.size()));
}

ExperimentConfig load_one(const std::string& file) {
  auto cfgs = load_config_file(kConfigs + "/" + file);
  if (cfgs.size() != 1) throw ParameterError(file + ": expected one experiment");
  return cfgs.front();
}

// Paired AUCs of one experiment run in both modes, keyed by seed order.
struct Paired {
  std::vector<double> base, manie;
};

Paired paired_aucs(const std::vector<ResultRow>& rows) {
  Paired p;
  for (const auto& r : rows) {
    if (!r.ok()) throw NumericalError("seed " + std::to_string(r.seed) + " failed: " + r.error);
    (r.manie ? p.manie : p.base).push_back(r.auc);
  }
  if (p.base.size() != p.manie.size()) throw ParameterError("unpaired rows");
  return p;
}

// ---------------------------------------------------------------------------

Outcome closed_form() {
  Rng rng(2024);
  std::uniform_real_distribution<double> log_l(-3.0, 1.0), log_lambda(-2.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double loss = std::pow(10.0, log_l(rng));
    const double lambda = std::pow(10.0, log_lambda(rng));
    const double v = update_weights(LossVector::Constant(1, loss), lambda)(0);
    // Per-sample objective v L + lambda/2 (v^2 - 2v) on a 1e-5 grid over [0, 1].
    double best_v = 0.0, best_f = std::numeric_limits<double>::infinity();
    for (int g = 0; g <= 100000; ++g) {
      const double x = g * 1e-5;
      const double f = x * loss + 0.5 * lambda * (x * x - 2.0 * x);
      if (f < best_f) {
        best_f = f;
        best_v = x;
      }
    }
    worst = std::max(worst, std::abs(v - best_v));
  }
  return {worst <= 1e-4, "max |v - v_grid| = " + fmt(worst) + " over 100 pairs (tol 1e-4)"};
}

Outcome degeneracy() {
  struct Case {
    std::string label, doc;
  };
  const nlohmann::json net{{"generator", "fixture"}, {"path", kFixtures + "/zachary.edges"}};
  const std::vector<Case> cases{
      {"arni", R"({"dynamics": {"model": "kuramoto1", "segments": 50}, "scenario": "_2", "method": {"name": "arni"}})"},
      {"eg_stridge", R"({"dynamics": {"model": "eg"}, "scenario": "_1", "method": {"name": "eg_stridge"}})"},
      {"eg_lasso", R"({"dynamics": {"model": "eg"}, "scenario": "_1", "method": {"name": "eg_lasso", "alpha": 1e-3}})"},
      {"cs_sis", R"({"dynamics": {"model": "sis", "segments": 10}, "scenario": "_2", "method": {"name": "cs"}})"},
      {"cs_cp", R"({"dynamics": {"model": "cp", "segments": 10}, "scenario": "_2", "method": {"name": "cs"}})"},
  };
  std::string detail;
  bool all = true;
  for (const auto& c : cases) {
    auto doc = nlohmann::json::parse(c.doc);
    doc["network"] = net;
    auto cfg = experiment_from_json(doc);
    cfg.manie.lambda0 = 1e12;
    const auto run = prepare_run(cfg, 1);
    const auto base = run.method->fit();
    const auto result = run_manie(*run.method, cfg.manie);
    const bool same = result.reconstruction.scores.rows() == base.scores.rows() &&
                      std::equal(base.scores.data(), base.scores.data() + base.scores.size(),
                                 result.reconstruction.scores.data(), [](double a, double b) {
                                   return std::memcmp(&a, &b, sizeof a) == 0;
                                 });
    all = all && same;
    detail += c.label + (same ? " identical, " : " DIFFERS, ");
  }
  detail.resize(detail.size() - 2);
  return {all, detail};
}

Outcome solver_oracles() {
  Rng rng(99);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  auto random_problem = [&](Eigen::Index m, Eigen::Index p) {
    DesignProblem prob;
    prob.phi.resize(m, p);
    prob.y.resize(m);
    prob.w.resize(m);
    for (Eigen::Index t = 0; t < m; ++t) {
      for (Eigen::Index c = 0; c < p; ++c) prob.phi(t, c) = g(rng);
      prob.y(t) = g(rng);
      prob.w(t) = u(rng);
    }
    return prob;
  };

  double ridge_err = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto prob = random_problem(40, 6);
    const double alpha = 0.1 * (k % 4);
    const Eigen::MatrixXd w = prob.w.asDiagonal();
    const Eigen::MatrixXd a = prob.phi.transpose() * w * prob.phi + alpha * Eigen::MatrixXd::Identity(6, 6);
    const Eigen::VectorXd direct = a.fullPivLu().solve(prob.phi.transpose() * w * prob.y);
    ridge_err = std::max(ridge_err, (weighted_ridge(prob, alpha).beta - direct).cwiseAbs().maxCoeff());
  }

  double lasso_gap = 0.0;
  for (int k = 0; k < 3; ++k) {
    const auto prob = random_problem(12, 3);
    const double alpha = 0.05;
    Eigen::Vector3d centre = Eigen::Vector3d::Zero();
    double half = 4.0, best = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 40; ++round) {
      Eigen::Vector3d arg = centre;
      for (int a = -10; a <= 10; ++a) {
        for (int b = -10; b <= 10; ++b) {
          for (int c = -10; c <= 10; ++c) {
            const Eigen::Vector3d x = centre + half / 10.0 * Eigen::Vector3d(a, b, c);
            const double f = lasso_objective(prob, x, alpha);
            if (f < best) {
              best = f;
              arg = x;
            }
          }
        }
      }
      centre = arg;
      half /= 3.0;
    }
    lasso_gap = std::max(lasso_gap, std::abs(lasso_objective(prob, weighted_lasso(prob, alpha).beta, alpha) - best));
  }

  auto planted = random_problem(60, 5);
  planted.w.setOnes();
  Eigen::VectorXd truth(5);
  truth << 1.5, 0.0, -2.0, 0.0, 0.7;
  planted.y = planted.phi * truth;
  const auto sr = stridge(planted, 1e-8, 0.1);
  const bool support_ok = sr.support == std::vector<Eigen::Index>{0, 2, 4};

  const bool pass = ridge_err <= 1e-10 && lasso_gap <= 1e-6 && support_ok;
  return {pass, "ridge max err " + fmt(ridge_err) + " (tol 1e-10), lasso objective gap " + fmt(lasso_gap) +
                    " (tol 1e-6), stridge support " + (support_ok ? "recovered" : "WRONG")};
}

Outcome noise_free_recovery() {
  auto eg = experiment_from_json(nlohmann::json::parse(R"({
    "network": {"generator": "er", "n": 40, "p": 0.1},
    "dynamics": {"model": "eg", "game": "pdg", "game_param": 1.2, "rounds": 10, "reps": 6},
    "scenario": "_0", "method": {"name": "eg_stridge"}, "manie": "off",
    "seeds": {"first": 1, "count": 10}})"));
  double eg_min = 1.0;
  for (const auto& r : run_experiment(eg)) {
    if (!r.ok()) throw NumericalError(r.error);
    eg_min = std::min(eg_min, r.auc);
  }

  auto arni = experiment_from_json(nlohmann::json::parse(R"({
    "network": {"generator": "fixture", "path": ")" + kFixtures + R"(/zachary.edges"},
    "dynamics": {"model": "kuramoto1", "segments": 100, "steps": 5, "derivatives": "exact"},
    "scenario": "_0", "method": {"name": "arni"}, "manie": "off", "seeds": [1]})"));
  const auto rows = run_experiment(arni);
  if (!rows.front().ok()) throw NumericalError(rows.front().error);
  const double arni_auc = rows.front().auc;

  return {eg_min >= 0.99 && arni_auc >= 0.99,
          "EG stridge ER(40, 0.1) min AUC over 10 seeds " + fmt(eg_min) + ", ARNI ZK Kuramoto1 AUC " + fmt(arni_auc) +
              " (need >= 0.99)"};
}

Outcome directional() {
  struct Case {
    std::string file;
    bool local;
  };
  const std::vector<Case> cases{{"zk_kuramoto1_2.json", true}, {"zk_eg_1.json", true}, {"zk_sis_2.json", false}};
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto cfg = load_one(c.file);
    if (cfg.seeds.size() != 20) throw ParameterError(c.file + ": expected 20 seeds");
    const auto p = paired_aucs(run_experiment(cfg));
    const double delta = mean(p.manie) - mean(p.base);
    const bool ok = delta >= 0.0 && (!c.local || delta > 0.02);
    pass = pass && ok;
    detail += cfg.scenario_id() + " " + fmt(mean(p.base)) + " -> " + fmt(mean(p.manie)) + " (delta " + fmt(delta, 3) +
              (c.local ? ", need > 0.02" : ", need >= 0") + "); ";
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

// One-sided Mann-Whitney test that `low` tends to be smaller than `high`,
// normal approximation with tie correction.
double rank_sum_p(const std::vector<double>& low, const std::vector<double>& high) {
  struct Item {
    double v;
    bool low;
  };
  std::vector<Item> all;
  for (double v : low) all.push_back({v, true});
  for (double v : high) all.push_back({v, false});
  std::sort(all.begin(), all.end(), [](const Item& a, const Item& b) { return a.v < b.v; });
  const double n1 = double(low.size()), n2 = double(high.size()), n = n1 + n2;
  double rank_low = 0.0, tie_term = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].v == all[i].v) ++j;
    const double mid = 0.5 * double(i + 1 + j);
    const double t = double(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].low) rank_low += mid;
    }
    i = j;
  }
  const double u = rank_low - n1 * (n1 + 1.0) / 2.0;
  const double mu = n1 * n2 / 2.0;
  const double sigma = std::sqrt(n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0))));
  const double z = (u - mu) / sigma;
  return 0.5 * std::erfc(-z / std::sqrt(2.0));  // P(Z <= z)
}

Outcome weight_separation() {
  auto cfg = load_one("zk_kuramoto1_2.json");
  std::vector<double> noisy, clean;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto run = prepare_run(cfg, seed);
    const auto result = run_manie(*run.method, cfg.manie);
    for (Eigen::Index t = 0; t < result.v_final.size(); ++t) {
      (run.mask.noisy[static_cast<std::size_t>(t)] ? noisy : clean).push_back(result.v_final(t));
    }
  }
  const double p = rank_sum_p(noisy, clean);
  const bool pass = mean(noisy) < mean(clean) && p < 0.01;
  return {pass, "mean v noisy " + fmt(mean(noisy)) + " vs clean " + fmt(mean(clean)) + " (" +
                    std::to_string(noisy.size()) + "/" + std::to_string(clean.size()) + " samples), p = " + fmt(p, 3) +
                    " (need < 0.01)"};
}

Outcome monotone_sweep() {
  std::optional<SweepSpec> sweep;
  auto cfgs = load_config_file(kConfigs + "/sweep_kuramoto1_fraction.json", &sweep);
  if (cfgs.size() != 1 || !sweep) throw ParameterError("sweep config malformed");
  const auto rows = run_sweep(cfgs.front(), *sweep);

  const std::size_t cells = sweep->values.size();
  std::vector<Paired> per(cells);
  for (const auto& r : rows) {
    if (!r.ok()) throw NumericalError(r.error);
    const auto k = static_cast<std::size_t>(
        std::find_if(sweep->values.begin(), sweep->values.end(),
                     [&](double v) { return csv::format_double(v) == r.sweep_value; }) -
        sweep->values.begin());
    (r.manie ? per[k].manie : per[k].base).push_back(r.auc);
  }

  int increases = 0;
  bool within_band = true;
  for (std::size_t k = 0; k + 1 < cells; ++k) {
    const double step = mean(per[k + 1].base) - mean(per[k].base);
    if (step > 0.0) {
      ++increases;
      const double band = 3.0 * std::hypot(std_error(per[k].base), std_error(per[k + 1].base));
      within_band = within_band && step <= band;
    }
  }
  bool dominates = true;
  std::string curve;
  for (std::size_t k = 0; k < cells; ++k) {
    std::vector<double> diff(per[k].base.size());
    for (std::size_t s = 0; s < diff.size(); ++s) diff[s] = per[k].manie[s] - per[k].base[s];
    dominates = dominates && mean(diff) >= -3.0 * std_error(diff);
    curve += fmt(sweep->values[k], 3) + ": " + fmt(mean(per[k].base)) + "/" + fmt(mean(per[k].manie)) + ", ";
  }
  curve.resize(curve.size() - 2);
  const bool pass = increases <= 1 && within_band && dominates;
  return {pass, "fraction: base/manie " + curve + "; base increases " + std::to_string(increases) +
                    (within_band ? " within 3 sigma" : " beyond 3 sigma") +
                    (dominates ? ", manie dominates or ties" : ", manie falls below base")};
}

// Pairwise concordance with ties as one half.
Outcome metric_correctness() {
  Rng rng(7);
  std::bernoulli_distribution coin(0.4);
  std::uniform_int_distribution<int> level(-3, 3);
  int checked = 0;
  double worst = 0.0;
  bool invariant = true;
  for (int n = 2; n <= 6; ++n) {
    for (int directed = 0; directed < 2; ++directed) {
      for (int rep = 0; rep < 300; ++rep) {
        Network g{Eigen::MatrixXd::Zero(n, n), directed == 1};
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            if (i == j || (!g.directed && j < i)) continue;
            if (coin(rng)) {
              g.adj(i, j) = 1.0;
              if (!g.directed) g.adj(j, i) = 1.0;
            }
          }
        }
        Eigen::MatrixXd s(n, n);
        for (Eigen::Index k = 0; k < s.size(); ++k) s(k) = level(rng);
        auto candidate = [&](int i, int j) { return i != j && (g.directed || i < j); };
        double hits = 0.0, pairs = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            if (!candidate(a, b) || g.adj(a, b) == 0.0) continue;
            for (int c = 0; c < n; ++c)
              for (int d = 0; d < n; ++d) {
                if (!candidate(c, d) || g.adj(c, d) != 0.0) continue;
                const double p = std::abs(s(a, b)), q = std::abs(s(c, d));
                hits += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
                pairs += 1.0;
              }
          }
        if (pairs == 0.0) continue;  // one class missing
        const double got = auc(s, g).auc;
        worst = std::max(worst, std::abs(got - hits / pairs));
        const Eigen::MatrixXd mag = s.cwiseAbs();
        invariant = invariant && auc(mag.array().cube().matrix(), g).auc == auc(mag, g).auc &&
                    auc((2.0 * mag.array() + 5.0).matrix(), g).auc == auc(mag, g).auc;
        ++checked;
      }
    }
  }
  return {worst <= 1e-12 && invariant,
          std::to_string(checked) + " graphs up to N = 6, max |AUC - concordance| = " + fmt(worst) +
              (invariant ? ", invariant under x^3 and 2x+5" : ", NOT invariant")};
}

Outcome determinism() {
  const auto cfgs = load_config_file(kConfigs + "/benchmark.json");
  std::ostringstream first, second;
  write_results_csv(first, run_benchmark(cfgs));
  write_results_csv(second, run_benchmark(cfgs));
  const std::string a = first.str();
  const bool same = a == second.str();
  const auto lines = std::count(a.begin(), a.end(), '\n');
  return {same, "benchmark.json run twice: " + std::to_string(lines) + " CSV lines, " +
                    (same ? "byte-identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  long warnings = 0;
  set_warning_handler([&](std::string_view) { ++warnings; });

  check("closed-form weight update", 1, closed_form);
  check("degeneracy at lambda0 = 1e12", 30, degeneracy);
  check("solver oracles", 10, solver_oracles);
  check("noise-free recovery", 120, noise_free_recovery);
  check("directional enhancement", 900, directional);
  check("weight separation", 300, weight_separation);
  check("monotone degradation sweep", 1200, monotone_sweep);
  check("metric correctness", 5, metric_correctness);
  check("determinism", 0, determinism);

  set_warning_handler(nullptr);
  if (warnings > 0) std::cout << "(" << warnings << " solver warnings suppressed)\n";
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
  return failures == 0 ? 0 : 1;
}
