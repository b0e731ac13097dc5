#include "manie/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "manie/csv.hpp"
#include "manie/error.hpp"
#include "manie/eval.hpp"
#include "manie/random.hpp"

namespace manie {

using nlohmann::json;

// ---------------------------------------------------------------------------
// labels

namespace {

const std::map<std::string, std::string>& fixture_ids() {
  static const std::map<std::string, std::string> ids{
      {"zachary", "ZK"}, {"dolphins", "DOL"}, {"football", "FB"}, {"example5", "Example"}};
  return ids;
}

}  // namespace

std::string NetworkSpec::label() const {
  if (!id.empty()) return id;
  switch (generator) {
    case Generator::fixture: {
      const auto stem = path.stem().string();
      const auto it = fixture_ids().find(stem);
      return it != fixture_ids().end() ? it->second : stem;
    }
    case Generator::er: return directed ? "Random" : "ER";
    case Generator::ba: return "BA";
    case Generator::nw: return "NW";
    case Generator::ws: return "WS";
  }
  return "net";
}

DynamicsFamily family_of(DynamicsModel m) {
  switch (m) {
    case DynamicsModel::kuramoto1:
    case DynamicsModel::kuramoto2:
    case DynamicsModel::timeseries_file: return DynamicsFamily::model_free;
    case DynamicsModel::eg: return DynamicsFamily::game;
    case DynamicsModel::sis:
    case DynamicsModel::cp: return DynamicsFamily::epidemic;
  }
  return DynamicsFamily::model_free;
}

std::string DynamicsSpec::label() const {
  switch (model) {
    case DynamicsModel::kuramoto1: return "Kuramoto1";
    case DynamicsModel::kuramoto2: return "Kuramoto2";
    case DynamicsModel::eg: return game.kind == Game::Kind::prisoners_dilemma ? "EG" : "EG-SG";
    case DynamicsModel::sis: return "SIS";
    case DynamicsModel::cp: return "CP";
    case DynamicsModel::timeseries_file: return "Series";
  }
  return "dyn";
}

std::string ExperimentConfig::scenario_id() const {
  if (!name.empty()) return name;
  std::string id = network.label() + "_" + dynamics.label();
  return scenario.empty() ? id + "_custom" : id + scenario;
}

namespace {

std::string method_label(const ExperimentConfig& cfg) {
  // The surrogate follows the simulated process, whatever the options say.
  if (cfg.method.name == "cs") {
    return cfg.dynamics.model == DynamicsModel::cp ? "cs_" + to_string(EpidemicModel::cp)
                                                   : "cs_" + to_string(EpidemicModel::sis);
  }
  return cfg.method.name;
}

std::string noise_label(const std::vector<NoiseSpec>& specs) {
  std::string out;
  for (const auto& s : specs) {
    if (!out.empty()) out += '|';
    out += s.id();
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ParameterError("experiment: seed list is empty");
  if (noise.empty()) throw ParameterError("experiment: no noise settings");
  for (const auto& s : noise) s.validate();
  manie.validate();

  const auto fam = family_of(dynamics.model);
  const auto& m = method.name;
  const bool fits = (fam == DynamicsFamily::model_free && m == "arni") ||
                    (fam == DynamicsFamily::game && (m == "eg_stridge" || m == "eg_lasso")) ||
                    (fam == DynamicsFamily::epidemic && m == "cs");
  if (!fits) throw ParameterError("experiment: method '" + m + "' does not apply to " + dynamics.label());

  if (network.generator == NetworkSpec::Generator::fixture && !std::filesystem::exists(network.path)) {
    throw ParameterError("experiment: network fixture not found: " + network.path.string());
  }
  if (dynamics.model == DynamicsModel::timeseries_file && !std::filesystem::exists(dynamics.path)) {
    throw ParameterError("experiment: time-series file not found: " + dynamics.path.string());
  }
  static const std::set<std::string> schemes{"exact", "forward", "central"};
  if (fam == DynamicsFamily::model_free && !schemes.contains(dynamics.derivatives)) {
    throw ParameterError("experiment: derivatives must be exact, forward or central");
  }
}

// ---------------------------------------------------------------------------
// scenario templates and sweeps

std::vector<NoiseSpec> expand_scenario(DynamicsFamily family, const std::string& suffix) {
  using K = NoiseSpec::Kind;
  auto spec = [](K kind) {
    NoiseSpec s;
    s.kind = kind;
    return s;
  };
  if (suffix == "_0") return {spec(K::none)};

  switch (family) {
    case DynamicsFamily::model_free:
      if (suffix == "_1") {
        auto s = spec(K::awgn_global);
        s.snr_db = 10.0;
        s.prob = 1.0;
        return {s};
      }
      if (suffix == "_2") {
        auto s = spec(K::awgn_local);
        s.snr_db = 10.0;
        s.prob = 0.5;
        return {s};
      }
      if (suffix == "_3") {
        auto s = spec(K::awgn_local_random_snr);
        s.snr_lo = 0.0;
        s.snr_hi = 10.0;
        s.prob = 0.5;
        return {s};
      }
      break;
    case DynamicsFamily::game:
      if (suffix == "_1") {
        auto s = spec(K::amp_uniform);
        s.amplitude = 10.0;
        s.prob = 0.5;
        return {s};
      }
      if (suffix == "_2") {
        auto s = spec(K::amp_uniform_random);
        s.amplitude = 10.0;
        s.prob = 0.5;
        return {s};
      }
      if (suffix == "_3") {
        std::vector<NoiseSpec> out;
        for (double a : {1.0, 5.0, 10.0}) {
          auto s = spec(K::amp_uniform);
          s.amplitude = a;
          s.prob = 1.0;
          out.push_back(s);
        }
        return out;
      }
      break;
    case DynamicsFamily::epidemic:
      if (suffix == "_1") {
        auto s = spec(K::drop_nodes);
        s.frac = 0.1;
        return {s};
      }
      if (suffix == "_2") {
        auto s = spec(K::flip_bits);
        s.prob = 0.1;
        return {s};
      }
      break;
  }
  throw ParameterError("unknown scenario template '" + suffix + "' for this dynamics family");
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::snr_db: return "snr_db";
    case SweepAxis::noise_fraction: return "noise_fraction";
    case SweepAxis::amplitude: return "amplitude";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "snr_db") return SweepAxis::snr_db;
  if (s == "noise_fraction") return SweepAxis::noise_fraction;
  if (s == "amplitude") return SweepAxis::amplitude;
  throw ParameterError("unknown sweep axis '" + s + "'");
}

std::vector<NoiseSpec> apply_sweep(const std::vector<NoiseSpec>& specs, SweepAxis axis, double value) {
  using K = NoiseSpec::Kind;
  std::vector<NoiseSpec> out = specs;
  for (auto& s : out) {
    bool applied = false;
    switch (axis) {
      case SweepAxis::snr_db:
        if (s.kind == K::awgn_global || s.kind == K::awgn_local) {
          s.snr_db = value;
          applied = true;
        }
        break;
      case SweepAxis::noise_fraction:
        if (s.kind == K::awgn_local || s.kind == K::awgn_local_random_snr || s.kind == K::amp_uniform ||
            s.kind == K::amp_uniform_random || s.kind == K::flip_bits) {
          s.prob = value;
          applied = true;
        } else if (s.kind == K::drop_nodes) {
          s.frac = value;
          applied = true;
        }
        break;
      case SweepAxis::amplitude:
        if (s.kind == K::amp_uniform || s.kind == K::amp_uniform_random) {
          s.amplitude = value;
          applied = true;
        }
        break;
    }
    if (!applied) {
      throw ParameterError("sweep axis " + to_string(axis) + " does not apply to noise kind " + to_string(s.kind));
    }
    s.validate();
  }
  return out;
}

// ---------------------------------------------------------------------------
// one run

namespace {

Network build_network(const NetworkSpec& spec, std::uint64_t seed) {
  using G = NetworkSpec::Generator;
  switch (spec.generator) {
    case G::fixture: return load_edge_list_file(spec.path);
    case G::er: return gen_er(spec.n, spec.p, spec.directed, seed);
    case G::ba: return gen_ba(spec.n, spec.m, seed);
    case G::nw: return gen_nw(spec.n, spec.k, spec.p, seed);
    case G::ws: return gen_ws(spec.n, spec.k, spec.p, seed);
  }
  throw ParameterError("unknown network generator");
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

PreparedRun prepare_run(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t noise_index,
                        const std::filesystem::path& base_dir) {
  if (noise_index >= cfg.noise.size()) throw ParameterError("prepare_run: noise index out of range");
  const NoiseSpec& noise = cfg.noise[noise_index];
  const auto& dyn = cfg.dynamics;

  NetworkSpec net_spec = cfg.network;
  net_spec.path = resolve(net_spec.path, base_dir);

  PreparedRun run;
  run.truth = build_network(net_spec, stage_seed(seed, Stage::network));
  const auto dyn_seed = stage_seed(seed, Stage::dynamics);
  // Every noise alternative shares one stream, so an averaged template equals
  // the mean of the matching single-spec runs.
  const auto noise_seed = stage_seed(seed, Stage::noise);
  const auto n = run.truth.size();

  switch (dyn.model) {
    case DynamicsModel::kuramoto1:
    case DynamicsModel::kuramoto2:
    case DynamicsModel::timeseries_file: {
      TimeSeries clean;
      if (dyn.model == DynamicsModel::timeseries_file) {
        std::ifstream in(resolve(dyn.path, base_dir));
        if (!in) throw ParameterError("cannot open time-series file " + dyn.path.string());
        clean = read_time_series_csv(in);
        if (clean.nodes() != n) throw ParameterError("time-series node count does not match the network");
      } else {
        KuramotoOptions ko;
        ko.variant = dyn.model == DynamicsModel::kuramoto1 ? KuramotoVariant::k1 : KuramotoVariant::k2;
        ko.dt = dyn.dt;
        ko.steps = dyn.steps;
        ko.substeps = dyn.substeps;
        ko.xi_std = dyn.xi_std;
        const auto omega = draw_frequencies(n, dyn.omega_lo, dyn.omega_hi, derive_seed(dyn_seed, 1));
        clean = simulate_kuramoto_segments(run.truth, omega, ko, dyn.segments, derive_seed(dyn_seed, 2));
      }
      auto noisy = apply_noise(clean, noise, noise_seed);
      TimeSeries ts = std::move(noisy.data);
      if (dyn.derivatives == "exact") {
        if (!ts.deriv) throw ParameterError("exact derivatives requested but the series carries none");
      } else {
        ts = estimate_derivatives(ts, dyn.derivatives == "central" ? DerivativeScheme::central
                                                                   : DerivativeScheme::forward);
      }
      run.mask = std::move(noisy.mask);
      run.method = std::make_unique<ArniMethod>(ts, cfg.method.arni);
      run.series = std::move(ts);
      break;
    }
    case DynamicsModel::eg: {
      auto clean = simulate_eg(run.truth, dyn.game, dyn.rounds, dyn.reps, dyn.kappa, dyn_seed);
      auto noisy = apply_noise(clean, noise, noise_seed);
      EgInferOptions opts = cfg.method.eg;
      opts.solver = cfg.method.name == "eg_lasso" ? SparseSolver::lasso : SparseSolver::stridge;
      run.mask = std::move(noisy.mask);
      run.method = std::make_unique<EgMethod>(noisy.data, opts);
      run.game = std::move(noisy.data);
      break;
    }
    case DynamicsModel::sis:
    case DynamicsModel::cp: {
      EpidemicOptions eo;
      eo.beta = dyn.beta;
      eo.delta = dyn.delta;
      eo.steps = dyn.steps;
      const auto model = dyn.model == DynamicsModel::sis ? EpidemicModel::sis : EpidemicModel::cp;
      auto clean = simulate_epidemic_segments(run.truth, model, eo, dyn.initial_frac, dyn.segments, dyn_seed);
      auto noisy = apply_noise(clean, noise, noise_seed);
      EpidemicInferOptions opts = cfg.method.epidemic;
      opts.model = model;
      opts.beta_hat = cfg.method.beta_known ? dyn.beta : 1.0;
      run.missing = noisy.data.missing;
      run.mask = std::move(noisy.mask);
      run.method = std::make_unique<EpidemicMethod>(noisy.data, opts);
      run.epidemic = std::move(noisy.data);
      break;
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// experiment execution

namespace {

struct Job {
  const ExperimentConfig* cfg;
  std::uint64_t seed;
  std::string sweep_axis;
  std::string sweep_value;
};

ResultRow base_row(const Job& job, bool manie_on) {
  const auto& cfg = *job.cfg;
  ResultRow row;
  row.scenario = cfg.scenario_id();
  row.network = cfg.network.label();
  row.dynamics = cfg.dynamics.label();
  row.noise = noise_label(cfg.noise);
  row.method = method_label(cfg);
  row.manie = manie_on;
  row.seed = job.seed;
  row.sweep_axis = job.sweep_axis;
  row.sweep_value = job.sweep_value;
  return row;
}

double evaluate(const Reconstruction& rec, const PreparedRun& run) {
  const bool any_missing = std::find(run.missing.begin(), run.missing.end(), true) != run.missing.end();
  return auc(rec.scores, run.truth, any_missing ? exclude_nodes(run.missing) : EntryFilter{}).auc;
}

std::vector<ResultRow> execute(const Job& job, const RunOptions& opts) {
  const auto& cfg = *job.cfg;
  const bool want_base = cfg.mode != ManieMode::on;
  const bool want_manie = cfg.mode != ManieMode::off;
  const auto start = std::chrono::steady_clock::now();

  // A failing enhancement loop must not hide the base result, so the two
  // rows carry their own errors.
  struct Outcome {
    double auc = 0.0;
    int iterations = 0;
    std::string error;
  };
  Outcome base, enhanced;
  auto fail = [](Outcome& o, const std::exception& e) {
    if (o.error.empty()) o.error = e.what();
  };

  for (std::size_t k = 0; k < cfg.noise.size(); ++k) {
    std::optional<PreparedRun> run;
    try {
      run.emplace(prepare_run(cfg, job.seed, k, opts.base_dir));
    } catch (const std::exception& e) {
      fail(base, e);
      fail(enhanced, e);
      break;
    }
    bool base_done = false;
    if (want_manie) {
      try {
        const auto result = run_manie(*run->method, cfg.manie);
        enhanced.auc += evaluate(result.reconstruction, *run);
        enhanced.iterations = std::max(enhanced.iterations, result.iterations);
        if (want_base) {
          base.auc += evaluate(result.base, *run);
          base_done = true;
        }
      } catch (const std::exception& e) {
        fail(enhanced, e);
      }
    }
    if (want_base && !base_done) {
      try {
        base.auc += evaluate(run->method->fit(), *run);
      } catch (const std::exception& e) {
        fail(base, e);
      }
    }
    base.iterations = 1;
  }

  std::vector<ResultRow> rows;
  const double count = static_cast<double>(cfg.noise.size());
  auto finish = [&](const Outcome& o, bool manie_on) {
    ResultRow row = base_row(job, manie_on);
    row.error = o.error;
    if (row.ok()) {
      row.auc = o.auc / count;
      row.neg_log2_auc = neg_log2(row.auc);
      row.iterations = o.iterations;
    } else {
      row.auc = row.neg_log2_auc = std::nan("");
    }
    rows.push_back(std::move(row));
  };
  if (want_base) finish(base, false);
  if (want_manie) finish(enhanced, true);

  if (opts.record_time) {
    const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
    for (auto& row : rows) row.wall_time_ms = elapsed.count();
  }
  return rows;
}

std::vector<ResultRow> run_jobs(const std::vector<Job>& jobs, const RunOptions& opts) {
  std::vector<std::vector<ResultRow>> slots(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) slots[i] = execute(jobs[i], opts);
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(opts.jobs, 1)), jobs.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::vector<ResultRow> rows;
  for (auto& slot : slots) std::move(slot.begin(), slot.end(), std::back_inserter(rows));
  return rows;
}

void push_jobs(std::vector<Job>& jobs, const ExperimentConfig& cfg, const std::string& axis,
               const std::string& value) {
  for (auto seed : cfg.seeds) jobs.push_back({&cfg, seed, axis, value});
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  std::vector<Job> jobs;
  push_jobs(jobs, cfg, "", "");
  return run_jobs(jobs, opts);
}

std::vector<ResultRow> run_benchmark(const std::vector<ExperimentConfig>& cfgs, const RunOptions& opts) {
  std::vector<Job> jobs;
  for (const auto& cfg : cfgs) {
    cfg.validate();
    push_jobs(jobs, cfg, "", "");
  }
  return run_jobs(jobs, opts);
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const SweepSpec& sweep, const RunOptions& opts) {
  std::vector<ExperimentConfig> cells;
  cells.reserve(sweep.values.size());
  for (double value : sweep.values) {
    ExperimentConfig cell = cfg;
    cell.noise = apply_sweep(cfg.noise, sweep.axis, value);
    cell.validate();
    cells.push_back(std::move(cell));
  }
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    push_jobs(jobs, cells[k], to_string(sweep.axis), csv::format_double(sweep.values[k]));
  }
  return run_jobs(jobs, opts);
}

// ---------------------------------------------------------------------------
// output

std::vector<std::string> result_csv_header() {
  return {"scenario", "network", "dynamics",   "noise",     "method", "manie",        "seed",
          "sweep_axis", "sweep_value", "auc", "neg_log2_auc", "iterations", "wall_time_ms", "error"};
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  csv::write_row(out, result_csv_header());
  for (const auto& r : rows) {
    csv::write_row(out, {r.scenario, r.network, r.dynamics, r.noise, r.method, r.manie ? "on" : "off",
                         std::to_string(r.seed), r.sweep_axis, r.sweep_value,
                         r.ok() ? csv::format_double(r.auc) : "", r.ok() ? csv::format_double(r.neg_log2_auc) : "",
                         std::to_string(r.iterations), r.wall_time_ms ? csv::format_double(*r.wall_time_ms) : "",
                         r.error});
  }
}

void export_weights(std::ostream& out, const ManieResult& result, const CorruptionMask& mask) {
  csv::write_row(out, {"iteration", "sample", "v", "is_noisy"});
  for (std::size_t k = 0; k < result.v_trajectory.size(); ++k) {
    const auto& v = result.v_trajectory[k];
    if (static_cast<std::size_t>(v.size()) != mask.size()) {
      throw ParameterError("export_weights: mask length does not match the sample count");
    }
    for (Eigen::Index t = 0; t < v.size(); ++t) {
      csv::write_row(out, {std::to_string(k + 1), std::to_string(t), csv::format_double(v(t)),
                           mask.noisy[static_cast<std::size_t>(t)] ? "1" : "0"});
    }
  }
}

// ---------------------------------------------------------------------------
// JSON config documents

namespace {

// Reads a JSON object while tracking which keys were consumed, so typos in
// config files are reported rather than silently ignored.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ParameterError(where_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& field) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      field = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ParameterError(where_ + "." + key + ": " + e.what());
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& at(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.contains(key)) throw ParameterError(where_ + ": unknown key '" + key + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

NetworkSpec network_from_json(const json& j) {
  Reader r(j, "network");
  NetworkSpec s;
  std::string gen = "fixture", path;
  r.get("generator", gen);
  r.get("id", s.id);
  r.get("path", path);
  r.get("n", s.n);
  r.get("p", s.p);
  r.get("m", s.m);
  r.get("k", s.k);
  r.get("directed", s.directed);
  r.finish();
  static const std::map<std::string, NetworkSpec::Generator> gens{{"fixture", NetworkSpec::Generator::fixture},
                                                                  {"er", NetworkSpec::Generator::er},
                                                                  {"ba", NetworkSpec::Generator::ba},
                                                                  {"nw", NetworkSpec::Generator::nw},
                                                                  {"ws", NetworkSpec::Generator::ws}};
  const auto it = gens.find(gen);
  if (it == gens.end()) throw ParameterError("network: unknown generator '" + gen + "'");
  s.generator = it->second;
  s.path = path;
  if (s.generator == NetworkSpec::Generator::fixture && path.empty()) {
    throw ParameterError("network: fixture generator needs a path");
  }
  return s;
}

DynamicsSpec dynamics_from_json(const json& j) {
  Reader r(j, "dynamics");
  DynamicsSpec s;
  std::string model, game = "pdg", path;
  r.get("model", model);
  r.get("segments", s.segments);
  r.get("steps", s.steps);
  r.get("dt", s.dt);
  r.get("substeps", s.substeps);
  if (r.has("omega")) {
    const auto& w = r.at("omega");
    if (!w.is_array() || w.size() != 2) throw ParameterError("dynamics.omega: expected [lo, hi]");
    s.omega_lo = w[0].get<double>();
    s.omega_hi = w[1].get<double>();
  }
  r.get("xi_std", s.xi_std);
  r.get("derivatives", s.derivatives);
  r.get("path", path);
  r.get("game", game);
  double param = game == "sg" ? 0.3 : 1.2;
  r.get("game_param", param);
  r.get("rounds", s.rounds);
  r.get("reps", s.reps);
  r.get("kappa", s.kappa);
  r.get("beta", s.beta);
  r.get("delta", s.delta);
  r.get("initial_frac", s.initial_frac);
  r.finish();

  static const std::map<std::string, DynamicsModel> models{
      {"kuramoto1", DynamicsModel::kuramoto1}, {"kuramoto2", DynamicsModel::kuramoto2},
      {"eg", DynamicsModel::eg},               {"sis", DynamicsModel::sis},
      {"cp", DynamicsModel::cp},               {"timeseries_file", DynamicsModel::timeseries_file}};
  const auto it = models.find(model);
  if (it == models.end()) throw ParameterError("dynamics: unknown model '" + model + "'");
  s.model = it->second;
  s.path = path;
  if (game == "pdg") {
    s.game = Game::pdg(param);
  } else if (game == "sg") {
    s.game = Game::snowdrift(param);
  } else {
    throw ParameterError("dynamics: unknown game '" + game + "'");
  }
  return s;
}

NoiseSpec noise_from_json(const json& j) {
  Reader r(j, "noise");
  NoiseSpec s;
  std::string kind = "none";
  r.get("kind", kind);
  s.kind = noise_kind_from_string(kind);
  r.get("snr_db", s.snr_db);
  r.get("snr_lo", s.snr_lo);
  r.get("snr_hi", s.snr_hi);
  r.get("amplitude", s.amplitude);
  r.get("prob", s.prob);
  r.get("frac", s.frac);
  r.get("per_entry", s.per_entry);
  r.finish();
  s.validate();
  return s;
}

std::string default_method(DynamicsModel model) {
  switch (family_of(model)) {
    case DynamicsFamily::model_free: return "arni";
    case DynamicsFamily::game: return "eg_stridge";
    case DynamicsFamily::epidemic: return "cs";
  }
  return "arni";
}

MethodSpec method_from_json(const json& j, DynamicsModel model) {
  Reader r(j, "method");
  MethodSpec s;
  s.name = default_method(model);
  r.get("name", s.name);
  // Shared knobs map onto whichever method is selected.
  r.get("harmonics", s.arni.basis.harmonics);
  r.get("self_harmonics", s.arni.basis.self_harmonics);
  r.get("kmax", s.arni.kmax);
  r.get("min_improvement", s.arni.min_improvement);
  r.get("ridge", s.arni.ridge);
  double alpha = s.name == "cs" ? s.epidemic.alpha : s.eg.alpha;
  bool standardize = true;
  r.get("alpha", alpha);
  r.get("threshold", s.eg.threshold);
  r.get("standardize", standardize);
  r.get("stridge_iters", s.eg.stridge_iters);
  LassoOptions lasso;
  r.get("tol", lasso.tol);
  r.get("max_iter", lasso.max_iter);
  r.get("beta_known", s.beta_known);
  r.finish();
  s.eg.alpha = s.epidemic.alpha = alpha;
  s.eg.standardize = s.epidemic.standardize = standardize;
  s.eg.lasso = s.epidemic.lasso = lasso;
  return s;
}

void manie_from_json(const json& j, ExperimentConfig& cfg) {
  if (j.is_string()) {
    const auto mode = j.get<std::string>();
    if (mode == "off") cfg.mode = ManieMode::off;
    else if (mode == "on") cfg.mode = ManieMode::on;
    else if (mode == "both") cfg.mode = ManieMode::both;
    else throw ParameterError("manie: expected off, on, both or an object");
    return;
  }
  Reader r(j, "manie");
  std::string mode = "both";
  r.get("mode", mode);
  manie_from_json(json(mode), cfg);
  r.get("lambda0", cfg.manie.lambda0);
  std::string rule = to_string(cfg.manie.lambda_init);
  r.get("lambda_init", rule);
  cfg.manie.lambda_init = lambda_init_from_string(rule);
  r.get("lambda_quantile", cfg.manie.lambda_quantile);
  r.get("growth", cfg.manie.growth);
  r.get("eps", cfg.manie.eps);
  r.get("max_outer", cfg.manie.max_outer);
  r.get("max_zero_retries", cfg.manie.max_zero_retries);
  r.finish();
}

std::vector<std::uint64_t> seeds_from_json(const json& j) {
  std::vector<std::uint64_t> seeds;
  if (j.is_array()) {
    for (const auto& s : j) seeds.push_back(s.get<std::uint64_t>());
  } else if (j.is_object()) {
    Reader r(j, "seeds");
    std::uint64_t first = 1;
    int count = 1;
    r.get("first", first);
    r.get("count", count);
    r.finish();
    for (int k = 0; k < count; ++k) seeds.push_back(first + static_cast<std::uint64_t>(k));
  } else {
    seeds.push_back(j.get<std::uint64_t>());
  }
  return seeds;
}

const char* model_name(DynamicsModel m) {
  switch (m) {
    case DynamicsModel::kuramoto1: return "kuramoto1";
    case DynamicsModel::kuramoto2: return "kuramoto2";
    case DynamicsModel::eg: return "eg";
    case DynamicsModel::sis: return "sis";
    case DynamicsModel::cp: return "cp";
    case DynamicsModel::timeseries_file: return "timeseries_file";
  }
  return "?";
}

const char* generator_name(NetworkSpec::Generator g) {
  switch (g) {
    case NetworkSpec::Generator::fixture: return "fixture";
    case NetworkSpec::Generator::er: return "er";
    case NetworkSpec::Generator::ba: return "ba";
    case NetworkSpec::Generator::nw: return "nw";
    case NetworkSpec::Generator::ws: return "ws";
  }
  return "?";
}

}  // namespace

ExperimentConfig experiment_from_json(const json& j) {
  Reader r(j, "experiment");
  ExperimentConfig cfg;
  r.get("name", cfg.name);
  if (!r.has("network")) throw ParameterError("experiment: missing network");
  if (!r.has("dynamics")) throw ParameterError("experiment: missing dynamics");
  cfg.network = network_from_json(r.at("network"));
  cfg.dynamics = dynamics_from_json(r.at("dynamics"));
  cfg.method = method_from_json(r.has("method") ? r.at("method") : json::object(), cfg.dynamics.model);

  r.get("scenario", cfg.scenario);
  if (r.has("noise")) {
    const auto& n = r.at("noise");
    cfg.noise.clear();
    if (n.is_array()) {
      for (const auto& e : n) cfg.noise.push_back(noise_from_json(e));
    } else {
      cfg.noise.push_back(noise_from_json(n));
    }
    if (!r.has("scenario")) cfg.scenario.clear();
  } else {
    cfg.noise = expand_scenario(family_of(cfg.dynamics.model), cfg.scenario);
  }
  if (r.has("manie")) manie_from_json(r.at("manie"), cfg);
  if (r.has("seeds")) cfg.seeds = seeds_from_json(r.at("seeds"));
  r.finish();
  return cfg;
}

json to_json(const NoiseSpec& s) {
  return json{{"kind", to_string(s.kind)}, {"snr_db", s.snr_db},       {"snr_lo", s.snr_lo},
              {"snr_hi", s.snr_hi},        {"amplitude", s.amplitude}, {"prob", s.prob},
              {"frac", s.frac},            {"per_entry", s.per_entry}};
}

json to_json(const ExperimentConfig& cfg) {
  const auto& n = cfg.network;
  const auto& d = cfg.dynamics;
  const auto& m = cfg.method;
  json noise = json::array();
  for (const auto& s : cfg.noise) noise.push_back(to_json(s));
  const bool cs = m.name == "cs";
  static const char* modes[] = {"off", "on", "both"};
  return json{
      {"name", cfg.name},
      {"network",
       {{"generator", generator_name(n.generator)}, {"id", n.id}, {"path", n.path.generic_string()}, {"n", n.n},
        {"p", n.p}, {"m", n.m}, {"k", n.k}, {"directed", n.directed}}},
      {"dynamics",
       {{"model", model_name(d.model)}, {"segments", d.segments}, {"steps", d.steps}, {"dt", d.dt},
        {"substeps", d.substeps}, {"omega", {d.omega_lo, d.omega_hi}}, {"xi_std", d.xi_std},
        {"derivatives", d.derivatives}, {"path", d.path.generic_string()},
        {"game", d.game.kind == Game::Kind::prisoners_dilemma ? "pdg" : "sg"}, {"game_param", d.game.param},
        {"rounds", d.rounds}, {"reps", d.reps}, {"kappa", d.kappa}, {"beta", d.beta}, {"delta", d.delta},
        {"initial_frac", d.initial_frac}}},
      {"scenario", cfg.scenario},
      {"noise", noise},
      {"method",
       {{"name", m.name}, {"harmonics", m.arni.basis.harmonics}, {"self_harmonics", m.arni.basis.self_harmonics},
        {"kmax", m.arni.kmax}, {"min_improvement", m.arni.min_improvement}, {"ridge", m.arni.ridge},
        {"alpha", cs ? m.epidemic.alpha : m.eg.alpha}, {"threshold", m.eg.threshold},
        {"standardize", cs ? m.epidemic.standardize : m.eg.standardize}, {"stridge_iters", m.eg.stridge_iters},
        {"tol", m.eg.lasso.tol}, {"max_iter", m.eg.lasso.max_iter}, {"beta_known", m.beta_known}}},
      {"manie",
       {{"mode", modes[static_cast<int>(cfg.mode)]}, {"lambda0", cfg.manie.lambda0},
        {"lambda_init", to_string(cfg.manie.lambda_init)}, {"lambda_quantile", cfg.manie.lambda_quantile}, {"growth", cfg.manie.growth}, {"eps", cfg.manie.eps},
        {"max_outer", cfg.manie.max_outer}, {"max_zero_retries", cfg.manie.max_zero_retries}}},
      {"seeds", cfg.seeds},
  };
}

std::vector<ExperimentConfig> load_config_file(const std::filesystem::path& path, std::optional<SweepSpec>* sweep) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw FormatError(path.string() + ": expected a JSON object");

  // Relative file references resolve against the config's own directory.
  const auto base = std::filesystem::absolute(path).parent_path();
  auto fix_paths = [&](ExperimentConfig& cfg) {
    if (!cfg.network.path.empty()) cfg.network.path = resolve(cfg.network.path, base);
    if (!cfg.dynamics.path.empty()) cfg.dynamics.path = resolve(cfg.dynamics.path, base);
  };

  json defaults = json::object();
  json entries = json::array();
  json sweep_doc;
  if (doc.contains("experiments")) {
    for (const auto& [key, value] : doc.items()) {
      if (key == "experiments") entries = value;
      else if (key == "defaults") defaults = value;
      else if (key == "sweep") sweep_doc = value;
      else throw ParameterError("config: unknown top-level key '" + key + "'");
    }
  } else {
    json single = doc;
    if (single.contains("sweep")) {
      sweep_doc = single["sweep"];
      single.erase("sweep");
    }
    entries.push_back(single);
  }

  std::vector<ExperimentConfig> cfgs;
  for (const auto& entry : entries) {
    json merged = defaults;
    merged.merge_patch(entry);
    auto cfg = experiment_from_json(merged);
    fix_paths(cfg);
    cfg.validate();
    cfgs.push_back(std::move(cfg));
  }
  if (cfgs.empty()) throw ParameterError("config: no experiments");

  if (!sweep_doc.is_null()) {
    if (!sweep) throw ParameterError("config: sweep block given where none is expected");
    Reader r(sweep_doc, "sweep");
    std::string axis;
    SweepSpec s;
    r.get("axis", axis);
    r.get("values", s.values);
    r.finish();
    s.axis = sweep_axis_from_string(axis);
    if (s.values.empty()) throw ParameterError("sweep: no values");
    *sweep = s;
  }
  return cfgs;
}

}  // namespace manie
