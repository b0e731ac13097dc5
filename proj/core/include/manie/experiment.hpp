#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "manie/dynamics.hpp"
#include "manie/graph.hpp"
#include "manie/manie.hpp"
#include "manie/methods.hpp"
#include "manie/noise.hpp"

namespace manie {

struct NetworkSpec {
  enum class Generator { fixture, er, ba, nw, ws };
  Generator generator = Generator::fixture;
  std::string id;  // label used in result rows; defaults to a generated name
  std::filesystem::path path;
  int n = 40;
  double p = 0.1;
  int m = 2;
  int k = 4;
  bool directed = false;

  std::string label() const;
};

enum class DynamicsModel { kuramoto1, kuramoto2, eg, sis, cp, timeseries_file };

/// Noise templates and methods are grouped by dynamics family.
enum class DynamicsFamily { model_free, game, epidemic };

DynamicsFamily family_of(DynamicsModel m);

struct DynamicsSpec {
  DynamicsModel model = DynamicsModel::kuramoto1;
  // oscillators
  int segments = 200;
  int steps = 5;
  double dt = 0.01;
  int substeps = 1;
  double omega_lo = -1.0;
  double omega_hi = 1.0;
  double xi_std = 0.0;
  std::string derivatives = "forward";  // exact | forward | central
  std::filesystem::path path;           // timeseries_file only
  // games
  Game game = Game::pdg(1.2);
  int rounds = 10;
  int reps = 6;
  double kappa = 0.1;
  // epidemics (segments/steps shared with oscillators)
  double beta = 0.2;
  double delta = 0.2;
  double initial_frac = 0.1;

  std::string label() const;
};

struct MethodSpec {
  std::string name = "arni";  // arni | eg_stridge | eg_lasso | cs
  ArniOptions arni;
  EgInferOptions eg;
  EpidemicInferOptions epidemic;
  bool beta_known = true;  // cs: use the simulated beta as beta_hat, else 1
};

enum class ManieMode { off, on, both };

struct ExperimentConfig {
  std::string name;
  NetworkSpec network;
  DynamicsSpec dynamics;
  std::string scenario = "_0";  // scenario template suffix, "" when `noise` is explicit
  std::vector<NoiseSpec> noise;  // explicit list, or the expanded template
  MethodSpec method;
  ManieConfig manie;
  ManieMode mode = ManieMode::both;
  std::vector<std::uint64_t> seeds{1};

  std::string scenario_id() const;
  void validate() const;
};

enum class SweepAxis { snr_db, noise_fraction, amplitude };

std::string to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

struct SweepSpec {
  SweepAxis axis = SweepAxis::noise_fraction;
  std::vector<double> values;
};

/// Noise settings of a scenario suffix ("_0" .. "_3") for a family. The game
/// "_3" template yields several specs whose AUCs are averaged.
std::vector<NoiseSpec> expand_scenario(DynamicsFamily family, const std::string& suffix);

/// Copy of `specs` with the swept parameter set to `value`.
std::vector<NoiseSpec> apply_sweep(const std::vector<NoiseSpec>& specs, SweepAxis axis, double value);

struct ResultRow {
  std::string scenario;
  std::string network;
  std::string dynamics;
  std::string noise;
  std::string method;
  bool manie = false;
  std::uint64_t seed = 0;
  std::string sweep_axis;
  std::string sweep_value;
  double auc = 0.0;
  double neg_log2_auc = 0.0;
  int iterations = 0;
  std::optional<double> wall_time_ms;  // recorded only on request
  std::string error;

  bool ok() const { return error.empty(); }
};

struct RunOptions {
  int jobs = 1;
  bool record_time = false;
  std::filesystem::path base_dir;  // relative fixture paths resolve against this
};

/// One row per (seed, manie mode). Failures are recorded per seed in
/// `ResultRow::error`; the remaining seeds still run.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Runs every config in order; rows keep config order.
std::vector<ResultRow> run_benchmark(const std::vector<ExperimentConfig>& cfgs, const RunOptions& opts = {});

/// One run_experiment per swept value, rows tagged with the axis and value.
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const SweepSpec& sweep, const RunOptions& opts = {});

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<std::string> result_csv_header();

/// Everything produced for one seed, for data export and weight plots.
struct PreparedRun {
  Network truth;
  std::vector<bool> missing;  // epidemic node missingness, empty otherwise
  std::unique_ptr<InferenceMethod> method;
  CorruptionMask mask;
  std::optional<TimeSeries> series;
  std::optional<EgRecord> game;
  std::optional<BinaryTimeSeries> epidemic;
};

/// Builds network, dynamics, noise (spec index `noise_index`) and method for
/// one seed.
PreparedRun prepare_run(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t noise_index = 0,
                        const std::filesystem::path& base_dir = {});

/// Long-format weight trajectory: iteration, sample, v, is_noisy.
void export_weights(std::ostream& out, const ManieResult& result, const CorruptionMask& mask);

// Config documents (JSON).
ExperimentConfig experiment_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const NoiseSpec& spec);
std::vector<ExperimentConfig> load_config_file(const std::filesystem::path& path,
                                               std::optional<SweepSpec>* sweep = nullptr);

}  // namespace manie
