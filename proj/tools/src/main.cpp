#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "manie/csv.hpp"
#include "manie/error.hpp"
#include "manie/experiment.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::string out = "-";
  int jobs = 1;
  std::optional<std::string> manie;
  bool timing = false;
};

void add_common(CLI::App* cmd, Common& c, bool many_seeds) {
  cmd->add_option("--config", c.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "run seed (first seed when --seeds is given)");
  if (many_seeds) {
    cmd->add_option("--seeds", c.seeds, "number of consecutive seeds")->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--manie", c.manie, "run the enhancement loop")
        ->check(CLI::IsMember({"on", "off", "both"}));
    cmd->add_flag("--timing", c.timing, "record wall time per run (makes output non-reproducible)");
  }
  cmd->add_option("--out", c.out, "output path, - for stdout");
}

// Command-line seeds and mode override the config file.
void apply_overrides(std::vector<manie::ExperimentConfig>& cfgs, const Common& c) {
  for (auto& cfg : cfgs) {
    if (c.seed || c.seeds) {
      const std::uint64_t first = c.seed.value_or(cfg.seeds.front());
      cfg.seeds.clear();
      for (int k = 0; k < c.seeds.value_or(1); ++k) cfg.seeds.push_back(first + static_cast<std::uint64_t>(k));
    }
    if (c.manie) {
      cfg.mode = *c.manie == "on" ? manie::ManieMode::on
                 : *c.manie == "off" ? manie::ManieMode::off
                                     : manie::ManieMode::both;
    }
  }
}

template <typename Write>
void emit(const std::string& path, Write&& write) {
  if (path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw manie::ParameterError("cannot write " + path);
  write(out);
  if (!out) throw manie::ParameterError("write failed for " + path);
}

int report(const std::vector<manie::ResultRow>& rows, const std::string& out) {
  emit(out, [&](std::ostream& os) { manie::write_results_csv(os, rows); });
  int failed = 0;
  for (const auto& r : rows) {
    if (!r.ok()) {
      ++failed;
      std::cerr << "seed " << r.seed << " (" << r.scenario << ", manie " << (r.manie ? "on" : "off")
                << ") failed: " << r.error << '\n';
    }
  }
  return failed > 0 ? 2 : 0;
}

manie::RunOptions run_options(const Common& c) {
  manie::RunOptions opts;
  opts.jobs = c.jobs;
  opts.record_time = c.timing;
  return opts;
}

// Solver warnings can fire once per node and iteration; show each distinct
// message once and how often it recurred.
class WarningDigest {
 public:
  WarningDigest() {
    manie::set_warning_handler([this](std::string_view msg) {
      std::lock_guard lock(mutex_);
      if (counts_[std::string(msg)]++ == 0) std::cerr << "warning: " << msg << '\n';
    });
  }
  ~WarningDigest() {
    manie::set_warning_handler(nullptr);
    for (const auto& [msg, n] : counts_) {
      if (n > 1) std::cerr << "warning repeated " << n << " times: " << msg << '\n';
    }
  }

 private:
  std::mutex mutex_;
  std::map<std::string, int> counts_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-paced enhancement of network inference from noisy time series"};
  app.require_subcommand(1);

  Common sim_c, inf_c, bench_c, sweep_c, w_c;
  std::size_t sim_index = 0, w_index = 0;
  std::string scores_out, mask_out, losses_out;
  std::optional<std::string> sweep_axis;
  std::vector<double> sweep_values;

  auto* sim = app.add_subcommand("simulate", "write the (noisy) data of one seed as CSV");
  add_common(sim, sim_c, false);
  sim->add_option("--index", sim_index, "experiment index inside a multi-experiment config");
  sim->add_option("--mask-out", mask_out, "where to write the corruption mask CSV");

  auto* inf = app.add_subcommand("infer", "run one experiment and write result rows");
  add_common(inf, inf_c, true);
  inf->add_option("--scores-out", scores_out, "score matrix CSV of the first seed");

  auto* bench = app.add_subcommand("benchmark", "run every experiment of a config file");
  add_common(bench, bench_c, true);

  auto* sweep = app.add_subcommand("sweep", "repeat an experiment over one noise parameter");
  add_common(sweep, sweep_c, true);
  sweep->add_option("--axis", sweep_axis, "snr_db, noise_fraction or amplitude")
      ->check(CLI::IsMember({"snr_db", "noise_fraction", "amplitude"}));
  sweep->add_option("--values", sweep_values, "swept values")->delimiter(',');

  auto* weights = app.add_subcommand("export-weights", "write the weight trajectory of one seed");
  add_common(weights, w_c, false);
  weights->add_option("--index", w_index, "experiment index inside a multi-experiment config");
  weights->add_option("--losses-out", losses_out, "loss trajectory CSV, one row per iteration");

  CLI11_PARSE(app, argc, argv);
  WarningDigest digest;

  try {
    if (*sim) {
      auto cfgs = manie::load_config_file(sim_c.config);
      if (sim_index >= cfgs.size()) throw manie::ParameterError("--index out of range");
      const auto& cfg = cfgs[sim_index];
      const auto run = manie::prepare_run(cfg, sim_c.seed.value_or(cfg.seeds.front()));
      emit(sim_c.out, [&](std::ostream& os) {
        if (run.series) manie::write_csv(os, *run.series);
        if (run.game) manie::write_csv(os, *run.game);
        if (run.epidemic) manie::write_csv(os, *run.epidemic);
      });
      if (!mask_out.empty()) {
        emit(mask_out, [&](std::ostream& os) {
          manie::csv::write_row(os, {"sample", "is_noisy"});
          for (std::size_t t = 0; t < run.mask.size(); ++t) {
            manie::csv::write_row(os, {std::to_string(t), run.mask.noisy[t] ? "1" : "0"});
          }
        });
      }
      return 0;
    }

    if (*inf) {
      auto cfgs = manie::load_config_file(inf_c.config);
      if (cfgs.size() != 1) throw manie::ParameterError("infer expects a single experiment; use benchmark");
      apply_overrides(cfgs, inf_c);
      const auto opts = run_options(inf_c);
      const auto rows = manie::run_experiment(cfgs.front(), opts);
      if (!scores_out.empty()) {
        const auto& cfg = cfgs.front();
        const auto run = manie::prepare_run(cfg, cfg.seeds.front());
        const auto rec = cfg.mode == manie::ManieMode::off ? run.method->fit()
                                                           : manie::run_manie(*run.method, cfg.manie).reconstruction;
        emit(scores_out, [&](std::ostream& os) { manie::csv::write_matrix(os, rec.scores); });
      }
      return report(rows, inf_c.out);
    }

    if (*bench) {
      auto cfgs = manie::load_config_file(bench_c.config);
      apply_overrides(cfgs, bench_c);
      const auto opts = run_options(bench_c);
      return report(manie::run_benchmark(cfgs, opts), bench_c.out);
    }

    if (*sweep) {
      std::optional<manie::SweepSpec> spec;
      auto cfgs = manie::load_config_file(sweep_c.config, &spec);
      if (cfgs.size() != 1) throw manie::ParameterError("sweep expects a single experiment");
      apply_overrides(cfgs, sweep_c);
      if (!spec) spec = manie::SweepSpec{};
      if (sweep_axis) spec->axis = manie::sweep_axis_from_string(*sweep_axis);
      if (!sweep_values.empty()) spec->values = sweep_values;
      if (spec->values.empty()) throw manie::ParameterError("sweep: no values (config sweep block or --values)");
      const auto opts = run_options(sweep_c);
      return report(manie::run_sweep(cfgs.front(), *spec, opts), sweep_c.out);
    }

    if (*weights) {
      auto cfgs = manie::load_config_file(w_c.config);
      if (w_index >= cfgs.size()) throw manie::ParameterError("--index out of range");
      const auto& cfg = cfgs[w_index];
      const auto run = manie::prepare_run(cfg, w_c.seed.value_or(cfg.seeds.front()));
      const auto result = manie::run_manie(*run.method, cfg.manie);
      emit(w_c.out, [&](std::ostream& os) { manie::export_weights(os, result, run.mask); });
      if (!losses_out.empty()) {
        emit(losses_out, [&](std::ostream& os) {
          for (const auto& l : result.loss_trajectory) manie::csv::write_matrix(os, Eigen::MatrixXd(l.transpose()));
        });
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
