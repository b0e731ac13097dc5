#include "manie/noise.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "manie/csv.hpp"
#include "manie/error.hpp"
#include "manie/random.hpp"

namespace manie {

std::size_t CorruptionMask::count() const {
  return static_cast<std::size_t>(std::count(noisy.begin(), noisy.end(), true));
}

namespace {

// Independent substreams so that, e.g., the SNR draws of the random-SNR
// variant never shift the step selection or the Gaussian samples.
enum Substream : std::uint64_t { select = 11, gaussian = 12, snr = 13, amplitude_draw = 14 };

void check_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError(std::string(what) + ": probability must lie in [0, 1]");
}

Eigen::VectorXd node_power(const TimeSeries& ts, const char* what) {
  if (!ts.values.allFinite()) throw ParameterError(std::string(what) + ": series contains non-finite values");
  if (ts.samples() == 0) throw ParameterError(std::string(what) + ": empty series");
  Eigen::VectorXd power = ts.values.array().square().rowwise().mean();
  for (Eigen::Index i = 0; i < power.size(); ++i) {
    if (!(power(i) > 0.0)) {
      throw ParameterError(std::string(what) + ": node series with zero power, SNR undefined");
    }
  }
  return power;
}

using SnrDraw = std::function<double()>;

Corrupted<TimeSeries> awgn(const TimeSeries& ts, double prob, bool per_entry, std::uint64_t seed,
                           const SnrDraw& draw_snr, const char* what) {
  check_prob(prob, what);
  const Eigen::VectorXd power = node_power(ts, what);
  Rng select_rng(derive_seed(seed, select));
  Rng noise_rng(derive_seed(seed, gaussian));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Corrupted<TimeSeries> out{ts, CorruptionMask::none(static_cast<std::size_t>(ts.samples()))};
  auto& y = out.data.values;
  for (Eigen::Index t = 0; t < ts.samples(); ++t) {
    const bool step_hit = unit(select_rng) < prob;
    if (!per_entry && !step_hit) continue;
    const double snr_db = draw_snr();
    const double scale = std::pow(10.0, -snr_db / 10.0);
    for (Eigen::Index i = 0; i < ts.nodes(); ++i) {
      if (per_entry && !(unit(select_rng) < prob)) continue;
      const double before = y(i, t);
      y(i, t) += std::sqrt(power(i) * scale) * gauss(noise_rng);
      if (y(i, t) != before) out.mask.noisy[t] = true;
    }
  }
  return out;
}

}  // namespace

Corrupted<TimeSeries> add_awgn_global(const TimeSeries& ts, double snr_db, std::uint64_t seed) {
  return awgn(ts, 1.0, false, seed, [snr_db] { return snr_db; }, "add_awgn_global");
}

Corrupted<TimeSeries> add_awgn_local(const TimeSeries& ts, double snr_db, double prob, std::uint64_t seed,
                                     bool per_entry) {
  return awgn(ts, prob, per_entry, seed, [snr_db] { return snr_db; }, "add_awgn_local");
}

Corrupted<TimeSeries> add_awgn_local_random_snr(const TimeSeries& ts, double snr_lo, double snr_hi, double prob,
                                                std::uint64_t seed, bool per_entry) {
  if (!(snr_lo <= snr_hi)) throw ParameterError("add_awgn_local_random_snr: snr_lo must not exceed snr_hi");
  Rng snr_rng(derive_seed(seed, snr));
  std::uniform_real_distribution<double> u(snr_lo, snr_hi);
  return awgn(
      ts, prob, per_entry, seed, [&]() { return snr_lo == snr_hi ? snr_lo : u(snr_rng); },
      "add_awgn_local_random_snr");
}

Corrupted<EgRecord> add_amp_noise(const EgRecord& eg, double amplitude, bool random_amp, double prob,
                                  std::uint64_t seed) {
  check_prob(prob, "add_amp_noise");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw ParameterError("add_amp_noise: amplitude must be finite and non-negative");
  }
  Rng select_rng(derive_seed(seed, select));
  Rng amp_rng(derive_seed(seed, amplitude_draw));
  Rng noise_rng(derive_seed(seed, gaussian));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);

  Corrupted<EgRecord> out{eg, CorruptionMask::none(static_cast<std::size_t>(eg.samples()))};
  for (Eigen::Index t = 0; t < eg.samples(); ++t) {
    if (!(unit(select_rng) < prob)) continue;
    const double a = random_amp ? amplitude * unit(amp_rng) : amplitude;
    for (Eigen::Index i = 0; i < eg.nodes(); ++i) {
      const double before = out.data.payoffs(i, t);
      out.data.payoffs(i, t) += a * sym(noise_rng);
      if (out.data.payoffs(i, t) != before) out.mask.noisy[t] = true;
    }
  }
  return out;
}

BinaryTimeSeries drop_nodes(const BinaryTimeSeries& bts, double frac, std::uint64_t seed) {
  check_prob(frac, "drop_nodes");
  BinaryTimeSeries out = bts;
  if (out.missing.size() != static_cast<std::size_t>(bts.nodes())) out.missing.assign(bts.nodes(), false);
  for (int i : random_node_subset(bts.nodes(), frac, derive_seed(seed, select))) out.missing[i] = true;
  return out;
}

Corrupted<BinaryTimeSeries> flip_bits(const BinaryTimeSeries& bts, double prob, std::uint64_t seed) {
  check_prob(prob, "flip_bits");
  Rng rng(derive_seed(seed, select));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Corrupted<BinaryTimeSeries> out{bts, CorruptionMask::none(static_cast<std::size_t>(bts.samples()))};
  for (Eigen::Index t = 0; t < bts.samples(); ++t) {
    for (Eigen::Index i = 0; i < bts.nodes(); ++i) {
      if (unit(rng) < prob) {
        out.data.states(i, t) = 1 - out.data.states(i, t);
        out.mask.noisy[t] = true;
      }
    }
  }
  return out;
}

std::string to_string(NoiseSpec::Kind kind) {
  using K = NoiseSpec::Kind;
  switch (kind) {
    case K::none: return "none";
    case K::awgn_global: return "awgn_global";
    case K::awgn_local: return "awgn_local";
    case K::awgn_local_random_snr: return "awgn_local_random_snr";
    case K::amp_uniform: return "amp_uniform";
    case K::amp_uniform_random: return "amp_uniform_random";
    case K::drop_nodes: return "drop_nodes";
    case K::flip_bits: return "flip_bits";
  }
  return "none";
}

NoiseSpec::Kind noise_kind_from_string(const std::string& name) {
  using K = NoiseSpec::Kind;
  for (K k : {K::none, K::awgn_global, K::awgn_local, K::awgn_local_random_snr, K::amp_uniform,
              K::amp_uniform_random, K::drop_nodes, K::flip_bits}) {
    if (to_string(k) == name) return k;
  }
  throw ParameterError("unknown noise kind '" + name + "'");
}

void NoiseSpec::validate() const {
  check_prob(prob, "NoiseSpec.prob");
  check_prob(frac, "NoiseSpec.frac");
  if (!(snr_lo <= snr_hi)) throw ParameterError("NoiseSpec: snr_lo must not exceed snr_hi");
  if (!(amplitude >= 0.0)) throw ParameterError("NoiseSpec: amplitude must be non-negative");
}

std::string NoiseSpec::id() const {
  using K = Kind;
  const auto f = [](double v) { return csv::format_double(v); };
  switch (kind) {
    case K::none: return "none";
    case K::awgn_global: return "awgn_global(snr=" + f(snr_db) + ")";
    case K::awgn_local: return "awgn_local(snr=" + f(snr_db) + ";p=" + f(prob) + ")";
    case K::awgn_local_random_snr:
      return "awgn_local_random_snr(snr=" + f(snr_lo) + ".." + f(snr_hi) + ";p=" + f(prob) + ")";
    case K::amp_uniform: return "amp_uniform(a=" + f(amplitude) + ";p=" + f(prob) + ")";
    case K::amp_uniform_random: return "amp_uniform_random(a<" + f(amplitude) + ";p=" + f(prob) + ")";
    case K::drop_nodes: return "drop_nodes(frac=" + f(frac) + ")";
    case K::flip_bits: return "flip_bits(p=" + f(prob) + ")";
  }
  return "none";
}

namespace {

[[noreturn]] void not_applicable(const NoiseSpec& spec, const char* record) {
  throw ParameterError("noise kind " + to_string(spec.kind) + " does not apply to " + record);
}

}  // namespace

Corrupted<TimeSeries> apply_noise(const TimeSeries& ts, const NoiseSpec& spec, std::uint64_t seed) {
  spec.validate();
  using K = NoiseSpec::Kind;
  switch (spec.kind) {
    case K::none: return {ts, CorruptionMask::none(static_cast<std::size_t>(ts.samples()))};
    case K::awgn_global: return add_awgn_global(ts, spec.snr_db, seed);
    case K::awgn_local: return add_awgn_local(ts, spec.snr_db, spec.prob, seed, spec.per_entry);
    case K::awgn_local_random_snr:
      return add_awgn_local_random_snr(ts, spec.snr_lo, spec.snr_hi, spec.prob, seed, spec.per_entry);
    default: not_applicable(spec, "time series");
  }
}

Corrupted<EgRecord> apply_noise(const EgRecord& eg, const NoiseSpec& spec, std::uint64_t seed) {
  spec.validate();
  using K = NoiseSpec::Kind;
  switch (spec.kind) {
    case K::none: return {eg, CorruptionMask::none(static_cast<std::size_t>(eg.samples()))};
    case K::amp_uniform: return add_amp_noise(eg, spec.amplitude, false, spec.prob, seed);
    case K::amp_uniform_random: return add_amp_noise(eg, spec.amplitude, true, spec.prob, seed);
    default: not_applicable(spec, "game records");
  }
}

Corrupted<BinaryTimeSeries> apply_noise(const BinaryTimeSeries& bts, const NoiseSpec& spec, std::uint64_t seed) {
  spec.validate();
  using K = NoiseSpec::Kind;
  switch (spec.kind) {
    case K::none: return {bts, CorruptionMask::none(static_cast<std::size_t>(bts.samples()))};
    case K::drop_nodes:
      return {drop_nodes(bts, spec.frac, seed), CorruptionMask::none(static_cast<std::size_t>(bts.samples()))};
    case K::flip_bits: return flip_bits(bts, spec.prob, seed);
    default: not_applicable(spec, "binary time series");
  }
}

}  // namespace manie
