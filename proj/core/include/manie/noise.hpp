#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manie/dynamics.hpp"

namespace manie {

/// Which samples (time steps) actually had at least one entry modified.
struct CorruptionMask {
  std::vector<bool> noisy;

  std::size_t size() const { return noisy.size(); }
  std::size_t count() const;
  static CorruptionMask none(std::size_t m) { return {std::vector<bool>(m, false)}; }
};

template <typename Record>
struct Corrupted {
  Record data;
  CorruptionMask mask;
};

/// Gaussian noise on every entry. Per node-series, the noise variance is the
/// mean square of the clean series divided by 10^(snr_db / 10).
Corrupted<TimeSeries> add_awgn_global(const TimeSeries& ts, double snr_db, std::uint64_t seed);

/// Each time step is corrupted independently with probability `prob`. By
/// default a corrupted step receives noise on all nodes; `per_entry`
/// corrupts node entries independently instead.
Corrupted<TimeSeries> add_awgn_local(const TimeSeries& ts, double snr_db, double prob, std::uint64_t seed,
                                     bool per_entry = false);

/// Like add_awgn_local, with the SNR of each corrupted step drawn uniformly
/// from [snr_lo, snr_hi] dB.
Corrupted<TimeSeries> add_awgn_local_random_snr(const TimeSeries& ts, double snr_lo, double snr_hi, double prob,
                                                std::uint64_t seed, bool per_entry = false);

/// Additive uniform noise on [-a, a] applied to every node's payoff in each
/// selected round. `a` is `amplitude`, or Uniform(0, amplitude) drawn per
/// round when `random_amp` is set.
Corrupted<EgRecord> add_amp_noise(const EgRecord& eg, double amplitude, bool random_amp, double prob,
                                  std::uint64_t seed);

/// Marks ceil(frac * N) uniformly chosen nodes as missing.
BinaryTimeSeries drop_nodes(const BinaryTimeSeries& bts, double frac, std::uint64_t seed);

/// Flips every state entry independently with probability `prob`.
Corrupted<BinaryTimeSeries> flip_bits(const BinaryTimeSeries& bts, double prob, std::uint64_t seed);

/// Declarative noise description, as written in experiment configs.
struct NoiseSpec {
  enum class Kind {
    none,
    awgn_global,
    awgn_local,
    awgn_local_random_snr,
    amp_uniform,
    amp_uniform_random,
    drop_nodes,
    flip_bits,
  };
  Kind kind = Kind::none;
  double snr_db = 10.0;
  double snr_lo = 0.0;
  double snr_hi = 10.0;
  double amplitude = 10.0;
  double prob = 0.5;
  double frac = 0.1;
  bool per_entry = false;

  void validate() const;
  std::string id() const;
};

std::string to_string(NoiseSpec::Kind kind);
NoiseSpec::Kind noise_kind_from_string(const std::string& name);

/// Applies a spec to the matching record type. Kinds that do not apply to
/// the record type raise ParameterError; `none` is always the identity.
Corrupted<TimeSeries> apply_noise(const TimeSeries& ts, const NoiseSpec& spec, std::uint64_t seed);
Corrupted<EgRecord> apply_noise(const EgRecord& eg, const NoiseSpec& spec, std::uint64_t seed);
Corrupted<BinaryTimeSeries> apply_noise(const BinaryTimeSeries& bts, const NoiseSpec& spec, std::uint64_t seed);

}  // namespace manie
