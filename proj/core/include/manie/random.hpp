#pragma once

#include <cstdint>
#include <random>

namespace manie {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Independent sub-seed for `stream` under `master`. Counter based, so the
/// derived seed depends only on the pair, never on how many draws other
/// streams consumed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Pipeline stages; each gets its own substream of the run seed.
enum class Stage : std::uint64_t {
  network = 1,
  dynamics = 2,
  noise = 3,
  method = 4,
};

inline std::uint64_t stage_seed(std::uint64_t master, Stage stage) {
  return derive_seed(master, static_cast<std::uint64_t>(stage));
}

}  // namespace manie
