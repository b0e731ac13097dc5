#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "manie/graph.hpp"

namespace manie {

/// Real-valued node states, one row per node and one column per sample.
///
/// Samples are grouped into contiguous segments (independent trajectories
/// concatenated in time). Finite differences and transitions never cross a
/// segment boundary. An empty `segment` vector means a single segment.
struct TimeSeries {
  Eigen::MatrixXd values;
  double dt = 1.0;
  std::optional<Eigen::MatrixXd> deriv;
  std::vector<int> segment;
  std::string variant;

  Eigen::Index nodes() const { return values.rows(); }
  Eigen::Index samples() const { return values.cols(); }
  int segment_of(Eigen::Index t) const { return segment.empty() ? 0 : segment[t]; }
};

/// {0,1} epidemic states with node-level missingness.
struct BinaryTimeSeries {
  Eigen::MatrixXi states;
  std::vector<bool> missing;  // per node
  std::vector<int> segment;   // per sample, same convention as TimeSeries

  Eigen::Index nodes() const { return states.rows(); }
  Eigen::Index samples() const { return states.cols(); }
  int segment_of(Eigen::Index t) const { return segment.empty() ? 0 : segment[t]; }
  /// True when t and t + 1 belong to the same trajectory.
  bool has_successor(Eigen::Index t) const {
    return t + 1 < samples() && segment_of(t) == segment_of(t + 1);
  }
};

/// Two-strategy game. Strategy 1 is cooperate, 0 is defect.
struct Game {
  enum class Kind { prisoners_dilemma, snowdrift };
  Kind kind = Kind::prisoners_dilemma;
  double param = 1.2;  // temptation b (PDG) or cost ratio r (SG)

  static Game pdg(double b) { return {Kind::prisoners_dilemma, b}; }
  static Game snowdrift(double r) { return {Kind::snowdrift, r}; }

  /// Payoff of a player using `own` against a player using `other`.
  double payoff(int own, int other) const;
  std::string name() const;
};

struct EgRecord {
  Eigen::MatrixXi strategies;  // N x M, 1 = C, 0 = D
  Eigen::MatrixXd payoffs;     // N x M
  Game game;

  Eigen::Index nodes() const { return strategies.rows(); }
  Eigen::Index samples() const { return strategies.cols(); }
};

enum class KuramotoVariant { k1, k2 };

std::string to_string(KuramotoVariant v);

/// Right-hand side of the coupled oscillator model at state x.
/// K1: w_i + sum_j a_ij sin(x_j - x_i)
/// K2: w_i + sum_j a_ij [sin(x_j - x_i - 1.05) + 0.33 sin(2 (x_j - x_i))]
Eigen::VectorXd kuramoto_rhs(const Network& net, KuramotoVariant variant, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& omega);

struct KuramotoOptions {
  KuramotoVariant variant = KuramotoVariant::k1;
  double dt = 0.01;     // sampling interval
  int steps = 100;      // recorded samples, including the initial state
  int substeps = 1;     // RK4 steps per sampling interval
  double xi_std = 0.0;  // dynamical noise added per sampling interval
};

/// Fixed-step RK4 integration. `deriv` holds the exact right-hand side at
/// every recorded state.
TimeSeries simulate_kuramoto(const Network& net, const Eigen::VectorXd& x0, const Eigen::VectorXd& omega,
                             const KuramotoOptions& opts, std::uint64_t seed);

/// Many short trajectories from uniform random phases in [0, 2pi),
/// concatenated with one segment id per trajectory.
TimeSeries simulate_kuramoto_segments(const Network& net, const Eigen::VectorXd& omega,
                                      const KuramotoOptions& opts, int segments, std::uint64_t seed);

/// Natural frequencies uniform on [lo, hi].
Eigen::VectorXd draw_frequencies(Eigen::Index n, double lo, double hi, std::uint64_t seed);

/// Payoffs g_i(t) = sum_j a_ij P(S_i(t), S_j(t)) for a whole strategy record.
Eigen::MatrixXd eg_payoffs(const Network& net, const Game& game, const Eigen::MatrixXi& strategies);

/// `reps` repetitions of `rounds` rounds each with random initial strategies
/// and synchronous Fermi imitation of a random neighbour at temperature kappa.
EgRecord simulate_eg(const Network& net, const Game& game, int rounds, int reps, double kappa,
                     std::uint64_t seed);

struct EpidemicOptions {
  double beta = 0.2;   // infection probability per contact
  double delta = 0.2;  // recovery probability
  int steps = 100;     // recorded samples per trajectory, including x0
};

/// Discrete-time SIS: a susceptible node is infected with probability
/// 1 - prod over infected in-neighbours of (1 - beta).
BinaryTimeSeries simulate_sis(const Network& net, const std::vector<int>& initially_infected,
                              const EpidemicOptions& opts, std::uint64_t seed);

/// Discrete-time contact process: a susceptible node contacts one uniformly
/// chosen in-neighbour and is infected with probability beta if that
/// neighbour is infected.
BinaryTimeSeries simulate_cp(const Network& net, const std::vector<int>& initially_infected,
                             const EpidemicOptions& opts, std::uint64_t seed);

enum class EpidemicModel { sis, cp };
std::string to_string(EpidemicModel m);

/// ceil(frac * n) distinct nodes drawn uniformly, sorted ascending.
std::vector<int> random_node_subset(Eigen::Index n, double frac, std::uint64_t seed);

/// `segments` independent runs, each from a fresh random initial set of
/// ceil(initial_frac * N) infected nodes, concatenated.
BinaryTimeSeries simulate_epidemic_segments(const Network& net, EpidemicModel model,
                                            const EpidemicOptions& opts, double initial_frac,
                                            int segments, std::uint64_t seed);

// CSV serialization. Header lines start with '#'.
void write_csv(std::ostream& out, const TimeSeries& ts);
void write_csv(std::ostream& out, const BinaryTimeSeries& bts);
void write_csv(std::ostream& out, const EgRecord& eg);
TimeSeries read_time_series_csv(std::istream& in);

}  // namespace manie
