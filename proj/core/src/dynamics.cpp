#include "manie/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "manie/csv.hpp"
#include "manie/error.hpp"
#include "manie/random.hpp"

namespace manie {

double Game::payoff(int own, int other) const {
  // Rows: own strategy (C, D); columns: opponent (C, D).
  const bool c_own = own != 0;
  const bool c_other = other != 0;
  switch (kind) {
    case Kind::prisoners_dilemma:
      if (c_own) return c_other ? 1.0 : 0.0;
      return c_other ? param : 0.0;
    case Kind::snowdrift:
      if (c_own) return c_other ? 1.0 : 1.0 - param;
      return c_other ? 1.0 + param : 0.0;
  }
  return 0.0;
}

std::string Game::name() const {
  return (kind == Kind::prisoners_dilemma ? "pdg(b=" : "sg(r=") + csv::format_double(param) + ")";
}

std::string to_string(KuramotoVariant v) { return v == KuramotoVariant::k1 ? "kuramoto1" : "kuramoto2"; }

std::string to_string(EpidemicModel m) { return m == EpidemicModel::sis ? "sis" : "cp"; }

Eigen::VectorXd kuramoto_rhs(const Network& net, KuramotoVariant variant, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& omega) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd dx = omega;
  for (Eigen::Index i = 0; i < n; ++i) {
    double coupling = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = net.adj(i, j);
      if (a == 0.0) continue;
      const double d = x(j) - x(i);
      if (variant == KuramotoVariant::k1) {
        coupling += a * std::sin(d);
      } else {
        coupling += a * (std::sin(d - 1.05) + 0.33 * std::sin(2.0 * d));
      }
    }
    dx(i) += coupling;
  }
  return dx;
}

namespace {

void check_kuramoto(const Network& net, const Eigen::VectorXd& omega, const KuramotoOptions& opts) {
  if (!(opts.dt > 0.0) || !std::isfinite(opts.dt)) throw ParameterError("simulate_kuramoto: dt must be positive");
  if (opts.steps < 2) throw ParameterError("simulate_kuramoto: steps must be at least 2");
  if (opts.substeps < 1) throw ParameterError("simulate_kuramoto: substeps must be at least 1");
  if (!(opts.xi_std >= 0.0)) throw ParameterError("simulate_kuramoto: xi_std must be non-negative");
  if (omega.size() != net.size()) throw ParameterError("simulate_kuramoto: omega has wrong length");
  if (!omega.allFinite()) throw ParameterError("simulate_kuramoto: non-finite omega");
}

void rk4_step(const Network& net, KuramotoVariant variant, const Eigen::VectorXd& omega, double h,
              Eigen::VectorXd& x) {
  const Eigen::VectorXd k1 = kuramoto_rhs(net, variant, x, omega);
  const Eigen::VectorXd k2 = kuramoto_rhs(net, variant, x + 0.5 * h * k1, omega);
  const Eigen::VectorXd k3 = kuramoto_rhs(net, variant, x + 0.5 * h * k2, omega);
  const Eigen::VectorXd k4 = kuramoto_rhs(net, variant, x + h * k3, omega);
  x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

TimeSeries simulate_kuramoto(const Network& net, const Eigen::VectorXd& x0, const Eigen::VectorXd& omega,
                             const KuramotoOptions& opts, std::uint64_t seed) {
  check_kuramoto(net, omega, opts);
  if (x0.size() != net.size()) throw ParameterError("simulate_kuramoto: x0 has wrong length");
  if (!x0.allFinite()) throw ParameterError("simulate_kuramoto: non-finite x0");

  const Eigen::Index n = net.size();
  TimeSeries ts;
  ts.values.resize(n, opts.steps);
  ts.deriv = Eigen::MatrixXd(n, opts.steps);
  ts.dt = opts.dt;
  ts.variant = to_string(opts.variant);
  ts.segment.assign(opts.steps, 0);

  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double h = opts.dt / opts.substeps;
  Eigen::VectorXd x = x0;
  for (int t = 0; t < opts.steps; ++t) {
    if (t > 0) {
      for (int s = 0; s < opts.substeps; ++s) rk4_step(net, opts.variant, omega, h, x);
      if (opts.xi_std > 0.0) {
        for (Eigen::Index i = 0; i < n; ++i) x(i) += opts.xi_std * gauss(rng);
      }
    }
    ts.values.col(t) = x;
    ts.deriv->col(t) = kuramoto_rhs(net, opts.variant, x, omega);
  }
  return ts;
}

TimeSeries simulate_kuramoto_segments(const Network& net, const Eigen::VectorXd& omega,
                                      const KuramotoOptions& opts, int segments, std::uint64_t seed) {
  check_kuramoto(net, omega, opts);
  if (segments < 1) throw ParameterError("simulate_kuramoto_segments: segments must be positive");
  const Eigen::Index n = net.size();
  const Eigen::Index m = static_cast<Eigen::Index>(segments) * opts.steps;
  TimeSeries out;
  out.values.resize(n, m);
  out.deriv = Eigen::MatrixXd(n, m);
  out.dt = opts.dt;
  out.variant = to_string(opts.variant);
  out.segment.resize(m);
  for (int s = 0; s < segments; ++s) {
    Rng rng(derive_seed(seed, 2 * static_cast<std::uint64_t>(s)));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    Eigen::VectorXd x0(n);
    for (Eigen::Index i = 0; i < n; ++i) x0(i) = phase(rng);
    const TimeSeries part =
        simulate_kuramoto(net, x0, omega, opts, derive_seed(seed, 2 * static_cast<std::uint64_t>(s) + 1));
    const Eigen::Index first = static_cast<Eigen::Index>(s) * opts.steps;
    out.values.middleCols(first, opts.steps) = part.values;
    out.deriv->middleCols(first, opts.steps) = *part.deriv;
    std::fill(out.segment.begin() + first, out.segment.begin() + first + opts.steps, s);
  }
  return out;
}

Eigen::VectorXd draw_frequencies(Eigen::Index n, double lo, double hi, std::uint64_t seed) {
  if (!(lo <= hi)) throw ParameterError("draw_frequencies: lo must not exceed hi");
  Rng rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = lo == hi ? lo : u(rng);
  return w;
}

Eigen::MatrixXd eg_payoffs(const Network& net, const Game& game, const Eigen::MatrixXi& strategies) {
  const Eigen::Index n = net.size();
  if (strategies.rows() != n) throw ParameterError("eg_payoffs: strategy record has wrong node count");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, strategies.cols());
  for (Eigen::Index t = 0; t < strategies.cols(); ++t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double a = net.adj(i, j);
        if (a != 0.0 && i != j) sum += a * game.payoff(strategies(i, t), strategies(j, t));
      }
      g(i, t) = sum;
    }
  }
  return g;
}

EgRecord simulate_eg(const Network& net, const Game& game, int rounds, int reps, double kappa,
                     std::uint64_t seed) {
  if (rounds < 1 || reps < 1) throw ParameterError("simulate_eg: rounds and reps must be positive");
  if (!(kappa > 0.0)) throw ParameterError("simulate_eg: kappa must be positive");
  if (game.kind == Game::Kind::prisoners_dilemma && !(game.param > 1.0)) {
    throw ParameterError("simulate_eg: PDG temptation b must exceed 1");
  }
  const Eigen::Index n = net.size();
  std::vector<std::vector<Eigen::Index>> neighbours(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && net.adj(i, j) != 0.0) neighbours[i].push_back(j);
    }
  }

  EgRecord rec;
  rec.game = game;
  rec.strategies.resize(n, static_cast<Eigen::Index>(rounds) * reps);
  for (int r = 0; r < reps; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::bernoulli_distribution coin(0.5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXi s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = coin(rng) ? 1 : 0;
    for (int t = 0; t < rounds; ++t) {
      const Eigen::Index col = static_cast<Eigen::Index>(r) * rounds + t;
      rec.strategies.col(col) = s;
      const Eigen::VectorXd g = eg_payoffs(net, game, Eigen::MatrixXi(s));
      Eigen::VectorXi next = s;
      for (Eigen::Index i = 0; i < n; ++i) {
        // Fixed draw count per node keeps the stream aligned across states.
        const double pick = unit(rng);
        const double accept = unit(rng);
        if (neighbours[i].empty()) continue;
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(pick * neighbours[i].size()),
                                             neighbours[i].size() - 1);
        const Eigen::Index j = neighbours[i][k];
        const double p_adopt = 1.0 / (1.0 + std::exp((g(i) - g(j)) / kappa));
        if (accept < p_adopt) next(i) = s(j);
      }
      s = next;
    }
  }
  rec.payoffs = eg_payoffs(net, game, rec.strategies);
  return rec;
}

namespace {

void check_epidemic(const Network& net, const std::vector<int>& initial, const EpidemicOptions& opts,
                    const char* what) {
  if (!(opts.beta >= 0.0 && opts.beta <= 1.0) || !(opts.delta >= 0.0 && opts.delta <= 1.0)) {
    throw ParameterError(std::string(what) + ": beta and delta must lie in [0, 1]");
  }
  if (opts.steps < 1) throw ParameterError(std::string(what) + ": steps must be positive");
  for (int i : initial) {
    if (i < 0 || i >= net.size()) throw ParameterError(std::string(what) + ": initial node out of range");
  }
  if (initial.empty() && opts.beta > 0.0) {
    warn(std::string(what) + ": no initially infected nodes; the all-susceptible state is absorbing");
  }
}

template <typename Infect>
BinaryTimeSeries run_epidemic(const Network& net, const std::vector<int>& initial, const EpidemicOptions& opts,
                              std::uint64_t seed, Infect infect) {
  const Eigen::Index n = net.size();
  BinaryTimeSeries out;
  out.states = Eigen::MatrixXi::Zero(n, opts.steps);
  out.missing.assign(n, false);
  out.segment.assign(opts.steps, 0);
  Eigen::VectorXi s = Eigen::VectorXi::Zero(n);
  for (int i : initial) s(i) = 1;
  out.states.col(0) = s;

  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 1; t < opts.steps; ++t) {
    Eigen::VectorXi next = s;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u1 = unit(rng);
      const double u2 = unit(rng);
      if (s(i) == 1) {
        if (u1 < opts.delta) next(i) = 0;
      } else if (infect(i, s, u1, u2)) {
        next(i) = 1;
      }
    }
    s = next;
    out.states.col(t) = s;
  }
  return out;
}

}  // namespace

BinaryTimeSeries simulate_sis(const Network& net, const std::vector<int>& initially_infected,
                              const EpidemicOptions& opts, std::uint64_t seed) {
  check_epidemic(net, initially_infected, opts, "simulate_sis");
  const double beta = opts.beta;
  return run_epidemic(net, initially_infected, opts, seed,
                      [&](Eigen::Index i, const Eigen::VectorXi& s, double u, double) {
                        int infected = 0;
                        for (Eigen::Index j = 0; j < net.size(); ++j) {
                          if (j != i && net.adj(i, j) != 0.0 && s(j) == 1) ++infected;
                        }
                        if (infected == 0) return false;
                        return u < 1.0 - std::pow(1.0 - beta, infected);
                      });
}

BinaryTimeSeries simulate_cp(const Network& net, const std::vector<int>& initially_infected,
                             const EpidemicOptions& opts, std::uint64_t seed) {
  check_epidemic(net, initially_infected, opts, "simulate_cp");
  std::vector<std::vector<Eigen::Index>> neighbours(net.size());
  for (Eigen::Index i = 0; i < net.size(); ++i) {
    for (Eigen::Index j = 0; j < net.size(); ++j) {
      if (i != j && net.adj(i, j) != 0.0) neighbours[i].push_back(j);
    }
  }
  const double beta = opts.beta;
  return run_epidemic(net, initially_infected, opts, seed,
                      [&](Eigen::Index i, const Eigen::VectorXi& s, double u_pick, double u_infect) {
                        const auto& nb = neighbours[i];
                        if (nb.empty()) return false;
                        const auto k = std::min<std::size_t>(static_cast<std::size_t>(u_pick * nb.size()),
                                                             nb.size() - 1);
                        return s(nb[k]) == 1 && u_infect < beta;
                      });
}

std::vector<int> random_node_subset(Eigen::Index n, double frac, std::uint64_t seed) {
  if (!(frac >= 0.0 && frac <= 1.0)) throw ParameterError("random_node_subset: frac must lie in [0, 1]");
  // Guard against 0.1 * 40 landing a hair above 4 in floating point.
  const auto k = static_cast<Eigen::Index>(std::ceil(frac * static_cast<double>(n) - 1e-9));
  std::vector<int> nodes(n);
  std::iota(nodes.begin(), nodes.end(), 0);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(nodes[i], nodes[pick(rng)]);
  }
  nodes.resize(k);
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

BinaryTimeSeries simulate_epidemic_segments(const Network& net, EpidemicModel model, const EpidemicOptions& opts,
                                            double initial_frac, int segments, std::uint64_t seed) {
  if (segments < 1) throw ParameterError("simulate_epidemic_segments: segments must be positive");
  const Eigen::Index n = net.size();
  BinaryTimeSeries out;
  out.states.resize(n, static_cast<Eigen::Index>(segments) * opts.steps);
  out.missing.assign(n, false);
  out.segment.resize(out.states.cols());
  for (int s = 0; s < segments; ++s) {
    const auto initial = random_node_subset(n, initial_frac, derive_seed(seed, 2 * static_cast<std::uint64_t>(s)));
    const auto sub = derive_seed(seed, 2 * static_cast<std::uint64_t>(s) + 1);
    const BinaryTimeSeries part = model == EpidemicModel::sis ? simulate_sis(net, initial, opts, sub)
                                                              : simulate_cp(net, initial, opts, sub);
    const Eigen::Index first = static_cast<Eigen::Index>(s) * opts.steps;
    out.states.middleCols(first, opts.steps) = part.states;
    std::fill(out.segment.begin() + first, out.segment.begin() + first + opts.steps, s);
  }
  return out;
}

namespace {

void write_segments(std::ostream& out, const std::vector<int>& segment) {
  if (segment.empty()) return;
  out << "# segment";
  for (int s : segment) out << ',' << s;
  out << '\n';
}

}  // namespace

void write_csv(std::ostream& out, const TimeSeries& ts) {
  out << "# dt=" << csv::format_double(ts.dt) << " variant=" << (ts.variant.empty() ? "none" : ts.variant)
      << " nodes=" << ts.nodes() << " samples=" << ts.samples() << '\n';
  write_segments(out, ts.segment);
  out << "# values\n";
  csv::write_matrix(out, ts.values);
  if (ts.deriv) {
    out << "# deriv\n";
    csv::write_matrix(out, *ts.deriv);
  }
}

void write_csv(std::ostream& out, const BinaryTimeSeries& bts) {
  out << "# binary nodes=" << bts.nodes() << " samples=" << bts.samples() << '\n';
  out << "# missing";
  for (bool m : bts.missing) out << ',' << (m ? 1 : 0);
  out << '\n';
  write_segments(out, bts.segment);
  out << "# states\n";
  csv::write_matrix(out, bts.states);
}

void write_csv(std::ostream& out, const EgRecord& eg) {
  out << "# game=" << eg.game.name() << " nodes=" << eg.nodes() << " samples=" << eg.samples() << '\n';
  out << "# strategies\n";
  csv::write_matrix(out, eg.strategies);
  out << "# payoffs\n";
  csv::write_matrix(out, eg.payoffs);
}

TimeSeries read_time_series_csv(std::istream& raw) {
  // Header-less files are a bare values block.
  std::ostringstream buf;
  buf << raw.rdbuf();
  std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] != '#') text = "# values\n" + text;
  std::istringstream in(text);

  TimeSeries ts;
  std::string line;
  bool have_values = false;
  while (true) {
    if (line.empty() && !std::getline(in, line)) break;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] != '#') throw FormatError("time series CSV: expected a '#' header line");
    const std::string header = line;
    line.clear();
    if (header.rfind("# dt=", 0) == 0) {
      std::istringstream fields(header.substr(2));
      for (std::string kv; fields >> kv;) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        if (key == "dt") ts.dt = std::stod(val);
        if (key == "variant") ts.variant = val;
      }
    } else if (header.rfind("# segment", 0) == 0) {
      const auto fields = csv::split_row(header);
      ts.segment.clear();
      for (std::size_t k = 1; k < fields.size(); ++k) ts.segment.push_back(std::stoi(fields[k]));
    } else if (header == "# values") {
      ts.values = csv::read_matrix(in, &line);
      have_values = true;
    } else if (header == "# deriv") {
      ts.deriv = csv::read_matrix(in, &line);
    }
  }
  if (!have_values) throw FormatError("time series CSV: missing '# values' block");
  if (!ts.segment.empty() && static_cast<Eigen::Index>(ts.segment.size()) != ts.samples()) {
    throw FormatError("time series CSV: segment row length does not match sample count");
  }
  if (ts.deriv && (ts.deriv->rows() != ts.nodes() || ts.deriv->cols() != ts.samples())) {
    throw FormatError("time series CSV: deriv block shape differs from values");
  }
  return ts;
}

}  // namespace manie
