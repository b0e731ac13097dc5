#include "manie/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "manie/error.hpp"
#include "manie/random.hpp"

namespace manie {

std::size_t Network::edge_count() const {
  std::size_t count = 0;
  const Eigen::Index n = size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || adj(i, j) == 0.0) continue;
      if (directed || i < j) ++count;
    }
  }
  return count;
}

Eigen::Index Network::in_degree(Eigen::Index i) const {
  Eigen::Index d = 0;
  for (Eigen::Index j = 0; j < size(); ++j) {
    if (j != i && adj(i, j) != 0.0) ++d;
  }
  return d;
}

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError(std::string(what) + ": probability must lie in [0, 1]");
  }
}

void link(Network& g, Eigen::Index a, Eigen::Index b) {
  g.adj(a, b) = 1.0;
  g.adj(b, a) = 1.0;
}

void unlink(Network& g, Eigen::Index a, Eigen::Index b) {
  g.adj(a, b) = 0.0;
  g.adj(b, a) = 0.0;
}

Network empty_network(int n, bool directed) {
  return Network{Eigen::MatrixXd::Zero(n, n), directed};
}

Network ring_lattice(int n, int k) {
  Network g = empty_network(n, false);
  for (int u = 0; u < n; ++u) {
    for (int j = 1; j <= k / 2; ++j) link(g, u, (u + j) % n);
  }
  return g;
}

void check_lattice(int n, int k, double p, const char* what) {
  if (n < 1) throw ParameterError(std::string(what) + ": n must be positive");
  if (k < 0 || k % 2 != 0) throw ParameterError(std::string(what) + ": k must be even");
  if (k >= n) throw ParameterError(std::string(what) + ": k must be smaller than n");
  check_probability(p, what);
}

}  // namespace

Network gen_er(int n, double p, bool directed, std::uint64_t seed) {
  if (n < 1) throw ParameterError("gen_er: n must be positive");
  check_probability(p, "gen_er");
  Rng rng(seed);
  std::bernoulli_distribution coin(p);
  Network g = empty_network(n, directed);
  for (int i = 0; i < n; ++i) {
    for (int j = directed ? 0 : i + 1; j < n; ++j) {
      if (i == j || !coin(rng)) continue;
      if (directed) {
        g.adj(i, j) = 1.0;
      } else {
        link(g, i, j);
      }
    }
  }
  return g;
}

Network gen_ba(int n, int m, std::uint64_t seed) {
  if (m < 1) throw ParameterError("gen_ba: m must be at least 1");
  if (m + 1 >= n) throw ParameterError("gen_ba: seed clique of m + 1 nodes must leave room for growth");
  Rng rng(seed);
  Network g = empty_network(n, false);
  // Each node appears once per incident edge endpoint, so a uniform draw
  // from this list is a degree-proportional draw.
  std::vector<int> endpoints;
  for (int a = 0; a <= m; ++a) {
    for (int b = a + 1; b <= m; ++b) {
      link(g, a, b);
      endpoints.push_back(a);
      endpoints.push_back(b);
    }
  }
  for (int node = m + 1; node < n; ++node) {
    std::vector<int> targets;
    while (static_cast<int>(targets.size()) < m) {
      std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
      const int t = endpoints[pick(rng)];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (int t : targets) {
      link(g, node, t);
      endpoints.push_back(node);
      endpoints.push_back(t);
    }
  }
  return g;
}

Network gen_nw(int n, int k, double p, std::uint64_t seed) {
  check_lattice(n, k, p, "gen_nw");
  Rng rng(seed);
  std::bernoulli_distribution coin(p);
  std::uniform_int_distribution<int> any(0, n - 1);
  Network g = ring_lattice(n, k);
  for (int u = 0; u < n; ++u) {
    for (int j = 1; j <= k / 2; ++j) {
      if (!coin(rng)) continue;
      // A node already linked to everyone cannot take a shortcut.
      if (g.in_degree(u) >= n - 1) continue;
      int w = any(rng);
      while (w == u || g.adj(u, w) != 0.0) w = any(rng);
      link(g, u, w);
    }
  }
  return g;
}

Network gen_ws(int n, int k, double p, std::uint64_t seed) {
  check_lattice(n, k, p, "gen_ws");
  Rng rng(seed);
  std::bernoulli_distribution coin(p);
  std::uniform_int_distribution<int> any(0, n - 1);
  Network g = ring_lattice(n, k);
  for (int j = 1; j <= k / 2; ++j) {
    for (int u = 0; u < n; ++u) {
      if (!coin(rng)) continue;
      const int v = (u + j) % n;
      if (g.adj(u, v) == 0.0 || g.in_degree(u) >= n - 1) continue;
      int w = any(rng);
      while (w == u || g.adj(u, w) != 0.0) w = any(rng);
      unlink(g, u, v);
      link(g, u, w);
    }
  }
  return g;
}

namespace {

struct ParsedEdge {
  long long from;
  long long to;
  double weight;
};

long long parse_index(std::string_view token, int line_no) {
  long long value = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || value < 0) {
    throw FormatError("edge list line " + std::to_string(line_no) + ": bad node index '" +
                      std::string(token) + "'");
  }
  return value;
}

}  // namespace

Network load_edge_list(std::string_view text) {
  std::vector<ParsedEdge> edges;
  bool directed = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  long long min_index = std::numeric_limits<long long>::max();
  long long max_index = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() == 1 && (tokens[0] == "directed" || tokens[0] == "undirected")) {
      directed = tokens[0] == "directed";
      continue;
    }
    if (tokens.size() < 2 || tokens.size() > 3) {
      throw FormatError("edge list line " + std::to_string(line_no) + ": expected 'u v [w]'");
    }
    ParsedEdge e{parse_index(tokens[0], line_no), parse_index(tokens[1], line_no), 1.0};
    if (tokens.size() == 3) {
      std::size_t used = 0;
      try {
        e.weight = std::stod(tokens[2], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tokens[2].size() || !std::isfinite(e.weight)) {
        throw FormatError("edge list line " + std::to_string(line_no) + ": bad weight");
      }
    }
    if (e.from == e.to) {
      throw FormatError("edge list line " + std::to_string(line_no) + ": self-loop");
    }
    min_index = std::min({min_index, e.from, e.to});
    max_index = std::max({max_index, e.from, e.to});
    edges.push_back(e);
  }
  if (edges.empty()) throw FormatError("edge list contains no edges");
  const long long offset = min_index >= 1 ? 1 : 0;
  const auto n = static_cast<Eigen::Index>(max_index - offset + 1);
  Network g{Eigen::MatrixXd::Zero(n, n), directed};
  for (const auto& e : edges) {
    const auto from = static_cast<Eigen::Index>(e.from - offset);
    const auto to = static_cast<Eigen::Index>(e.to - offset);
    g.adj(to, from) = e.weight;
    if (!directed) g.adj(from, to) = e.weight;
  }
  return g;
}

Network load_edge_list_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open edge list " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_edge_list(buf.str());
}

}  // namespace manie
