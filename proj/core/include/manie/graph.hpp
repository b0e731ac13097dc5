#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>

#include <Eigen/Dense>

namespace manie {

/// Weighted network. `adj(i, j)` is the weight of the edge j -> i and zero
/// when the edge is absent. The diagonal is always zero; undirected networks
/// keep `adj` symmetric.
struct Network {
  Eigen::MatrixXd adj;
  bool directed = false;

  Eigen::Index size() const { return adj.rows(); }

  /// Unordered pairs for undirected networks, ordered pairs otherwise.
  std::size_t edge_count() const;

  bool has_edge(Eigen::Index from, Eigen::Index to) const { return adj(to, from) != 0.0; }

  /// Number of in-neighbours of node i.
  Eigen::Index in_degree(Eigen::Index i) const;

  friend bool operator==(const Network& a, const Network& b) {
    return a.directed == b.directed && a.adj.rows() == b.adj.rows() &&
           a.adj.cols() == b.adj.cols() && a.adj == b.adj;
  }
};

/// Erdos-Renyi G(n, p). For undirected graphs each unordered pair is sampled
/// once.
Network gen_er(int n, double p, bool directed, std::uint64_t seed);

/// Barabasi-Albert preferential attachment. Growth starts from a complete
/// clique on m + 1 nodes, so at least one node must be attached (m + 1 < n).
Network gen_ba(int n, int m, std::uint64_t seed);

/// Newman-Watts: ring lattice (k nearest neighbours, k even) plus one random
/// shortcut per lattice edge with probability p. Edges are never removed.
Network gen_nw(int n, int k, double p, std::uint64_t seed);

/// Watts-Strogatz: ring lattice where each edge's far endpoint is rewired
/// with probability p.
Network gen_ws(int n, int k, double p, std::uint64_t seed);

/// Parses "u v [w]" lines. '#' starts a comment; a line reading "directed"
/// makes the result directed (u -> v). Indices are taken as 1-based when the
/// smallest index in the file is at least 1.
Network load_edge_list(std::string_view text);
Network load_edge_list_file(const std::filesystem::path& path);

}  // namespace manie
