#pragma once

#include "zdalab/graph.hpp"

#include <random>

namespace zdalab::testing {

inline Topology path3(int id = 1) {
  return Topology::from_edges(id, 3, {{0, 1, 1.0}, {1, 2, 1.0}});
}

inline Topology k2(int id = 1) { return Topology::from_edges(id, 2, {{0, 1, 1.0}}); }

inline Topology star4(int id = 1) {
  return Topology::from_edges(id, 4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
}

inline Topology cycle(int n, int id = 1) {
  std::vector<std::tuple<int, int, double>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n, 1.0);
  return Topology::from_edges(id, n, edges);
}

inline Topology complete(int n, int id = 1) {
  std::vector<std::tuple<int, int, double>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j, 1.0);
  return Topology::from_edges(id, n, edges);
}

inline Topology edgeless(int n, int id = 1) { return Topology::from_edges(id, n, {}); }

// Random connected graph with dyadic weights (multiples of 1/16), so row sums
// of the Laplacian cancel exactly in double arithmetic.
inline Topology random_connected(int n, std::mt19937& rng, int id = 1) {
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::uniform_int_distribution<int> wbits(1, 32);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::tuple<int, int, double>> edges;
  for (int i = 1; i < n; ++i) {
    const int j = pick(rng) % i;  // spanning-tree edge
    edges.emplace_back(i, j, wbits(rng) / 16.0);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng) < 0.25) edges.emplace_back(i, j, wbits(rng) / 16.0);
  Topology t = Topology::from_edges(id, n, {});
  for (const auto& [i, j, w] : edges) {
    t.adjacency(i, j) = w;  // later duplicates overwrite earlier ones
    t.adjacency(j, i) = w;
  }
  return t;
}

inline VectorXd random_vector(Eigen::Index n, std::mt19937& rng, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

inline MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937& rng,
                              double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = dist(rng);
  return m;
}

}  // namespace zdalab::testing
