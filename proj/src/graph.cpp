#include "zdalab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

namespace zdalab {

Topology Topology::from_edges(int id, int n,
                              const std::vector<std::tuple<int, int, double>>& edges) {
  Topology t;
  t.id = id;
  t.n = n;
  t.adjacency = MatrixXd::Zero(n, n);
  for (const auto& [i, j, w] : edges) {
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw std::invalid_argument("edge index out of range in topology " + std::to_string(id));
    if (i == j) throw std::invalid_argument("self-loop in topology " + std::to_string(id));
    if (w < 0.0) throw std::invalid_argument("negative weight in topology " + std::to_string(id));
    t.adjacency(i, j) = w;
    t.adjacency(j, i) = w;
  }
  return t;
}

void Topology::validate() const {
  if (adjacency.rows() != n || adjacency.cols() != n)
    throw std::invalid_argument("adjacency size does not match agent count");
  for (int i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0.0) throw std::invalid_argument("nonzero diagonal in adjacency");
    for (int j = 0; j < n; ++j) {
      if (adjacency(i, j) < 0.0) throw std::invalid_argument("negative adjacency weight");
      if (adjacency(i, j) != adjacency(j, i))
        throw std::invalid_argument("adjacency not symmetric");
    }
  }
}

MatrixXd laplacian(const Topology& topology) {
  const int n = topology.n;
  MatrixXd l = -topology.adjacency;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += topology.adjacency(i, j);
    l(i, i) = row;
  }
  return l;
}

double distinct_eigenvalue_tolerance(double lambda_max) {
  return 1e-8 * std::max(1.0, std::abs(lambda_max));
}

namespace {

// Deterministic sign fix: first entry above tol made positive.
void fix_column_sign(Eigen::Ref<MatrixXd> q, double tol) {
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    for (Eigen::Index r = 0; r < q.rows(); ++r) {
      if (std::abs(q(r, c)) > tol) {
        if (q(r, c) < 0.0) q.col(c) = -q.col(c);
        break;
      }
    }
  }
}

}  // namespace

SpectralDecomposition spectral_decompose(const MatrixXd& l) {
  const Eigen::Index n = l.rows();
  if (l.cols() != n) throw std::invalid_argument("spectral_decompose: square matrix required");
  if ((l - l.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, l.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("spectral_decompose: symmetric matrix required");

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(l);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_decompose: eigensolver failed");

  SpectralDecomposition sd;
  sd.eigenvalues = es.eigenvalues();
  sd.q = es.eigenvectors();

  const double scale = std::max(std::abs(sd.eigenvalues(0)), std::abs(sd.eigenvalues(n - 1)));
  const double ctol = distinct_eigenvalue_tolerance(scale);

  const bool laplacian_like =
      (l * VectorXd::Ones(n)).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, scale);

  // Re-orthonormalize repeated-eigenvalue clusters deterministically.
  Eigen::Index c0 = 0;
  while (c0 < n) {
    Eigen::Index c1 = c0 + 1;
    while (c1 < n && sd.eigenvalues(c1) - sd.eigenvalues(c1 - 1) <= ctol) ++c1;
    const Eigen::Index k = c1 - c0;
    if (k > 1 || (laplacian_like && c0 == 0)) {
      MatrixXd cluster = sd.q.middleCols(c0, k);
      if (laplacian_like && c0 == 0 && std::abs(sd.eigenvalues(0)) <= ctol) {
        // The kernel of a Laplacian contains the ones vector; pin it as the
        // first column so Eq.-style constant-column conventions hold even
        // for disconnected graphs.
        MatrixXd pinned(n, k + 1);
        pinned.col(0) = VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
        pinned.rightCols(k) = cluster;
        cluster = orthonormal_columns(pinned, 1e-8);
        if (cluster.cols() != k)
          throw std::runtime_error("spectral_decompose: kernel basis degenerated");
      } else {
        cluster = orthonormal_columns(cluster, 1e-8);
        if (cluster.cols() != k)
          throw std::runtime_error("spectral_decompose: cluster basis degenerated");
      }
      sd.q.middleCols(c0, k) = cluster;
    }
    c0 = c1;
  }
  fix_column_sign(sd.q, 1e-8 / std::sqrt(double(n)));
  return sd;
}

bool is_connected(const MatrixXd& l, double tol) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(l, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("is_connected: eigensolver failed");
  if (l.rows() < 2) return true;
  return es.eigenvalues()(1) > tol;
}

bool has_distinct_eigenvalues(const MatrixXd& l, double tol) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(l, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("has_distinct_eigenvalues: eigensolver failed");
  const auto& ev = es.eigenvalues();
  for (Eigen::Index i = 1; i < ev.size(); ++i) {
    if (ev(i) - ev(i - 1) <= tol) return false;
  }
  return true;
}

bool has_distinct_eigenvalues(const MatrixXd& l) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(l, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("has_distinct_eigenvalues: eigensolver failed");
  const auto& ev = es.eigenvalues();
  const double tol = distinct_eigenvalue_tolerance(ev(ev.size() - 1));
  for (Eigen::Index i = 1; i < ev.size(); ++i) {
    if (ev(i) - ev(i - 1) <= tol) return false;
  }
  return true;
}

int count_distinct_eigenvalues(const VectorXd& ascending, double tol) {
  if (ascending.size() == 0) return 0;
  int count = 1;
  for (Eigen::Index i = 1; i < ascending.size(); ++i) {
    if (ascending(i) - ascending(i - 1) > tol) ++count;
  }
  return count;
}

int diameter(const Topology& topology) {
  const int n = topology.n;
  int dia = 0;
  std::vector<int> dist(n);
  for (int src = 0; src < n; ++src) {
    std::fill(dist.begin(), dist.end(), -1);
    std::deque<int> queue{src};
    dist[src] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v = 0; v < n; ++v) {
        if (topology.adjacency(u, v) > 0.0 && dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (int v = 0; v < n; ++v) {
      if (dist[v] < 0)
        throw std::invalid_argument("diameter: topology is disconnected (infinite diameter)");
      dia = std::max(dia, dist[v]);
    }
  }
  return dia;
}

double vandermonde_det(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n == 0) throw std::invalid_argument("vandermonde_det: empty value list");
  double prod = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) prod *= values[i] - values[j];
  const std::size_t exponent = (n * n - n) / 2;
  return (exponent % 2 == 0) ? prod : -prod;
}

}  // namespace zdalab
