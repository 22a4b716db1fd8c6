#pragma once

#include "zdalab/numeric.hpp"

#include <tuple>
#include <vector>

namespace zdalab {

// Undirected weighted communication topology. Agent indices are 0-based in
// code; the scenario file format uses 1-based labels.
struct Topology {
  int id = 0;
  int n = 0;
  MatrixXd adjacency;

  static Topology from_edges(int id, int n,
                             const std::vector<std::tuple<int, int, double>>& edges);
  // Throws std::invalid_argument when symmetry, zero diagonal or
  // nonnegativity is violated.
  void validate() const;
};

struct SpectralDecomposition {
  VectorXd eigenvalues;  // ascending, eigenvalues(0) == 0 for a Laplacian
  MatrixXd q;            // orthogonal, columns ordered to match
};

MatrixXd laplacian(const Topology& topology);

// Scale-relative default gap tolerance for eigenvalue distinctness.
double distinct_eigenvalue_tolerance(double lambda_max);

// Symmetric eigendecomposition with deterministic column conventions:
// within a repeated-eigenvalue cluster, columns are re-orthonormalized by
// ordered Gram-Schmidt; the zero cluster of a Laplacian gets 1/sqrt(n) as its
// first column; every column has its first nonzero entry positive.
SpectralDecomposition spectral_decompose(const MatrixXd& l);

bool is_connected(const MatrixXd& l, double tol = 1e-8);

bool has_distinct_eigenvalues(const MatrixXd& l, double tol);
bool has_distinct_eigenvalues(const MatrixXd& l);  // default scale-relative tol

// Longest shortest unweighted path; throws on a disconnected topology.
int diameter(const Topology& topology);

int count_distinct_eigenvalues(const VectorXd& ascending, double tol);

// (-1)^((n^2-n)/2) * prod_{i<j} (a_i - a_j)
double vandermonde_det(const std::vector<double>& values);

}  // namespace zdalab
