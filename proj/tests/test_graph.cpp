#include "zdalab/graph.hpp"

#include <doctest.h>

#include "helpers.hpp"

using namespace zdalab;
using namespace zdalab::testing;

TEST_CASE("laplacian of the three-agent path") {
  const MatrixXd l = laplacian(path3());
  MatrixXd expected(3, 3);
  expected << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK((l - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian of a two-node graph and the edgeless graph") {
  const MatrixXd l2 = laplacian(k2());
  MatrixXd expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK((l2 - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(laplacian(edgeless(3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian row sums vanish and ones is a kernel vector") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const Topology t = random_connected(3 + trial % 14, rng);
    const MatrixXd l = laplacian(t);
    CHECK((l * VectorXd::Ones(t.n)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("spectral decomposition of the path") {
  const SpectralDecomposition sd = spectral_decompose(laplacian(path3()));
  // Closed form 2 - 2 cos(k pi / 3): {0, 1, 3}.
  CHECK(sd.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sd.eigenvalues(1) == doctest::Approx(1.0));
  CHECK(sd.eigenvalues(2) == doctest::Approx(3.0));
  // First column constant, orthogonality, reconstruction.
  CHECK((sd.q.col(0) - VectorXd::Constant(3, sd.q(0, 0))).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((sd.q.transpose() * sd.q - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("spectral decomposition of K2 and the four-node star") {
  const SpectralDecomposition sd2 = spectral_decompose(laplacian(k2()));
  CHECK(sd2.eigenvalues(1) == doctest::Approx(2.0));

  const SpectralDecomposition sd4 = spectral_decompose(laplacian(star4()));
  CHECK(sd4.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sd4.eigenvalues(1) == doctest::Approx(1.0));
  CHECK(sd4.eigenvalues(2) == doctest::Approx(1.0));
  CHECK(sd4.eigenvalues(3) == doctest::Approx(4.0));
}

TEST_CASE("spectral reconstruction on random graphs") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Topology t = random_connected(4 + trial % 13, rng);
    const MatrixXd l = laplacian(t);
    const SpectralDecomposition sd = spectral_decompose(l);
    const MatrixXd rebuilt = sd.q * sd.eigenvalues.asDiagonal() * sd.q.transpose();
    CHECK((rebuilt - l).norm() <= 1e-10 * std::max(1.0, l.norm()));
    CHECK((sd.q.transpose() * sd.q - MatrixXd::Identity(t.n, t.n)).norm() < 1e-10);
    CHECK((sd.q.col(0) - VectorXd::Constant(t.n, sd.q(0, 0))).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("deterministic eigenvector sign convention") {
  const SpectralDecomposition sd = spectral_decompose(laplacian(path3()));
  for (Eigen::Index c = 0; c < 3; ++c) {
    Eigen::Index r = 0;
    while (std::abs(sd.q(r, c)) < 1e-10) ++r;
    CHECK(sd.q(r, c) > 0.0);
  }
}

TEST_CASE("connectivity predicate") {
  CHECK(is_connected(laplacian(path3()), 1e-8));
  CHECK_FALSE(is_connected(laplacian(edgeless(3)), 1e-8));
  // Two disjoint edges: block-diagonal Laplacian has a repeated zero.
  const Topology two_pairs = Topology::from_edges(1, 4, {{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK_FALSE(is_connected(laplacian(two_pairs), 1e-8));
}

TEST_CASE("eigenvalue distinctness") {
  CHECK(has_distinct_eigenvalues(laplacian(path3())));
  CHECK(has_distinct_eigenvalues(laplacian(k2())));
  CHECK_FALSE(has_distinct_eigenvalues(laplacian(star4())));
}

TEST_CASE("diameter") {
  CHECK(diameter(path3()) == 2);
  CHECK(diameter(complete(4)) == 1);
  CHECK(diameter(cycle(6)) == 3);
  CHECK_THROWS_AS(diameter(edgeless(3)), std::invalid_argument);
}

TEST_CASE("distinct eigenvalue count is at least diameter plus one") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Topology t = random_connected(4 + trial % 10, rng);
    const SpectralDecomposition sd = spectral_decompose(laplacian(t));
    const double tol = distinct_eigenvalue_tolerance(sd.eigenvalues(t.n - 1));
    CHECK(count_distinct_eigenvalues(sd.eigenvalues, tol) >= diameter(t) + 1);
  }
}

TEST_CASE("vandermonde determinant closed form") {
  CHECK(vandermonde_det({1.0, 2.0, 3.0}) == doctest::Approx(2.0));
  CHECK(vandermonde_det({5.0}) == doctest::Approx(1.0));
  CHECK(vandermonde_det({2.0, 2.0}) == doctest::Approx(0.0));
}

TEST_CASE("vandermonde determinant against LU factorization") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 8;
    std::vector<double> values(n);
    for (double& v : values) v = dist(rng);
    MatrixXd h(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) h(r, c) = std::pow(values[static_cast<std::size_t>(c)], r);
    const double via_lu = h.fullPivLu().determinant();
    const double via_formula = vandermonde_det(values);
    CHECK(std::abs(via_formula - via_lu) <=
          1e-10 * std::max({1.0, std::abs(via_formula), std::abs(via_lu)}));
  }
}

TEST_CASE("topology validation rejects malformed graphs") {
  CHECK_THROWS_AS(Topology::from_edges(1, 3, {{0, 0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Topology::from_edges(1, 3, {{0, 5, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Topology::from_edges(1, 3, {{0, 1, -1.0}}), std::invalid_argument);
  Topology bad = path3();
  bad.adjacency(0, 1) = 2.0;  // break symmetry
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
