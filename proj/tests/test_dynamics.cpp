#include "zdalab/dynamics.hpp"

#include <doctest.h>

#include <fstream>

#include "helpers.hpp"

using namespace zdalab;
using namespace zdalab::testing;

TEST_CASE("system matrix block structure") {
  MatrixXd expected(4, 4);
  expected << 0, 0, 1, 0, 0, 0, 0, 1, -1, 1, -1, 0, 1, -1, 0, -1;
  CHECK((system_matrix(laplacian(k2())) - expected).cwiseAbs().maxCoeff() == 0.0);

  MatrixXd single(2, 2);
  single << 0, 1, 0, -1;
  CHECK((system_matrix(laplacian(edgeless(1))) - single).cwiseAbs().maxCoeff() == 0.0);

  const MatrixXd l3 = laplacian(path3());
  const MatrixXd a3 = system_matrix(l3);
  CHECK((a3.bottomLeftCorner(3, 3) + l3).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a3.topRightCorner(3, 3) - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("output matrices place coefficients on monitored columns") {
  OutputConfig cfg;
  cfg.monitored = {0};
  cfg.c1 = VectorXd::Zero(1);
  cfg.c2 = VectorXd::Ones(1);
  cfg.d = VectorXd::Zero(1);
  auto [c, d] = output_matrices(cfg, 2);
  MatrixXd expected_c(1, 4);
  expected_c << 0, 0, 1, 0;
  CHECK((c - expected_c).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.cwiseAbs().maxCoeff() == 0.0);

  OutputConfig pos;
  pos.monitored = {0, 1};
  pos.c1 = VectorXd::Ones(2);
  pos.c2 = VectorXd::Zero(2);
  pos.d = VectorXd::Zero(2);
  auto [cp, dp] = output_matrices(pos, 3);
  VectorXd z(6);
  z << 7, 8, 9, 1, 2, 3;
  const VectorXd y = cp * z;
  CHECK(y(0) == 7.0);
  CHECK(y(1) == 8.0);
  CHECK(dp.cwiseAbs().maxCoeff() == 0.0);

  OutputConfig datt;
  datt.monitored = {0};
  datt.c1 = VectorXd::Zero(1);
  datt.c2 = VectorXd::Ones(1);
  datt.d = VectorXd::Ones(1);
  auto [cd, dd] = output_matrices(datt, 2);
  MatrixXd expected_d(1, 4);
  expected_d << 0, 0, 1, 0;
  CHECK((dd - expected_d).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("control input") {
  StackedState consensus(VectorXd::Constant(3, 4.0), VectorXd::Zero(3));
  CHECK(control_input(consensus, path3()).cwiseAbs().maxCoeff() == 0.0);

  StackedState s(VectorXd(2), VectorXd::Zero(2));
  s.x << 0, 1;
  const VectorXd u = control_input(s, k2());
  CHECK(u(0) == doctest::Approx(1.0));
  CHECK(u(1) == doctest::Approx(-1.0));

  StackedState any(VectorXd(3), VectorXd(3));
  any.x << 1, -2, 0.5;
  any.v << 0.3, 0.1, -0.7;
  CHECK((control_input(any, edgeless(3)) + any.v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("control input equals the summation form") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const Topology t = random_connected(5, rng);
    StackedState s(random_vector(5, rng), random_vector(5, rng));
    const VectorXd u = control_input(s, t);
    for (int i = 0; i < 5; ++i) {
      double sum = -s.v(i);
      for (int j = 0; j < 5; ++j) sum += t.adjacency(i, j) * (s.x(j) - s.x(i));
      CHECK(u(i) == doctest::Approx(sum).epsilon(1e-12));
    }
  }
}

TEST_CASE("propagate decays on a Hurwitz system") {
  MatrixXd a(2, 2);
  a << 0, 1, -2, -1;
  StackedState s(VectorXd::Constant(1, 1.0), VectorXd::Constant(1, -0.5));
  const StackedState out = propagate(s, a, nullptr, 0.0, 40.0, 1e-3);
  CHECK(out.stacked().norm() < 1e-6);
}

TEST_CASE("propagate matches the matrix exponential") {
  std::mt19937 rng(5);
  const Topology t = random_connected(4, rng);
  const MatrixXd a = system_matrix(laplacian(t));
  StackedState s(random_vector(4, rng), random_vector(4, rng));
  const StackedState via_rk4 = propagate(s, a, nullptr, 0.0, 0.5, 1e-3);
  const StackedState via_expm = propagate_expm(s, a, 0.5);
  CHECK((via_rk4.stacked() - via_expm.stacked()).norm() < 1e-10);

  StackedState zero(VectorXd::Zero(4), VectorXd::Zero(4));
  CHECK(propagate(zero, a, nullptr, 0.0, 1.0, 1e-3).stacked().norm() == 0.0);
}

TEST_CASE("integrator order: halving dt shrinks the defect by about 2^4") {
  std::mt19937 rng(6);
  const Topology t = random_connected(4, rng);
  const MatrixXd a = system_matrix(laplacian(t));
  StackedState s(random_vector(4, rng), random_vector(4, rng));
  const VectorXd exact = propagate_expm(s, a, 1.0).stacked();
  const double err_h = (propagate(s, a, nullptr, 0.0, 1.0, 4e-2).stacked() - exact).norm();
  const double err_h2 = (propagate(s, a, nullptr, 0.0, 1.0, 2e-2).stacked() - exact).norm();
  const double ratio = err_h / err_h2;
  CHECK(ratio > 8.0);
  CHECK(ratio < 32.0);
}

TEST_CASE("propagate_modal is consistent with rk4 on a forced system") {
  std::mt19937 rng(8);
  const MatrixXd a = system_matrix(laplacian(path3()));
  const Complex eta(0.4, -1.1);
  VectorXcd b = VectorXcd::Zero(6);
  b(4) = Complex(0.7, 0.3);
  const VectorXd z0 = random_vector(6, rng);
  const VectorXcd exact = propagate_modal(z0.cast<Complex>(), a, b, eta, 0.8);
  const auto forcing = [&](double t) -> VectorXd { return (b * std::exp(eta * t)).real(); };
  const StackedState rk = propagate(StackedState::from_stacked(z0), a, forcing, 0.0, 0.8, 1e-3);
  CHECK((rk.stacked() - exact.real()).norm() < 1e-9);
}

TEST_CASE("target location") {
  VectorXd x(16), v(16);
  x.head(8).setConstant(2.0);
  x.tail(8).setConstant(4.0);
  v.head(8).setConstant(6.0);
  v.tail(8).setConstant(8.0);
  CHECK(target_location(x, v) == doctest::Approx(10.0));
  CHECK(target_location(VectorXd::Zero(3), VectorXd::Zero(3)) == 0.0);
  VectorXd x2(2);
  x2 << 1, 3;
  CHECK(target_location(x2, VectorXd::Zero(2)) == doctest::Approx(2.0));
}

TEST_CASE("consensus error") {
  const auto zero = consensus_error({VectorXd::Constant(4, 5.0), VectorXd::Zero(4)});
  CHECK(zero.first == 0.0);
  CHECK(zero.second == 0.0);
  VectorXd x(2), v(2);
  x << 0, 1;
  v << 0, -2;
  const auto [spread, speed] = consensus_error({x, v});
  CHECK(spread == doctest::Approx(1.0));
  CHECK(speed == doctest::Approx(2.0));
  const auto single = consensus_error({VectorXd::Constant(1, 3.0), VectorXd::Constant(1, -4.0)});
  CHECK(single.first == 0.0);
  CHECK(single.second == doctest::Approx(4.0));
}

TEST_CASE("average velocity decays like e^{-t} under switching") {
  std::mt19937 rng(9);
  const Topology ta = random_connected(6, rng, 1);
  const Topology tb = random_connected(6, rng, 2);
  StackedState s(random_vector(6, rng), random_vector(6, rng));
  const double vbar0 = s.v.mean();
  for (int k = 0; k < 4; ++k) {
    const MatrixXd a = system_matrix(laplacian(k % 2 == 0 ? ta : tb));
    s = propagate(s, a, nullptr, 0.0, 1.0, 1e-3);
    CHECK(s.v.mean() == doctest::Approx(vbar0 * std::exp(-(k + 1.0))).epsilon(1e-8));
  }
}

TEST_CASE("fluctuation components stay mean free along trajectories") {
  std::mt19937 rng(10);
  const Topology t = random_connected(5, rng);
  StackedState s(random_vector(5, rng), random_vector(5, rng));
  s.x.array() -= s.x.mean();
  s.v.array() -= s.v.mean();
  const MatrixXd a = system_matrix(laplacian(t));
  for (int k = 0; k < 3; ++k) {
    s = propagate(s, a, nullptr, 0.0, 0.7, 1e-3);
    CHECK(std::abs(s.x.sum()) < 1e-9);
    CHECK(std::abs(s.v.sum()) < 1e-9);
  }
}

TEST_CASE("propagate rejects bad arguments and reports divergence") {
  const MatrixXd a = system_matrix(laplacian(k2()));
  StackedState s(VectorXd::Ones(2), VectorXd::Ones(2));
  CHECK_THROWS_AS(propagate(s, a, nullptr, 1.0, 0.5, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(propagate(s, a, nullptr, 0.0, 1.0, -1e-3), std::invalid_argument);

  MatrixXd unstable = MatrixXd::Identity(2, 2) * 400.0;
  StackedState tiny(VectorXd::Constant(1, 1.0), VectorXd::Constant(1, 1.0));
  CHECK_THROWS_AS(propagate(tiny, unstable, nullptr, 0.0, 5.0, 1e-2), DivergenceError);
}

TEST_CASE("trajectory csv layout") {
  Trajectory traj;
  traj.times = {0.0, 0.1};
  VectorXd z(4);
  z << 1, 2, 3, 4;
  traj.states = {z, 2 * z};
  traj.outputs = {VectorXd::Constant(1, 0.5), VectorXd::Constant(1, 1.5)};
  traj.active_topology = {1, 2};
  const std::string path = "/tmp/zdalab_test_traj.csv";
  traj.write_csv(path, 2);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "t,x1,x2,v1,v2,y1,topology");
  std::getline(in, row);
  CHECK(row == "0,1,2,3,4,0.5,1");
}
