#include "zdalab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace zdalab {

VectorXd StackedState::stacked() const {
  VectorXd z(2 * x.size());
  z << x, v;
  return z;
}

StackedState StackedState::from_stacked(const VectorXd& z) {
  const Eigen::Index n = z.size() / 2;
  return StackedState(z.head(n), z.tail(n));
}

void OutputConfig::validate(int n) const {
  if (monitored.empty()) throw std::invalid_argument("monitored set must be nonempty");
  for (std::size_t k = 0; k < monitored.size(); ++k) {
    if (monitored[k] < 0 || monitored[k] >= n)
      throw std::invalid_argument("monitored agent index out of range");
    if (k > 0 && monitored[k] <= monitored[k - 1])
      throw std::invalid_argument("monitored set must be strictly increasing");
  }
  const auto mm = m();
  if (c1.size() != mm || c2.size() != mm || d.size() != mm)
    throw std::invalid_argument("output coefficient lengths must match monitored set");
  for (Eigen::Index k = 0; k < mm; ++k) {
    if (c1(k) == 0.0 && c2(k) == 0.0)
      throw std::invalid_argument("monitored agent with both coefficients zero");
  }
}

OutputConfig::Mode OutputConfig::mode() const {
  bool all_velocity = true, all_position = true, all_partial = true;
  for (Eigen::Index k = 0; k < m(); ++k) {
    all_velocity &= (c1(k) == 0.0 && c2(k) != 0.0);
    all_position &= (c1(k) != 0.0 && c2(k) == 0.0);
    all_partial &= (c1(k) != 0.0 && c2(k) != 0.0);
  }
  if (all_velocity) return Mode::velocity;
  if (all_position) return Mode::position;
  if (all_partial) return Mode::partial;
  return Mode::mixed;
}

MatrixXd system_matrix(const MatrixXd& l) {
  const Eigen::Index n = l.rows();
  MatrixXd a = MatrixXd::Zero(2 * n, 2 * n);
  a.topRightCorner(n, n) = MatrixXd::Identity(n, n);
  a.bottomLeftCorner(n, n) = -l;
  a.bottomRightCorner(n, n) = -MatrixXd::Identity(n, n);
  return a;
}

std::pair<MatrixXd, MatrixXd> output_matrices(const OutputConfig& cfg, int n) {
  cfg.validate(n);
  const Eigen::Index m = cfg.m();
  MatrixXd c = MatrixXd::Zero(m, 2 * n);
  MatrixXd d = MatrixXd::Zero(m, 2 * n);
  for (Eigen::Index k = 0; k < m; ++k) {
    const int i = cfg.monitored[static_cast<std::size_t>(k)];
    c(k, i) = cfg.c1(k);
    c(k, n + i) = cfg.c2(k);
    d(k, n + i) = cfg.d(k);
  }
  return {c, d};
}

VectorXd control_input(const StackedState& state, const Topology& topology) {
  const MatrixXd l = laplacian(topology);
  return -state.v - l * state.x;
}

StackedState propagate(const StackedState& state, const MatrixXd& a,
                       const std::function<VectorXd(double)>& forcing, double t0, double t1,
                       double dt) {
  if (!(t1 > t0)) throw std::invalid_argument("propagate: t1 must exceed t0");
  if (!(dt > 0.0)) throw std::invalid_argument("propagate: dt must be positive");
  VectorXd z = state.stacked();
  const auto rhs = [&](double t, const VectorXd& y) -> VectorXd {
    VectorXd dy = a * y;
    if (forcing) dy += forcing(t);
    return dy;
  };
  double t = t0;
  while (t < t1 - 1e-12 * std::max(1.0, std::abs(t1))) {
    const double h = std::min(dt, t1 - t);
    z = rk4_step(rhs, t, z, h);
    t += h;
    if (!z.allFinite()) throw DivergenceError(t);
  }
  return StackedState::from_stacked(z);
}

StackedState propagate_expm(const StackedState& state, const MatrixXd& a, double t) {
  const MatrixXd phi = expm(MatrixXd(a * t));
  return StackedState::from_stacked(phi * state.stacked());
}

VectorXcd propagate_modal(const VectorXcd& z0, const MatrixXd& a, const VectorXcd& b,
                          Complex eta, double t) {
  const Eigen::Index dim = a.rows();
  MatrixXcd aug = MatrixXcd::Zero(dim + 1, dim + 1);
  aug.topLeftCorner(dim, dim) = a.cast<Complex>();
  aug.block(0, dim, dim, 1) = b;
  aug(dim, dim) = eta;
  VectorXcd y(dim + 1);
  y.head(dim) = z0;
  y(dim) = Complex(1.0, 0.0);
  const VectorXcd out = expm(MatrixXcd(aug * t)) * y;
  return out.head(dim);
}

double target_location(const VectorXd& x0, const VectorXd& v0) {
  if (x0.size() == 0) throw std::invalid_argument("target_location: empty state");
  return x0.mean() + v0.mean();
}

std::pair<double, double> consensus_error(const StackedState& state) {
  if (state.n() == 0) throw std::invalid_argument("consensus_error: empty state");
  const double spread = state.x.maxCoeff() - state.x.minCoeff();
  const double speed = state.v.cwiseAbs().maxCoeff();
  return {spread, speed};
}

void Trajectory::write_csv(const std::string& path, int n) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const Eigen::Index m = outputs.empty() ? 0 : outputs.front().size();
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  for (int i = 1; i <= n; ++i) out << ",v" << i;
  for (Eigen::Index i = 1; i <= m; ++i) out << ",y" << i;
  out << ",topology\n";
  char buf[40];
  const auto put = [&](double value) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    out << ',' << buf;
  };
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", times[k]);
    out << buf;
    for (Eigen::Index i = 0; i < states[k].size(); ++i) put(states[k](i));
    for (Eigen::Index i = 0; i < m; ++i) put(outputs[k](i));
    out << ',' << active_topology[k] << '\n';
  }
}

}  // namespace zdalab
