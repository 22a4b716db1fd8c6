#pragma once

#include "zdalab/graph.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace zdalab {

// Positions and velocities of all agents, z = [x; v].
struct StackedState {
  VectorXd x;
  VectorXd v;

  StackedState() = default;
  StackedState(VectorXd x_, VectorXd v_) : x(std::move(x_)), v(std::move(v_)) {}

  Eigen::Index n() const { return x.size(); }
  VectorXd stacked() const;
  static StackedState from_stacked(const VectorXd& z);
};

// Monitored-agent output map y_i = c_i1 x_i + c_i2 v_i + d_i g_i.
struct OutputConfig {
  std::vector<int> monitored;  // strictly increasing, 0-based
  VectorXd c1;
  VectorXd c2;
  VectorXd d;

  enum class Mode { velocity, position, partial, mixed };

  void validate(int n) const;
  Mode mode() const;
  Eigen::Index m() const { return static_cast<Eigen::Index>(monitored.size()); }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<VectorXd> states;   // stacked 2n
  std::vector<VectorXd> outputs;  // |M|
  std::vector<int> active_topology;

  void write_csv(const std::string& path, int n) const;
};

struct DivergenceError : std::runtime_error {
  double time;
  explicit DivergenceError(double t)
      : std::runtime_error("state diverged at t = " + std::to_string(t)), time(t) {}
};

// A_sigma = [[0, I], [-L, -I]]
MatrixXd system_matrix(const MatrixXd& l);

// C = [C1 | C2] with coefficients placed at the monitored agents' columns;
// D carries d_i on the velocity-block column of each monitored agent.
std::pair<MatrixXd, MatrixXd> output_matrices(const OutputConfig& cfg, int n);

// u = -v - L x, one entry per agent.
VectorXd control_input(const StackedState& state, const Topology& topology);

// Classical fixed-step RK4 for z' = A z + forcing(t); forcing may be null.
StackedState propagate(const StackedState& state, const MatrixXd& a,
                       const std::function<VectorXd(double)>& forcing, double t0, double t1,
                       double dt);

// Exact matrix-exponential path for zero forcing.
StackedState propagate_expm(const StackedState& state, const MatrixXd& a, double t);

// Exact complex-state propagation of z' = A z + b e^{eta t} phi(0); used as a
// verification oracle for the modal deviation identities.
VectorXcd propagate_modal(const VectorXcd& z0, const MatrixXd& a, const VectorXcd& b,
                          Complex eta, double t);

// x* = mean(x0) + mean(v0)
double target_location(const VectorXd& x0, const VectorXd& v0);

// (max_{i,j} |x_i - x_j|, max_i |v_i|)
std::pair<double, double> consensus_error(const StackedState& state);

template <typename F>
VectorXd rk4_step(F&& f, double t, const VectorXd& y, double h) {
  const VectorXd k1 = f(t, y);
  const VectorXd k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
  const VectorXd k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
  const VectorXd k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace zdalab
