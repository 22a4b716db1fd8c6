#pragma once

#include "zdalab/switching.hpp"

#include <optional>
#include <string>
#include <vector>

namespace zdalab {

struct ObserverState {
  VectorXd q;           // position estimates
  VectorXd w;           // velocity estimates
  VectorXd r_integral;  // accumulated residual, one entry per monitored agent
};

struct ResidualTrace {
  std::vector<double> times;
  std::vector<VectorXd> residuals;
  double threshold = 1e-4;
  int debounce = 3;
  std::optional<double> first_detection;

  void write_csv(const std::string& path) const;
};

struct DetectionVerdict {
  bool attack_detected = false;
  double time = 0.0;
};

// Observer starts at the true state plus the attacker's false data (when the
// initialization channel is corrupted).
ObserverState initialize_observer(const StackedState& true_init,
                                  const std::optional<VectorXcd>& false_data = std::nullopt);

// One explicit integrator step of the residual-driven observer. The residual
// is evaluated before injection; velocity-mode agents (c1 = 0) are driven by
// the accumulated integral of the residual. Returns the advanced state and
// the pre-step residual.
std::pair<ObserverState, VectorXd> observer_step(const ObserverState& obs,
                                                 const VectorXd& measurement,
                                                 const Topology& topology,
                                                 const OutputConfig& cfg, double dt,
                                                 bool integral_branch = true);

// Same step with a precomputed Laplacian (the run loop's hot path).
std::pair<ObserverState, VectorXd> observer_step(const ObserverState& obs,
                                                 const VectorXd& measurement, const MatrixXd& l,
                                                 const OutputConfig& cfg, double dt,
                                                 bool integral_branch = true);

// Debounced threshold rule over the trace; fills trace.first_detection.
DetectionVerdict detect(ResidualTrace& trace);

}  // namespace zdalab
