#pragma once

#include "zdalab/observability.hpp"

#include <map>
#include <optional>
#include <tuple>
#include <vector>

namespace zdalab {

// One stealthy mode for a fixed topology: a solution of the structured
// system pencil whose false-data vector also survives input-free intervals
// (it lies in the kernel of the relevant observability stack).
struct ZdaCandidate {
  Complex eta;
  VectorXcd z0;  // 2n, phase-normalized together with g
  VectorXcd g;   // 2n, zero position block, support within K's velocity rows
};

// One executed injection window [resume, pause) on a given topology.
struct ZdaWindow {
  double resume = 0.0;
  double pause = 0.0;
  int topology = 0;
  Complex eta;
  VectorXcd g;    // amplitude of the injected signal Re(g e^{eta (t-resume)})
  VectorXcd dev;  // state deviation amplitude at the resume instant
};

// The attacker's program over a run horizon.
struct ZdaPlan {
  VectorXcd z0;            // false data: plant/observer deviation at t0
  std::vector<int> k_set;  // misbehaving agents, 0-based
  VectorXd d;              // output-attack coefficients, one per monitored agent
  std::vector<ZdaWindow> windows;
  bool corrupt_observer_init = true;

  void validate(int n, const OutputConfig& cfg) const;
  std::vector<int> attacked_topologies() const;
  std::map<int, Complex> eta_by_topology() const;
};

struct TopologyAttack {
  std::vector<std::tuple<int, int, double>> target_edges;  // (i, j, new weight)
  std::vector<int> d_set;                                  // agents incident to target links

  void validate(const std::vector<int>& monitored, int n) const;
};

// through_pauses demands false data that stays invisible on input-free
// intervals as well (kernel of the observability stack); injection_only is
// the bare pencil condition, stealthy only while the injection keeps running.
enum class StealthScope { through_pauses, injection_only };

// Structured ZDA synthesis for one topology. eta candidates come from the
// generalized eigenvalues of the square-compressed reduced pencil, always
// augmented with 0 and the caller's grid; every candidate is verified on the
// exact pencil and trivial solutions (z0 = 0 or g = 0) are dropped.
std::vector<ZdaCandidate> synthesize_zda(const MatrixXd& a, const MatrixXd& c,
                                         const MatrixXd& d, const std::vector<int>& k_set,
                                         const std::vector<Complex>& eta_grid = {},
                                         double rtol = 1e-9,
                                         StealthScope scope = StealthScope::through_pauses);

std::vector<ZdaCandidate> synthesize_zda(const Topology& topology, const OutputConfig& cfg,
                                         const std::vector<int>& k_set,
                                         const std::vector<Complex>& eta_grid = {},
                                         double rtol = 1e-9,
                                         StealthScope scope = StealthScope::through_pauses);

// Piecewise description of a plan over [0, horizon): active windows plus the
// paused gaps with their held output-injection sums (the attacker keeps the
// last injected output values to avoid jumps on the monitored channels).
struct AttackSegment {
  double start = 0.0;
  double end = 0.0;
  bool active = false;
  Complex eta;
  VectorXcd g;    // active: signal amplitude referenced to resume_time
  VectorXcd dev;  // active: deviation amplitude at the resume instant
  VectorXd held;  // paused: accumulated input-signal values at past pauses
  double resume_time = 0.0;
};

std::vector<AttackSegment> attack_segments(const ZdaPlan& plan, double horizon, int n);

// Literal evaluation of the injected signals at time t: the n-vector added to
// the velocity dynamics of misbehaving agents and the |M|-vector added to the
// monitored outputs.
std::pair<VectorXd, VectorXd> attack_signal(const ZdaPlan& plan, const OutputConfig& cfg,
                                            double t, int n);

struct IntermittentOptions {
  bool knows_initial_topology = false;
  double fit_tol = 1e-7;
  Complex initial_scale = Complex(1.0, 0.0);
  std::optional<Complex> preferred_eta;
};

// Builds the pause/update/resume program: first-period windows resume after
// the inference delay, recorded windows resume at the switch, and windows
// whose topology admits no feasible continuation stay paused.
ZdaPlan plan_intermittent(const std::map<int, std::vector<ZdaCandidate>>& per_topology,
                          const std::vector<Topology>& topologies,
                          const SwitchingSchedule& schedule, double inference_delay,
                          double horizon, const IntermittentOptions& opts = {});

// A plan that keeps injecting its first feasible mode across switches.
ZdaPlan make_non_pausing_plan(const ZdaCandidate& candidate, int topology, double resume,
                              double horizon, const std::vector<int>& k_set,
                              const VectorXd& d, Complex scale = Complex(1.0, 0.0));

struct StealthReport {
  bool stealthy = false;
  double max_output_gap = 0.0;
  double max_deviation_error = 0.0;  // against the modal closed form on windows
};

// Simulates attacked and clean systems side by side and compares outputs;
// also checks the exponential state-deviation law on active windows. A
// cooperative physical topology attack corrupts the plant from the given
// dwell-window index onward while the clean reference keeps the nominal
// topologies.
StealthReport verify_stealthy(const ZdaPlan& plan, const std::vector<Topology>& topologies,
                              const SwitchingSchedule& schedule, const OutputConfig& cfg,
                              const StackedState& init, double horizon, double dt,
                              double tol = 1e-6,
                              const std::optional<TopologyAttack>& topo_attack = std::nullopt,
                              int topo_attack_from_window = 1);

// Truncated stealth conditions for a physical topology edit: C2 (Lhat - L)
// L^p x = 0 and the same for v, p = 0..depth.
bool cooperative_feasible(const Topology& topology, const TopologyAttack& atk,
                          const OutputConfig& cfg, const StackedState& at_switch, int depth,
                          double tol = 1e-9);

// State-independent variant on a basis of candidate states (columns are
// stacked 2n vectors).
bool cooperative_feasible(const Topology& topology, const TopologyAttack& atk,
                          const OutputConfig& cfg, const MatrixXd& state_basis, int depth,
                          double tol = 1e-9);

// Applies the edge edits; throws if a resulting weight is negative.
Topology apply_topology_attack(const Topology& topology, const TopologyAttack& atk);

}  // namespace zdalab
