#pragma once

#include "zdalab/attack.hpp"
#include "zdalab/observer.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace zdalab {

// Attacker program requested by a scenario. The explicit form carries a full
// plan; the synthesized forms build it from the pencil at load/run time.
struct AttackSection {
  enum class ZdaMode { none, explicit_plan, intermittent, non_pausing };

  ZdaMode mode = ZdaMode::none;
  std::vector<int> k_set;
  VectorXd d;  // per-monitored output coefficients (empty = zeros)
  std::optional<Complex> preferred_eta;
  Complex scale = Complex(1.0, 0.0);
  double inference_delay = 0.0;
  bool knows_initial_topology = false;
  bool corrupt_observer_init = true;
  ZdaPlan explicit_plan;
  std::optional<VectorXcd> observer_false_data;  // overrides the derived -z0

  std::optional<TopologyAttack> topology_attack;
  int topology_attack_from_window = 1;
};

struct ScenarioConfig {
  std::string name = "scenario";
  int n = 0;
  double dt = 1e-3;
  double horizon = 10.0;
  std::vector<Topology> topologies;
  SwitchingSchedule schedule;
  OutputConfig outputs;
  StackedState initial;
  double detection_threshold = 1e-4;
  int detection_debounce = 3;
  std::uint64_t seed = 0;
  int export_stride = 1;
  AttackSection attack;

  void validate() const;
};

struct RunSummary {
  double final_position_spread = 0.0;
  double final_max_speed = 0.0;
  double final_mean_position = 0.0;
  double target_location_predicted = 0.0;
  double max_abs_residual = 0.0;
  std::optional<double> diverged_at;
  DetectionVerdict verdict;
};

struct RunArtifacts {
  std::string out_dir;
  std::string trajectory_csv;
  std::string residual_csv;
  std::string summary_json;
  DefenseReport defense;
  std::optional<StabilityCertificate> consensus_certificate;
  std::optional<StabilityCertificate> observer_certificate;
  Trajectory trajectory;
  ResidualTrace residuals;
  ZdaPlan executed_plan;
  RunSummary summary;
};

// Parses and validates a scenario file (JSON, 1-based agent labels).
ScenarioConfig load_config(const std::string& path);
void save_config(const ScenarioConfig& cfg, const std::string& path);

// Full closed-loop run: plant (possibly under input/topology attack) and the
// switching-synchronized observer in lockstep, artifacts written to out_dir.
RunArtifacts run_experiment(const ScenarioConfig& cfg, const std::string& out_dir);

// Resolves the scenario's attack section into an executable plan.
ZdaPlan build_attack_plan(const ScenarioConfig& cfg);

// Self-contained matplotlib script rendering velocity and residual panels.
void emit_plot_script(const RunArtifacts& artifacts, const std::string& path);

// Built-in reproduction scenarios on analog topologies: fig2, fig3, fig5,
// fig6, consensus16.
ScenarioConfig builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

int cli_main(int argc, char** argv);

}  // namespace zdalab
