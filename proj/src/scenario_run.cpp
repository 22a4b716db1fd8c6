#include "zdalab/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>

namespace zdalab {

using nlohmann::json;

namespace {

std::vector<Topology> schedule_topologies(const ScenarioConfig& cfg) {
  std::vector<Topology> used;
  for (const auto& e : cfg.schedule.entries) {
    bool seen = false;
    for (const auto& t : used) seen |= (t.id == e.topology);
    if (!seen) used.push_back(topology_by_id(cfg.topologies, e.topology));
  }
  return used;
}

std::vector<Complex> default_eta_grid(const std::optional<Complex>& preferred) {
  std::vector<Complex> grid{Complex(1.0, 0.0)};
  if (preferred) grid.push_back(*preferred);
  return grid;
}

const ZdaCandidate* pick_candidate(const std::vector<ZdaCandidate>& list,
                                   const std::optional<Complex>& preferred) {
  if (list.empty()) return nullptr;
  if (preferred) {
    for (const auto& cand : list)
      if (std::abs(cand.eta - *preferred) <= 1e-6 * (1.0 + std::abs(cand.eta))) return &cand;
  }
  return &list.front();
}

}  // namespace

ZdaPlan build_attack_plan(const ScenarioConfig& cfg) {
  ZdaPlan plan;
  plan.z0 = VectorXcd::Zero(2 * cfg.n);
  if (cfg.attack.mode == AttackSection::ZdaMode::none) return plan;

  OutputConfig synth_outputs = cfg.outputs;
  if (cfg.attack.d.size() == cfg.outputs.m()) synth_outputs.d = cfg.attack.d;

  switch (cfg.attack.mode) {
    case AttackSection::ZdaMode::explicit_plan:
      plan = cfg.attack.explicit_plan;
      if (plan.d.size() == 0) plan.d = synth_outputs.d;
      return plan;
    case AttackSection::ZdaMode::intermittent: {
      std::map<int, std::vector<ZdaCandidate>> per_topology;
      for (const auto& t : schedule_topologies(cfg)) {
        per_topology[t.id] =
            synthesize_zda(t, synth_outputs, cfg.attack.k_set,
                           default_eta_grid(cfg.attack.preferred_eta));
      }
      IntermittentOptions opts;
      opts.knows_initial_topology = cfg.attack.knows_initial_topology;
      opts.initial_scale = cfg.attack.scale;
      opts.preferred_eta = cfg.attack.preferred_eta;
      plan = plan_intermittent(per_topology, cfg.topologies, cfg.schedule,
                               cfg.attack.inference_delay, cfg.horizon, opts);
      if (plan.z0.size() == 0) plan.z0 = VectorXcd::Zero(2 * cfg.n);
      if (plan.k_set.empty()) plan.k_set = cfg.attack.k_set;
      plan.d = synth_outputs.d;
      plan.corrupt_observer_init = cfg.attack.corrupt_observer_init;
      return plan;
    }
    case AttackSection::ZdaMode::non_pausing: {
      const int first_topology = cfg.schedule.entries.front().topology;
      const auto candidates =
          synthesize_zda(topology_by_id(cfg.topologies, first_topology), synth_outputs,
                         cfg.attack.k_set, default_eta_grid(cfg.attack.preferred_eta), 1e-9,
                         StealthScope::injection_only);
      const ZdaCandidate* cand = pick_candidate(candidates, cfg.attack.preferred_eta);
      if (!cand) return plan;
      plan = make_non_pausing_plan(*cand, first_topology, 0.0, cfg.horizon, cfg.attack.k_set,
                                   synth_outputs.d, cfg.attack.scale);
      plan.corrupt_observer_init = cfg.attack.corrupt_observer_init;
      return plan;
    }
    default:
      return plan;
  }
}

RunArtifacts run_experiment(const ScenarioConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);

  RunArtifacts artifacts;
  artifacts.out_dir = out_dir;
  artifacts.defense = defense_check(schedule_topologies(cfg), cfg.outputs);
  try {
    artifacts.consensus_certificate = certify_consensus(cfg.schedule, cfg.topologies);
  } catch (const std::invalid_argument&) {
    artifacts.consensus_certificate.reset();
  }
  try {
    artifacts.observer_certificate = certify_observer(
        cfg.schedule, cfg.topologies, observer_gain_matrix(cfg.outputs, cfg.n));
  } catch (const std::invalid_argument&) {
    artifacts.observer_certificate.reset();
  }

  const int n = cfg.n;
  ZdaPlan plan = build_attack_plan(cfg);
  artifacts.executed_plan = plan;
  const bool attacked = !plan.windows.empty() || plan.z0.norm() > 0.0;

  auto [c_mat, d_mat] = output_matrices(cfg.outputs, n);
  if (plan.d.size() == cfg.outputs.m()) {
    d_mat.setZero();
    for (Eigen::Index k = 0; k < cfg.outputs.m(); ++k)
      d_mat(k, n + cfg.outputs.monitored[static_cast<std::size_t>(k)]) = plan.d(k);
  }

  // Observer initialization: the attacker corrupts the reported initial
  // condition so the observer starts on the believed-clean trajectory.
  std::optional<VectorXcd> false_data;
  if (attacked && plan.corrupt_observer_init) {
    false_data = cfg.attack.observer_false_data ? *cfg.attack.observer_false_data
                                                : VectorXcd(-plan.z0);
  }
  ObserverState obs = initialize_observer(cfg.initial, false_data);
  obs.r_integral = VectorXd::Zero(cfg.outputs.m());

  const auto wins = windows_over(cfg.schedule, cfg.horizon);
  const auto segs = attack_segments(plan, cfg.horizon, n);

  VectorXd z = cfg.initial.stacked();
  double t = 0.0;
  artifacts.residuals.threshold = cfg.detection_threshold;
  artifacts.residuals.debounce = cfg.detection_debounce;

  const auto segment_at = [&](double time) -> const AttackSegment& {
    for (const auto& s : segs)
      if (time >= s.start - 1e-12 && time < s.end - 1e-12) return s;
    return segs.back();
  };

  long step_count = 0;
  bool diverged = false;
  for (std::size_t wi = 0; wi < wins.size() && !diverged; ++wi) {
    const auto& w = wins[wi];
    Topology plant_topology = topology_by_id(cfg.topologies, w.topology);
    if (cfg.attack.topology_attack &&
        static_cast<int>(wi) >= cfg.attack.topology_attack_from_window) {
      plant_topology = apply_topology_attack(plant_topology, *cfg.attack.topology_attack);
    }
    const MatrixXd a_plant = system_matrix(laplacian(plant_topology));
    const MatrixXd l_observer = laplacian(topology_by_id(cfg.topologies, w.topology));

    // Sub-pieces of the window share one attack regime.
    std::vector<double> cuts{w.start, w.end};
    for (const auto& s : segs) {
      if (s.start > w.start && s.start < w.end) cuts.push_back(s.start);
      if (s.end > w.start && s.end < w.end) cuts.push_back(s.end);
    }
    std::sort(cuts.begin(), cuts.end());

    for (std::size_t piece = 0; piece + 1 < cuts.size() && !diverged; ++piece) {
      const double t1 = cuts[piece + 1];
      const AttackSegment& seg = segment_at(0.5 * (cuts[piece] + t1));
      // The held sum feeds only the monitored outputs; input injection is
      // zero while the attack is paused.
      const auto signal_at = [&](double time) -> VectorXd {
        if (seg.active) return (seg.g * std::exp(seg.eta * (time - seg.resume_time))).real();
        return seg.held;
      };
      const auto rhs_plant = [&](double time, const VectorXd& y) -> VectorXd {
        VectorXd dy = a_plant * y;
        if (attacked && seg.active)
          dy += (seg.g * std::exp(seg.eta * (time - seg.resume_time))).real();
        return dy;
      };

      const double piece_start = t;
      const long full_steps = std::lround(std::floor((t1 - piece_start) / cfg.dt + 1e-9));
      const double tail = t1 - piece_start - full_steps * cfg.dt;
      const long piece_steps = full_steps + (tail > 1e-9 ? 1 : 0);
      for (long k = 0; k < piece_steps && !diverged; ++k) {
        t = piece_start + k * cfg.dt;
        const double h = std::min(cfg.dt, t1 - t);
        const VectorXd signal = attacked ? signal_at(t) : VectorXd::Zero(2 * n);
        const VectorXd y_meas = c_mat * z + d_mat * signal;

        auto [next_obs, residual] = observer_step(obs, y_meas, l_observer, cfg.outputs, h);

        if (step_count % cfg.export_stride == 0) {
          artifacts.trajectory.times.push_back(t);
          artifacts.trajectory.states.push_back(z);
          artifacts.trajectory.outputs.push_back(y_meas);
          artifacts.trajectory.active_topology.push_back(w.topology);
          artifacts.residuals.times.push_back(t);
          artifacts.residuals.residuals.push_back(residual);
        }

        z = rk4_step(rhs_plant, t, z, h);
        obs = next_obs;
        ++step_count;
        if (!z.allFinite() || z.cwiseAbs().maxCoeff() > 1e9) {
          diverged = true;
          artifacts.summary.diverged_at = t + h;
        }
      }
      if (!diverged) t = t1;
    }
  }

  // Final sample.
  if (!diverged) {
    const AttackSegment& seg = segment_at(cfg.horizon - 1e-12);
    const VectorXd signal =
        attacked ? (seg.active ? VectorXd((seg.g * std::exp(seg.eta * (t - seg.resume_time))).real())
                               : seg.held)
                 : VectorXd::Zero(2 * n);
    const VectorXd y_meas = c_mat * z + d_mat * signal;
    VectorXd residual(cfg.outputs.m());
    for (Eigen::Index k = 0; k < cfg.outputs.m(); ++k) {
      const int i = cfg.outputs.monitored[static_cast<std::size_t>(k)];
      residual(k) = cfg.outputs.c1(k) * obs.q(i) + cfg.outputs.c2(k) * obs.w(i) - y_meas(k);
    }
    artifacts.trajectory.times.push_back(t);
    artifacts.trajectory.states.push_back(z);
    artifacts.trajectory.outputs.push_back(y_meas);
    artifacts.trajectory.active_topology.push_back(wins.back().topology);
    artifacts.residuals.times.push_back(t);
    artifacts.residuals.residuals.push_back(residual);
  }

  artifacts.summary.verdict = detect(artifacts.residuals);
  double max_res = 0.0;
  for (const auto& r : artifacts.residuals.residuals)
    if (r.size()) max_res = std::max(max_res, r.cwiseAbs().maxCoeff());
  artifacts.summary.max_abs_residual = max_res;

  const StackedState final_state = StackedState::from_stacked(artifacts.trajectory.states.back());
  const auto [spread, speed] = consensus_error(final_state);
  artifacts.summary.final_position_spread = spread;
  artifacts.summary.final_max_speed = speed;
  artifacts.summary.final_mean_position = final_state.x.mean();
  artifacts.summary.target_location_predicted = target_location(cfg.initial.x, cfg.initial.v);

  // Artifacts on disk.
  artifacts.trajectory_csv = (std::filesystem::path(out_dir) / "trajectory.csv").string();
  artifacts.residual_csv = (std::filesystem::path(out_dir) / "residuals.csv").string();
  artifacts.summary_json = (std::filesystem::path(out_dir) / "summary.json").string();
  artifacts.trajectory.write_csv(artifacts.trajectory_csv, n);
  artifacts.residuals.write_csv(artifacts.residual_csv);
  save_config(cfg, (std::filesystem::path(out_dir) / "scenario.json").string());

  json js;
  js["name"] = cfg.name;
  js["final_position_spread"] = artifacts.summary.final_position_spread;
  js["final_max_speed"] = artifacts.summary.final_max_speed;
  js["final_mean_position"] = artifacts.summary.final_mean_position;
  js["target_location_predicted"] = artifacts.summary.target_location_predicted;
  js["max_abs_residual"] = artifacts.summary.max_abs_residual;
  if (artifacts.summary.diverged_at) js["diverged_at"] = *artifacts.summary.diverged_at;
  js["attack_detected"] = artifacts.summary.verdict.attack_detected;
  if (artifacts.summary.verdict.attack_detected)
    js["detection_time"] = artifacts.summary.verdict.time;
  js["defense"] = {{"intermittent", artifacts.defense.verdict_intermittent},
                   {"cooperative", artifacts.defense.verdict_cooperative}};
  if (artifacts.consensus_certificate) {
    js["consensus_certificate"] = {{"pass", artifacts.consensus_certificate->pass},
                                   {"value", artifacts.consensus_certificate->convex_combination}};
  }
  if (artifacts.observer_certificate) {
    js["observer_certificate"] = {{"pass", artifacts.observer_certificate->pass},
                                  {"value", artifacts.observer_certificate->convex_combination}};
  }
  if (attacked) {
    json windows = json::array();
    for (const auto& w : plan.windows)
      windows.push_back({{"resume", w.resume},
                         {"pause", w.pause},
                         {"topology", w.topology},
                         {"eta", json::array({w.eta.real(), w.eta.imag()})}});
    js["executed_attack_windows"] = windows;
  }
  std::ofstream out(artifacts.summary_json);
  out << js.dump(2) << '\n';

  return artifacts;
}

void emit_plot_script(const RunArtifacts& artifacts, const std::string& path) {
  if (!std::filesystem::exists(artifacts.trajectory_csv) ||
      !std::filesystem::exists(artifacts.residual_csv))
    throw std::invalid_argument("emit_plot_script: run artifacts are missing");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "#!/usr/bin/env python3\n"
         "import csv\n"
         "import matplotlib.pyplot as plt\n"
         "\n"
         "def load(path):\n"
         "    with open(path) as fh:\n"
         "        rows = list(csv.reader(fh))\n"
         "    header, data = rows[0], rows[1:]\n"
         "    cols = {name: [float(r[i]) for r in data] for i, name in enumerate(header)}\n"
         "    return header, cols\n"
         "\n"
      << "traj_header, traj = load(" << std::quoted(artifacts.trajectory_csv) << ")\n"
      << "res_header, res = load(" << std::quoted(artifacts.residual_csv) << ")\n"
      << "threshold = " << artifacts.residuals.threshold << "\n"
      << "\n"
         "fig, (ax_v, ax_r) = plt.subplots(2, 1, figsize=(9, 7), sharex=True)\n"
         "for name in traj_header:\n"
         "    if name.startswith('v'):\n"
         "        ax_v.plot(traj['t'], traj[name], lw=0.8)\n"
         "ax_v.set_ylabel('velocities')\n"
         "for name in res_header:\n"
         "    if name.startswith('r'):\n"
         "        ax_r.plot(res['t'], res[name], lw=1.0, label=name)\n"
         "ax_r.axhline(threshold, color='k', ls='--', lw=0.8, label='threshold')\n"
         "ax_r.axhline(-threshold, color='k', ls='--', lw=0.8)\n"
         "ax_r.set_xlabel('t')\n"
         "ax_r.set_ylabel('detection signals')\n"
         "ax_r.legend(loc='best', fontsize=8)\n"
         "fig.tight_layout()\n"
         "plt.savefig('run_panels.png', dpi=150)\n"
         "print('wrote run_panels.png')\n";
}

}  // namespace zdalab
