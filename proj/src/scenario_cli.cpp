#include "zdalab/scenario.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace zdalab {

namespace {

std::string resolve_out_dir(const std::string& flag_value, const std::string& fallback) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("ZDALAB_OUT")) return env;
  return fallback;
}

int do_run(const ScenarioConfig& cfg, const std::string& out_dir) {
  const RunArtifacts artifacts = run_experiment(cfg, out_dir);
  emit_plot_script(artifacts, (std::filesystem::path(out_dir) / "plot_run.py").string());
  std::cout << "wrote " << artifacts.trajectory_csv << "\n"
            << "wrote " << artifacts.residual_csv << "\n"
            << "wrote " << artifacts.summary_json << "\n";
  std::cout << "final position spread " << artifacts.summary.final_position_spread
            << ", final max speed " << artifacts.summary.final_max_speed
            << ", max |residual| " << artifacts.summary.max_abs_residual << "\n";
  if (artifacts.summary.verdict.attack_detected)
    std::cout << "attack detected at t = " << artifacts.summary.verdict.time << "\n";
  else
    std::cout << "no attack detected\n";
  if (artifacts.summary.diverged_at) {
    std::cout << "state diverged at t = " << *artifacts.summary.diverged_at << "\n";
    return 2;
  }
  return 0;
}

void print_certificate(const char* label, const std::optional<StabilityCertificate>& cert) {
  if (!cert) {
    std::cout << label << ": not available (hypothesis violated)\n";
    return;
  }
  std::cout << label << ": " << (cert->pass ? "pass" : "fail")
            << " (convex combination = " << cert->convex_combination << ")\n";
  for (std::size_t i = 0; i < cert->measures.size(); ++i)
    std::cout << "  entry " << i << ": weight " << cert->weights[i] << ", measure "
              << cert->measures[i] << "\n";
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Switched-consensus stealthy-attack laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_flag, topology_flag, reproduce_name;
  std::vector<double> eta_flag;

  auto* run_cmd = app.add_subcommand("run", "Run a scenario end to end");
  run_cmd->add_option("config", config_path, "scenario file")->required();
  run_cmd->add_option("--out", out_flag, "output directory");

  auto* defense_cmd = app.add_subcommand("check-defense", "Evaluate the defense conditions");
  defense_cmd->add_option("config", config_path, "scenario file")->required();

  auto* synth_cmd = app.add_subcommand("synthesize-attack", "Enumerate stealthy attack modes");
  synth_cmd->add_option("config", config_path, "scenario file")->required();
  synth_cmd->add_option("--topology", topology_flag, "topology id (default: first in schedule)");
  synth_cmd->add_option("--eta", eta_flag, "extra eta candidate as 're im'")->expected(2);

  auto* certify_cmd = app.add_subcommand("certify", "Matrix-measure certificates");
  certify_cmd->add_option("config", config_path, "scenario file")->required();

  auto* repro_cmd = app.add_subcommand("reproduce", "Run a built-in scenario");
  repro_cmd->add_option("name", reproduce_name, "one of fig2, fig3, fig5, fig6, consensus16")
      ->required();
  repro_cmd->add_option("--out", out_flag, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) {
      const ScenarioConfig cfg = load_config(config_path);
      return do_run(cfg, resolve_out_dir(out_flag, "out/" + cfg.name));
    }
    if (defense_cmd->parsed()) {
      const ScenarioConfig cfg = load_config(config_path);
      std::vector<Topology> used;
      for (const auto& e : cfg.schedule.entries) {
        bool seen = false;
        for (const auto& t : used) seen |= t.id == e.topology;
        if (!seen) used.push_back(topology_by_id(cfg.topologies, e.topology));
      }
      const DefenseReport report = defense_check(used, cfg.outputs);
      std::cout << report.table() << "\n";
      for (const auto& [key, value] : report.key_values())
        std::cout << key << "=" << value << "\n";
      return 0;
    }
    if (synth_cmd->parsed()) {
      const ScenarioConfig cfg = load_config(config_path);
      const int topo_id =
          topology_flag.empty() ? cfg.schedule.entries.front().topology : std::stoi(topology_flag);
      const Topology& topo = topology_by_id(cfg.topologies, topo_id);
      std::vector<int> k_set = cfg.attack.k_set;
      if (k_set.empty())
        for (int i = 0; i < cfg.n; ++i) k_set.push_back(i);
      std::vector<Complex> grid{Complex(1.0, 0.0)};
      if (cfg.attack.preferred_eta) grid.push_back(*cfg.attack.preferred_eta);
      if (eta_flag.size() == 2) grid.emplace_back(eta_flag[0], eta_flag[1]);
      OutputConfig outputs = cfg.outputs;
      if (cfg.attack.d.size() == outputs.m()) outputs.d = cfg.attack.d;
      const auto candidates = synthesize_zda(topo, outputs, k_set, grid);
      std::cout << candidates.size() << " stealthy mode(s) on topology " << topo_id << "\n";
      for (const auto& cand : candidates) {
        std::cout << "eta = " << cand.eta.real() << (cand.eta.imag() < 0 ? " - " : " + ")
                  << std::abs(cand.eta.imag()) << "i\n  z0 =";
        for (Eigen::Index i = 0; i < cand.z0.size(); ++i)
          std::cout << " (" << cand.z0(i).real() << "," << cand.z0(i).imag() << ")";
        std::cout << "\n  g  =";
        for (Eigen::Index i = 0; i < cand.g.size(); ++i)
          std::cout << " (" << cand.g(i).real() << "," << cand.g(i).imag() << ")";
        std::cout << "\n";
      }
      return 0;
    }
    if (certify_cmd->parsed()) {
      const ScenarioConfig cfg = load_config(config_path);
      std::optional<StabilityCertificate> consensus, observer;
      try {
        consensus = certify_consensus(cfg.schedule, cfg.topologies);
      } catch (const std::invalid_argument& e) {
        std::cout << "consensus certificate error: " << e.what() << "\n";
      }
      try {
        observer = certify_observer(cfg.schedule, cfg.topologies,
                                    observer_gain_matrix(cfg.outputs, cfg.n));
      } catch (const std::invalid_argument& e) {
        std::cout << "observer certificate error: " << e.what() << "\n";
      }
      print_certificate("consensus (Prop-1 style)", consensus);
      print_certificate("observer", observer);
      return 0;
    }
    if (repro_cmd->parsed()) {
      const ScenarioConfig cfg = builtin_scenario(reproduce_name);
      return do_run(cfg, resolve_out_dir(out_flag, "out/" + cfg.name));
    }
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

}  // namespace zdalab
