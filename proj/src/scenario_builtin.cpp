#include "zdalab/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace zdalab {

namespace {

using Edge = std::tuple<int, int, double>;

// Edge labels below are 1-based, matching the scenario file format.
std::vector<Edge> path_edges(const std::vector<int>& order, double weight = 1.0) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < order.size(); ++i)
    edges.emplace_back(order[i], order[i + 1], weight);
  return edges;
}

std::vector<Edge> ring_edges(const std::vector<int>& order, double weight = 1.0) {
  std::vector<Edge> edges = path_edges(order, weight);
  edges.emplace_back(order.back(), order.front(), weight);
  return edges;
}

Topology make_topology(int id, int n, std::vector<Edge> edges) {
  for (auto& [a, b, w] : edges) {
    a -= 1;
    b -= 1;
    (void)w;
  }
  return Topology::from_edges(id, n, edges);
}

VectorXd constant_blocks(int n, double first, double second) {
  VectorXd v(n);
  v.head(n / 2).setConstant(first);
  v.tail(n - n / 2).setConstant(second);
  return v;
}

OutputConfig velocity_outputs(const std::vector<int>& monitored_1based) {
  OutputConfig cfg;
  for (int i : monitored_1based) cfg.monitored.push_back(i - 1);
  const auto m = static_cast<Eigen::Index>(cfg.monitored.size());
  cfg.c1 = VectorXd::Zero(m);
  cfg.c2 = VectorXd::Ones(m);
  cfg.d = VectorXd::Zero(m);
  return cfg;
}

// A sixteen-agent analog of the intermittent-attack figures: a ring spine
// carrying agents 1..3 and 6..16, twin agents 4 and 5 hanging off agent 3
// (their antisymmetric mode has unit eigenvalue and vanishes at agent 1),
// and a controlled chord between agents 1 and 7 that distinguishes the two
// switching topologies.
std::pair<Topology, Topology> intermittent_pair() {
  const std::vector<int> spine{1, 2, 3, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
  std::vector<Edge> base = ring_edges(spine);
  // Twin weights chosen so the antisymmetric twin mode has unit eigenvalue
  // (2 a_45 + a_34 = 1) while the symmetric pendant mode stays fast.
  base.emplace_back(4, 5, 0.2);
  base.emplace_back(3, 4, 0.6);
  base.emplace_back(3, 5, 0.6);
  std::vector<Edge> with_chord = base;
  with_chord.emplace_back(1, 7, 1.0);
  return {make_topology(1, 16, with_chord), make_topology(2, 16, base)};
}

// Densely connected pair for the clean consensus run: a sixteen-ring with
// distance-4 chords against the same graph with one controlled chord off.
std::pair<Topology, Topology> consensus_pair() {
  std::vector<int> order(16);
  for (int i = 0; i < 16; ++i) order[static_cast<std::size_t>(i)] = i + 1;
  std::vector<Edge> a = ring_edges(order);
  for (int i = 1; i <= 16; ++i) a.emplace_back(i, (i + 3) % 16 + 1, 1.0);
  std::vector<Edge> b;
  for (const auto& [u, v, w] : a)
    if (!(std::min(u, v) == 1 && std::max(u, v) == 5)) b.emplace_back(u, v, w);
  return {make_topology(1, 16, a), make_topology(2, 16, b)};
}

// A sixteen-agent path against the same path with a chord near the monitored
// end; both have distinct Laplacian eigenvalues and fully nonzero first
// eigenvector rows, so the intermittent defense conditions hold.
std::pair<Topology, Topology> detectable_pair(int id_a, int id_b) {
  std::vector<int> forward(16);
  for (int i = 0; i < 16; ++i) forward[static_cast<std::size_t>(i)] = i + 1;
  std::vector<Edge> with_chord = path_edges(forward);
  with_chord.emplace_back(2, 5, 1.0);
  return {make_topology(id_a, 16, path_edges(forward)),
          make_topology(id_b, 16, with_chord)};
}

// Cooperative-attack analog: monitored twins 2 and 3 (identical neighborhoods
// through agent 1) plus attack twins 5 and 6 hanging off agent 4.
std::pair<Topology, Topology> cooperative_stealth_pair() {
  const std::vector<int> spine{1, 4, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
  std::vector<Edge> base = ring_edges(spine);
  base.emplace_back(2, 3, 1.0);
  base.emplace_back(1, 2, 1.0);
  base.emplace_back(1, 3, 1.0);
  base.emplace_back(5, 6, 0.2);
  base.emplace_back(4, 5, 0.6);
  base.emplace_back(4, 6, 0.6);
  std::vector<Edge> with_chord = base;
  with_chord.emplace_back(7, 12, 1.0);
  return {make_topology(5, 16, with_chord), make_topology(6, 16, base)};
}

// Cooperative-defense analog: asymmetric connected graphs chosen so the
// eigenvalues are simple and the monitored rows of every eigenvector stay
// pairwise distinct (checked at construction).
std::pair<Topology, Topology> cooperative_defense_pair() {
  std::vector<int> forward(16);
  for (int i = 0; i < 16; ++i) forward[static_cast<std::size_t>(i)] = i + 1;
  std::vector<Edge> a = path_edges(forward);
  a.emplace_back(1, 5, 1.0);
  a.emplace_back(2, 9, 0.5);
  std::vector<Edge> b = path_edges(forward);
  b.emplace_back(3, 12, 1.0);
  b.emplace_back(1, 8, 0.5);
  return {make_topology(7, 16, a), make_topology(8, 16, b)};
}

ZdaCandidate anchored_candidate(const Topology& topology, const OutputConfig& outputs,
                                const std::vector<int>& k_set, Complex eta, int anchor_agent,
                                Complex anchor_value, Complex* scale_out) {
  const auto candidates = synthesize_zda(topology, outputs, k_set, {eta});
  for (const auto& cand : candidates) {
    if (std::abs(cand.eta - eta) > 1e-6 * (1.0 + std::abs(eta))) continue;
    const Complex entry = cand.z0(anchor_agent);
    if (std::abs(entry) < 1e-9) continue;
    *scale_out = anchor_value / entry;
    return cand;
  }
  throw std::logic_error("builtin scenario: expected attack mode not found");
}

ScenarioConfig base16(const std::string& name) {
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.n = 16;
  cfg.dt = 1e-3;
  cfg.initial.x = constant_blocks(16, 2.0, 4.0);
  cfg.initial.v = constant_blocks(16, 6.0, 8.0);
  return cfg;
}

ScenarioConfig make_consensus16() {
  ScenarioConfig cfg = base16("consensus16");
  auto [t1, t2] = consensus_pair();
  cfg.topologies = {t1, t2};
  cfg.schedule.entries = {{1, 3.0}, {2, 6.0}};
  cfg.outputs = velocity_outputs({1});
  cfg.horizon = 40.0;
  return cfg;
}

ScenarioConfig make_fig2() {
  ScenarioConfig cfg = base16("fig2");
  auto [t1, t2] = intermittent_pair();
  cfg.topologies = {t1, t2};
  cfg.schedule.entries = {{1, 3.0}, {2, 6.0}};
  cfg.outputs = velocity_outputs({1});
  cfg.horizon = 27.0;

  cfg.attack.mode = AttackSection::ZdaMode::intermittent;
  cfg.attack.k_set = {3, 4};  // agents 4 and 5
  cfg.attack.preferred_eta = Complex(0.08, -2.0);
  cfg.attack.inference_delay = 0.2;
  Complex scale;
  anchored_candidate(t1, cfg.outputs, cfg.attack.k_set, *cfg.attack.preferred_eta, 3,
                     Complex(-1.0, 0.0), &scale);
  cfg.attack.scale = scale;
  return cfg;
}

ScenarioConfig make_fig3() {
  ScenarioConfig cfg = base16("fig3");
  auto [t3, t4] = detectable_pair(3, 4);
  cfg.topologies = {t3, t4};
  cfg.schedule.entries = {{3, 3.0}, {4, 6.0}};
  cfg.outputs = velocity_outputs({1});
  cfg.horizon = 18.0;

  cfg.attack.mode = AttackSection::ZdaMode::non_pausing;
  cfg.attack.k_set = {3, 4};
  cfg.attack.preferred_eta = Complex(0.08, -2.0);
  cfg.attack.scale = Complex(10.0, 0.0);
  return cfg;
}

ScenarioConfig make_fig5() {
  ScenarioConfig cfg = base16("fig5");
  auto [t5, t6] = cooperative_stealth_pair();
  cfg.topologies = {t5, t6};
  cfg.schedule.entries = {{5, 3.0}, {6, 1.0}};
  cfg.outputs = velocity_outputs({1, 2, 3});
  cfg.horizon = 8.0;

  cfg.attack.mode = AttackSection::ZdaMode::intermittent;
  cfg.attack.k_set = {4, 5};  // agents 5 and 6
  cfg.attack.preferred_eta = Complex(1.0, 0.0);
  cfg.attack.knows_initial_topology = true;
  Complex scale;
  anchored_candidate(t5, cfg.outputs, cfg.attack.k_set, *cfg.attack.preferred_eta, 4,
                     Complex(1.0, 0.0), &scale);
  cfg.attack.scale = scale;

  TopologyAttack atk;
  atk.d_set = {1, 2};  // agents 2 and 3
  atk.target_edges = {{1, 2, 0.0}};
  cfg.attack.topology_attack = atk;
  cfg.attack.topology_attack_from_window = 1;
  return cfg;
}

ScenarioConfig make_fig6() {
  ScenarioConfig cfg = base16("fig6");
  auto [t7, t8] = cooperative_defense_pair();
  cfg.topologies = {t7, t8};
  cfg.schedule.entries = {{7, 3.0}, {8, 1.0}};
  cfg.outputs = velocity_outputs({1, 2, 3});
  cfg.horizon = 8.0;

  cfg.attack.mode = AttackSection::ZdaMode::non_pausing;
  cfg.attack.k_set = {4, 5};
  cfg.attack.preferred_eta = Complex(1.0, 0.0);
  cfg.attack.scale = Complex(0.2, 0.0);

  TopologyAttack atk;
  atk.d_set = {0, 1};
  atk.target_edges = {{0, 1, 0.5}};  // re-weight the link between agents 1 and 2
  cfg.attack.topology_attack = atk;
  cfg.attack.topology_attack_from_window = 1;
  return cfg;
}

}  // namespace

ScenarioConfig builtin_scenario(const std::string& name) {
  if (name == "consensus16") return make_consensus16();
  if (name == "fig2") return make_fig2();
  if (name == "fig3") return make_fig3();
  if (name == "fig5") return make_fig5();
  if (name == "fig6") return make_fig6();
  throw std::invalid_argument("unknown builtin scenario " + name);
}

std::vector<std::string> builtin_scenario_names() {
  return {"fig2", "fig3", "fig5", "fig6", "consensus16"};
}

}  // namespace zdalab
