// Acceptance suite: one check per criterion, one pass/fail line each.

#include "zdalab/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

using namespace zdalab;

namespace {

int g_failures = 0;

void report(int index, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] C%d %s (%s)\n", pass ? "PASS" : "FAIL", index, name, detail.c_str());
  if (!pass) ++g_failures;
}

std::string out_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / "zdalab_acceptance" / leaf;
  return dir.string();
}

OutputConfig velocity_cfg(const std::vector<int>& monitored) {
  OutputConfig cfg;
  cfg.monitored = monitored;
  const auto m = static_cast<Eigen::Index>(monitored.size());
  cfg.c1 = VectorXd::Zero(m);
  cfg.c2 = VectorXd::Ones(m);
  cfg.d = VectorXd::Zero(m);
  return cfg;
}

Topology random_connected(int n, std::mt19937& rng, int id) {
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::uniform_int_distribution<int> wbits(1, 32);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Topology t = Topology::from_edges(id, n, {});
  for (int i = 1; i < n; ++i) {
    const int j = pick(rng) % i;
    t.adjacency(i, j) = t.adjacency(j, i) = wbits(rng) / 16.0;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng) < 0.3 && t.adjacency(i, j) == 0.0)
        t.adjacency(i, j) = t.adjacency(j, i) = wbits(rng) / 16.0;
  return t;
}

VectorXd random_vector(Eigen::Index n, std::mt19937& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

// ---------------------------------------------------------------------------

void criterion_1() {
  const ScenarioConfig cfg = builtin_scenario("consensus16");
  const auto started = std::chrono::steady_clock::now();
  const RunArtifacts artifacts = run_experiment(cfg, out_dir("c1"));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  const StackedState final_state = StackedState::from_stacked(artifacts.trajectory.states.back());
  const double worst_position = (final_state.x.array() - 10.0).abs().maxCoeff();
  const double worst_speed = final_state.v.cwiseAbs().maxCoeff();
  const bool cert = artifacts.consensus_certificate && artifacts.consensus_certificate->pass;

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "max|x-10| = %.2e, max|v| = %.2e, certificate %s, runtime %.2f s", worst_position,
                worst_speed, cert ? "pass" : "fail", seconds);
  report(1, "consensus and target location",
         cert && worst_position < 1e-3 && worst_speed < 1e-3 && seconds < 10.0, detail);
}

void criterion_2() {
  const Topology t = Topology::from_edges(1, 3, {{0, 1, 1.0}, {1, 2, 1.0}});
  const OutputConfig cfg = velocity_cfg({1});

  ZdaPlan plan;
  plan.z0 = VectorXcd::Zero(6);
  plan.z0 << 1, 0, -1, 1, 0, -1;
  plan.k_set = {0, 2};
  plan.d = VectorXd::Zero(1);
  ZdaWindow w;
  w.resume = 0.0;
  w.pause = 5.0;
  w.topology = 1;
  w.eta = Complex(1.0, 0.0);
  w.g = VectorXcd::Zero(6);
  w.g(3) = 3.0;
  w.g(5) = -3.0;
  w.dev = plan.z0;
  plan.windows.push_back(w);

  SwitchingSchedule schedule;
  schedule.entries = {{1, 5.0}};
  std::mt19937 rng(101);
  const StackedState init(random_vector(3, rng), random_vector(3, rng));
  const StealthReport stealth =
      verify_stealthy(plan, {t}, schedule, cfg, init, 5.0, 1e-3);

  // Deviation growth against the closed form |z - z_clean| = e^t |z0|.
  const MatrixXd a = system_matrix(laplacian(t));
  const VectorXcd g_mode = w.g;
  VectorXd z_clean = init.stacked();
  VectorXd z_attacked = init.stacked() + plan.z0.real();
  const double z0_norm = plan.z0.real().norm();
  double worst_rel = 0.0;
  for (int step = 0; step < 5000; ++step) {
    const double tnow = step * 1e-3;
    if (step % 100 == 0) {
      const double predicted = std::exp(tnow) * z0_norm;
      worst_rel = std::max(worst_rel,
                           std::abs((z_attacked - z_clean).norm() - predicted) / predicted);
    }
    z_clean = rk4_step([&](double, const VectorXd& y) -> VectorXd { return a * y; }, tnow,
                       z_clean, 1e-3);
    z_attacked = rk4_step(
        [&](double tt, const VectorXd& y) -> VectorXd {
          return a * y + (g_mode * std::exp(tt)).real();
        },
        tnow, z_attacked, 1e-3);
  }

  char detail[160];
  std::snprintf(detail, sizeof(detail), "max output gap = %.2e, growth-law error = %.3f%%",
                stealth.max_output_gap, 100.0 * worst_rel);
  report(2, "stealthiness oracle on the derived path attack",
         stealth.max_output_gap <= 1e-6 && worst_rel <= 0.01, detail);
}

void criterion_3() {
  std::mt19937 rng(2024);
  int accepted = 0;
  double worst = 0.0;
  bool ok = true;
  while (accepted < 20) {
    const int n = 4 + static_cast<int>(rng() % 5);  // 4..8
    const Topology t = random_connected(n, rng, 1);
    const MatrixXd l = laplacian(t);
    if (!is_connected(l) || !has_distinct_eigenvalues(l)) continue;
    const DefenseReport velocity_report = defense_check({t}, velocity_cfg({0}));
    if (!velocity_report.verdict_intermittent) continue;
    const int monitored = velocity_report.f_set.front();
    ++accepted;

    const MatrixXd a = system_matrix(l);
    const std::vector<PrefixEntry> prefix{{a, 1.0}};

    OutputConfig vel = velocity_cfg({monitored});
    auto [cv, dv] = output_matrices(vel, n);
    MatrixXd expected_v = MatrixXd::Zero(2 * n, 1);
    expected_v.col(0).head(n).setOnes();
    expected_v.col(0).normalize();
    worst = std::max(worst,
                     subspace_distance(unobservable_subspace(prefix, cv).basis, expected_v));

    OutputConfig pos = vel;
    pos.c1 = VectorXd::Ones(1);
    pos.c2 = VectorXd::Zero(1);
    auto [cp, dp] = output_matrices(pos, n);
    worst = std::max(worst, subspace_distance(unobservable_subspace(prefix, cp).basis,
                                              MatrixXd::Zero(2 * n, 0)));

    OutputConfig mix = vel;
    mix.c1 = VectorXd::Ones(1);
    mix.c2 = VectorXd::Ones(1);
    auto [cm, dm] = output_matrices(mix, n);
    MatrixXd expected_m = MatrixXd::Zero(2 * n, 1);
    expected_m.col(0).head(n).setOnes();
    expected_m.col(0).tail(n).setConstant(-1.0);
    expected_m.col(0).normalize();
    worst = std::max(worst,
                     subspace_distance(unobservable_subspace(prefix, cm).basis, expected_m));
    ok &= worst <= 1e-8;
  }
  char detail[120];
  std::snprintf(detail, sizeof(detail), "%d graphs, worst subspace distance = %.2e", accepted,
                worst);
  report(3, "analytic switched-observability kernels", ok && worst <= 1e-8, detail);
}

void criterion_4() {
  const Topology t = Topology::from_edges(1, 3, {{0, 1, 1.0}, {1, 2, 1.0}});
  const std::vector<Complex> grid{Complex(1.0, 0.0), Complex(0.08, -2.0),
                                  Complex(-0.5, std::sqrt(3.0) / 2.0)};

  const auto exposed = synthesize_zda(t, velocity_cfg({1}), {0, 2}, grid);
  const bool part1 = !exposed.empty();

  bool part2 = true;
  int swept = 0;
  for (int mask = 1; mask < 8; ++mask) {
    std::vector<int> k_set;
    for (int bit = 0; bit < 3; ++bit)
      if (mask & (1 << bit)) k_set.push_back(bit);
    ++swept;
    part2 &= synthesize_zda(t, velocity_cfg({0}), k_set, grid).empty();
  }

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "monitored {2}: %zu stealthy modes; monitored {1}: trivial-only over %d "
                "misbehaving sets and all eta candidates",
                exposed.size(), swept);
  report(4, "defense necessity on the path", part1 && part2, detail);
}

void criterion_5() {
  const RunArtifacts detected = run_experiment(builtin_scenario("fig3"), out_dir("c5_valid"));
  double pre_switch = 0.0, one_dwell = 0.0;
  for (std::size_t k = 0; k < detected.residuals.times.size(); ++k) {
    const double t = detected.residuals.times[k];
    const double peak = detected.residuals.residuals[k].cwiseAbs().maxCoeff();
    if (t < 3.0) pre_switch = std::max(pre_switch, peak);
    if (t >= 3.0 && t <= 9.0) one_dwell = std::max(one_dwell, peak);
  }

  const RunArtifacts hidden = run_experiment(builtin_scenario("fig2"), out_dir("c5_invalid"));

  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "defense-valid: residual %.2e before the switch, %.2e within one dwell; "
                "defense-invalid: %.2e over the full horizon",
                pre_switch, one_dwell, hidden.summary.max_abs_residual);
  report(5, "detection at the first unpaused switch",
         pre_switch <= 1e-6 && one_dwell > 1e-3 && hidden.summary.max_abs_residual <= 1e-6,
         detail);
}

ScenarioConfig cooperative_analog8() {
  ScenarioConfig cfg;
  cfg.name = "coop8";
  cfg.n = 8;
  cfg.horizon = 8.0;
  std::vector<std::tuple<int, int, double>> base{{0, 3, 1.0}, {3, 6, 1.0}, {6, 7, 1.0},
                                                 {7, 0, 1.0}, {1, 2, 1.0}, {0, 1, 1.0},
                                                 {0, 2, 1.0}, {4, 5, 0.2}, {3, 4, 0.6},
                                                 {3, 5, 0.6}};
  std::vector<std::tuple<int, int, double>> alt = base;
  alt.emplace_back(3, 7, 1.0);
  cfg.topologies = {Topology::from_edges(1, 8, base), Topology::from_edges(2, 8, alt)};
  cfg.schedule.entries = {{1, 3.0}, {2, 1.0}};
  cfg.outputs = velocity_cfg({0, 1, 2});
  cfg.initial.x = VectorXd(8);
  cfg.initial.x << 2, 2, 2, 2, 4, 4, 4, 4;
  cfg.initial.v = VectorXd(8);
  cfg.initial.v << 6, 6, 6, 6, 8, 8, 8, 8;
  cfg.attack.mode = AttackSection::ZdaMode::intermittent;
  cfg.attack.k_set = {4, 5};
  cfg.attack.preferred_eta = Complex(1.0, 0.0);
  cfg.attack.knows_initial_topology = true;
  TopologyAttack atk;
  atk.d_set = {1, 2};
  atk.target_edges = {{1, 2, 0.0}};  // cut the monitored twins' link
  cfg.attack.topology_attack = atk;
  cfg.attack.topology_attack_from_window = 1;
  return cfg;
}

void criterion_6() {
  // Part A: monitored twins violate the row-difference condition, so the
  // edge edit inside the monitored set plus the twin-mode injection stays
  // stealthy across the switch.
  const ScenarioConfig coop = cooperative_analog8();
  const DefenseReport posture = defense_check(coop.topologies, coop.outputs);
  const ZdaPlan plan = build_attack_plan(coop);
  const StealthReport stealth =
      verify_stealthy(plan, coop.topologies, coop.schedule, coop.outputs, coop.initial,
                      coop.horizon, coop.dt, 1e-6, coop.attack.topology_attack,
                      coop.attack.topology_attack_from_window);
  const bool part_a = !posture.verdict_cooperative && !plan.windows.empty() && stealth.stealthy;

  // Part B: under the cooperative defense conditions every constructed
  // cooperative attack must light up the detector.
  std::mt19937 rng(4242);
  int graphs = 0, attacks = 0;
  double weakest = 1e9;
  while (graphs < 3) {
    const int n = 6 + static_cast<int>(rng() % 3);  // 6..8
    const Topology ta = random_connected(n, rng, 1);
    const Topology tb = random_connected(n, rng, 2);
    ScenarioConfig cfg;
    cfg.n = n;
    cfg.name = "coop_defended";
    cfg.horizon = 8.0;
    cfg.topologies = {ta, tb};
    cfg.schedule.entries = {{1, 3.0}, {2, 1.0}};
    cfg.outputs = velocity_cfg({0, 1, 2});
    const DefenseReport report_box = defense_check(cfg.topologies, cfg.outputs);
    if (!report_box.verdict_cooperative) continue;
    ++graphs;
    cfg.initial.x = random_vector(n, rng);
    cfg.initial.v = random_vector(n, rng);

    const std::vector<std::pair<int, int>> edits{{0, 1}, {0, 2}, {1, 2}};
    for (const auto& [i, j] : edits) {
      ScenarioConfig attacked = cfg;
      attacked.attack.mode = AttackSection::ZdaMode::non_pausing;
      attacked.attack.k_set = {n - 2, n - 1};
      attacked.attack.preferred_eta = Complex(1.0, 0.0);
      TopologyAttack atk;
      atk.d_set = {i, j};
      const double old_w = ta.adjacency(i, j);
      atk.target_edges = {{i, j, old_w > 0.0 ? 0.0 : 1.0}};
      attacked.attack.topology_attack = atk;
      attacked.attack.topology_attack_from_window = 1;
      const RunArtifacts artifacts = run_experiment(
          attacked, out_dir("c6_" + std::to_string(graphs) + "_" + std::to_string(attacks)));
      weakest = std::min(weakest, artifacts.summary.max_abs_residual);
      ++attacks;
    }
  }
  const bool part_b = weakest > 1e-3;

  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "stealthy analog gap = %.2e; %d defended cooperative attacks, weakest residual "
                "= %.2e",
                stealth.max_output_gap, attacks, weakest);
  report(6, "cooperative attacks: stealth without, detection with the defense",
         part_a && part_b, detail);
}

void criterion_7() {
  const ScenarioConfig cfg = builtin_scenario("consensus16");
  const StabilityCertificate consensus = certify_consensus(cfg.schedule, cfg.topologies);
  const StabilityCertificate observer = certify_observer(
      cfg.schedule, cfg.topologies, observer_gain_matrix(cfg.outputs, cfg.n));

  // Fluctuation norm sampled at period boundaries must decrease.
  const double tau = cfg.schedule.period();
  StackedState state = cfg.initial;
  bool consensus_monotone = true;
  double prev = 1e300;
  for (int period = 0; period < 4; ++period) {
    for (const auto& e : cfg.schedule.entries) {
      const MatrixXd a =
          system_matrix(laplacian(topology_by_id(cfg.topologies, e.topology)));
      state = propagate(state, a, nullptr, 0.0, e.dwell, cfg.dt);
    }
    VectorXd fluct(2 * cfg.n);
    fluct << state.x.array() - state.x.mean(), state.v.array() - state.v.mean();
    consensus_monotone &= fluct.norm() < prev;
    prev = fluct.norm();
  }

  // Observer error norm sampled at period boundaries must decrease as well.
  StackedState plant = cfg.initial;
  ObserverState obs = initialize_observer(plant);
  std::mt19937 rng(7);
  obs.w += random_vector(cfg.n, rng);
  const auto [c_mat, d_mat] = output_matrices(cfg.outputs, cfg.n);
  bool observer_monotone = true;
  double prev_err = 1e300;
  double t = 0.0;
  for (int period = 0; period < 4; ++period) {
    for (const auto& e : cfg.schedule.entries) {
      const Topology& topo = topology_by_id(cfg.topologies, e.topology);
      const MatrixXd a = system_matrix(laplacian(topo));
      const MatrixXd l = laplacian(topo);
      const long steps = std::lround(e.dwell / cfg.dt);
      for (long k = 0; k < steps; ++k) {
        const VectorXd y = c_mat * plant.stacked();
        obs = observer_step(obs, y, l, cfg.outputs, cfg.dt).first;
        plant = propagate(plant, a, nullptr, t, t + cfg.dt, cfg.dt);
        t += cfg.dt;
      }
    }
    VectorXd err(2 * cfg.n);
    err << obs.q - plant.x, obs.w - plant.v;
    observer_monotone &= err.norm() < prev_err;
    prev_err = err.norm();
  }

  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "consensus combo = %.3f, observer combo = %.3f, per-period decay: consensus %s, "
                "observer %s",
                consensus.convex_combination, observer.convex_combination,
                consensus_monotone ? "monotone" : "not monotone",
                observer_monotone ? "monotone" : "not monotone");
  report(7, "matrix-measure certificates with decaying period maps",
         consensus.pass && observer.pass && consensus_monotone && observer_monotone, detail);
}

void criterion_8() {
  std::mt19937 rng(777);

  // Vandermonde determinant against LU.
  bool vandermonde_ok = true;
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 8;
    std::vector<double> values(static_cast<std::size_t>(n));
    for (double& v : values) v = dist(rng);
    MatrixXd h(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) h(r, c) = std::pow(values[static_cast<std::size_t>(c)], r);
    const double lu = h.fullPivLu().determinant();
    const double formula = vandermonde_det(values);
    vandermonde_ok &= std::abs(formula - lu) <=
                      1e-10 * std::max({1.0, std::abs(formula), std::abs(lu)});
  }

  // Spectral reconstruction.
  bool spectral_ok = true;
  for (int trial = 0; trial < 40; ++trial) {
    const Topology t = random_connected(4 + static_cast<int>(rng() % 13), rng, 1);
    const MatrixXd l = laplacian(t);
    const SpectralDecomposition sd = spectral_decompose(l);
    spectral_ok &= (sd.q * sd.eigenvalues.asDiagonal() * sd.q.transpose() - l).norm() <=
                   1e-10 * std::max(1.0, l.norm());
  }

  // Kernel membership versus simulated outputs on switched prefixes.
  bool equivalence_ok = true;
  for (int instance = 0; instance < 5; ++instance) {
    const int n = 3 + static_cast<int>(rng() % 2);
    std::vector<PrefixEntry> prefix;
    for (int k = 0; k < 2; ++k)
      prefix.push_back({system_matrix(laplacian(random_connected(n, rng, k + 1))), 0.8});
    MatrixXd c = MatrixXd::Zero(1, 2 * n);
    c(0, n) = 1.0;  // velocity of agent 1
    const Subspace sub = unobservable_subspace(prefix, c);
    for (int draw = 0; draw < 50; ++draw) {
      VectorXd z0 = random_vector(2 * n, rng);
      if (draw % 2 == 0 && sub.dim() > 0) z0 = sub.basis * (sub.basis.transpose() * z0);
      if (z0.norm() < 1e-9) continue;
      VectorXd z = z0;
      double worst = 0.0;
      for (const auto& entry : prefix) {
        for (int step = 0; step < 80; ++step) {
          worst = std::max(worst, (c * z).cwiseAbs().maxCoeff());
          z = rk4_step([&](double, const VectorXd& y) -> VectorXd { return entry.a * y; }, 0.0,
                       z, 0.01);
        }
      }
      const bool sim_member = worst <= 1e-8 * std::max(1.0, z0.norm());
      equivalence_ok &= (sim_member == sub.contains(z0, 1e-7));
    }
  }

  char detail[160];
  std::snprintf(detail, sizeof(detail), "vandermonde %s, reconstruction %s, kernel oracle %s",
                vandermonde_ok ? "ok" : "bad", spectral_ok ? "ok" : "bad",
                equivalence_ok ? "ok" : "bad");
  report(8, "numerical property suites", vandermonde_ok && spectral_ok && equivalence_ok,
         detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  if (g_failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria failed\n", g_failures);
  return g_failures;
}
