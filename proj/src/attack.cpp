#include "zdalab/attack.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace zdalab {

namespace {

constexpr double kTrivialTol = 1e-7;

MatrixXd input_selector(int n, const std::vector<int>& k_set) {
  MatrixXd b = MatrixXd::Zero(2 * n, static_cast<Eigen::Index>(k_set.size()));
  for (std::size_t i = 0; i < k_set.size(); ++i) b(n + k_set[i], static_cast<Eigen::Index>(i)) = 1.0;
  return b;
}

void check_k_set(const std::vector<int>& k_set, int n) {
  if (k_set.empty()) throw std::invalid_argument("misbehaving set must be nonempty");
  for (std::size_t i = 0; i < k_set.size(); ++i) {
    if (k_set[i] < 0 || k_set[i] >= n) throw std::invalid_argument("misbehaving index out of range");
    if (i > 0 && k_set[i] <= k_set[i - 1])
      throw std::invalid_argument("misbehaving set must be strictly increasing");
  }
}

std::vector<Complex> pencil_eta_candidates(const MatrixXd& e_t, const MatrixXd& f_t,
                                           const std::vector<Complex>& eta_grid) {
  std::vector<Complex> candidates{Complex(0.0, 0.0)};
  candidates.insert(candidates.end(), eta_grid.begin(), eta_grid.end());

  const Eigen::Index rows = e_t.rows();
  const Eigen::Index cols = e_t.cols();
  const Eigen::Index r = std::min(rows, cols);
  if (r > 0) {
    std::mt19937 rng(0x5eed2024u);
    std::normal_distribution<double> dist(0.0, 1.0);
    MatrixXd es = e_t, fs = f_t;
    if (rows > cols) {
      MatrixXd w(cols, rows);
      for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = dist(rng);
      es = w * e_t;
      fs = w * f_t;
    } else if (cols > rows) {
      MatrixXd v(cols, rows);
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
      es = e_t * v;
      fs = f_t * v;
    }
    Eigen::GeneralizedEigenSolver<MatrixXd> ges;
    ges.compute(fs, es, false);
    if (ges.info() == Eigen::Success) {
      for (Eigen::Index i = 0; i < ges.alphas().size(); ++i) {
        const Complex alpha = ges.alphas()(i);
        const double beta = ges.betas()(i);
        if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()) || !std::isfinite(beta))
          continue;
        if (std::abs(beta) <= 1e-10 * std::max(1.0, std::abs(alpha))) continue;
        const Complex eta = alpha / beta;
        if (std::abs(eta) > 1e6) continue;
        candidates.push_back(eta);
      }
    }
  }

  std::sort(candidates.begin(), candidates.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  std::vector<Complex> unique;
  for (const Complex& c : candidates) {
    const double tol = 1e-8 * (1.0 + std::abs(c));
    if (unique.empty() || std::abs(unique.back() - c) > tol) unique.push_back(c);
  }
  return unique;
}

}  // namespace

std::vector<ZdaCandidate> synthesize_zda(const MatrixXd& a, const MatrixXd& c,
                                         const MatrixXd& d, const std::vector<int>& k_set,
                                         const std::vector<Complex>& eta_grid, double rtol,
                                         StealthScope scope) {
  const Eigen::Index dim = a.rows();
  const int n = static_cast<int>(dim / 2);
  const Eigen::Index m = c.rows();
  if (a.cols() != dim || c.cols() != dim || d.rows() != m || d.cols() != dim)
    throw std::invalid_argument("synthesize_zda: dimension mismatch");
  check_k_set(k_set, n);

  // For pause-capable attacks the false data must stay invisible through
  // input-free intervals: restrict z0 to the kernel of the observability
  // stack (its shifted variant when the output channel carries a direct
  // attack term).
  MatrixXd z;
  if (scope == StealthScope::through_pauses) {
    const bool direct_term = d.cwiseAbs().maxCoeff() > 0.0;
    z = direct_term ? shifted_stack_kernel(a, c, rtol) : observability_stack_kernel(a, c, rtol);
  } else {
    z = MatrixXd::Identity(dim, dim);
  }
  const Eigen::Index k = z.cols();
  std::vector<ZdaCandidate> out;
  if (k == 0) return out;

  const MatrixXd b_k = input_selector(n, k_set);
  MatrixXd d_k(m, static_cast<Eigen::Index>(k_set.size()));
  for (std::size_t i = 0; i < k_set.size(); ++i)
    d_k.col(static_cast<Eigen::Index>(i)) = d.col(n + k_set[i]);

  // Reduced pencil T(eta) = eta*E - F acting on [coef; g_K].
  const Eigen::Index tc = k + static_cast<Eigen::Index>(k_set.size());
  MatrixXd e_t = MatrixXd::Zero(dim + m, tc);
  e_t.topLeftCorner(dim, k) = z;
  MatrixXd f_t(dim + m, tc);
  f_t.topLeftCorner(dim, k) = a * z;
  f_t.topRightCorner(dim, k_set.size()) = b_k;
  f_t.bottomLeftCorner(m, k) = -c * z;
  f_t.bottomRightCorner(m, k_set.size()) = -d_k;

  const std::vector<Complex> candidates = pencil_eta_candidates(e_t, f_t, eta_grid);

  const MatrixXcd zc = z.cast<Complex>();
  const MatrixXcd ac = a.cast<Complex>();
  for (const Complex& eta : candidates) {
    MatrixXcd t(dim + m, tc);
    t.topLeftCorner(dim, k) = eta * zc - ac * zc;
    t.topRightCorner(dim, k_set.size()) = -b_k.cast<Complex>();
    t.bottomLeftCorner(m, k) = c.cast<Complex>() * zc;
    t.bottomRightCorner(m, k_set.size()) = d_k.cast<Complex>();

    const MatrixXcd ker = kernel_basis(t, rtol);
    for (Eigen::Index col = 0; col < ker.cols(); ++col) {
      VectorXcd z0 = zc * ker.col(col).head(k);
      VectorXcd g = VectorXcd::Zero(dim);
      for (std::size_t i = 0; i < k_set.size(); ++i)
        g(n + k_set[i]) = ker.col(col)(k + static_cast<Eigen::Index>(i));

      VectorXcd stacked(2 * dim);
      stacked << z0, g;
      stacked = phase_normalize(stacked);
      z0 = stacked.head(dim);
      g = stacked.tail(dim);
      if (z0.norm() < kTrivialTol || g.norm() < kTrivialTol) continue;

      const double residual = ((eta * z0 - a.cast<Complex>() * z0) - g).norm() +
                              (c.cast<Complex>() * z0 + d.cast<Complex>() * g).norm();
      if (residual > 1e-9 * (z0.norm() + g.norm())) continue;

      bool duplicate = false;
      for (const auto& prev : out) {
        if (std::abs(prev.eta - eta) <= 1e-7 * (1.0 + std::abs(eta))) {
          VectorXcd pstack(2 * dim);
          pstack << prev.z0, prev.g;
          if ((pstack - stacked).norm() <= 1e-6) {
            duplicate = true;
            break;
          }
        }
      }
      if (!duplicate) out.push_back({eta, z0, g});
    }
  }
  return out;
}

std::vector<ZdaCandidate> synthesize_zda(const Topology& topology, const OutputConfig& cfg,
                                         const std::vector<int>& k_set,
                                         const std::vector<Complex>& eta_grid, double rtol,
                                         StealthScope scope) {
  const auto [c, d] = output_matrices(cfg, topology.n);
  return synthesize_zda(system_matrix(laplacian(topology)), c, d, k_set, eta_grid, rtol, scope);
}

void ZdaPlan::validate(int n, const OutputConfig& cfg) const {
  if (z0.size() != 2 * n) throw std::invalid_argument("plan z0 must have length 2n");
  check_k_set(k_set, n);
  if (d.size() != 0 && d.size() != cfg.m())
    throw std::invalid_argument("plan d must have one entry per monitored agent");
  double prev_end = 0.0;
  for (const auto& w : windows) {
    if (!(w.resume <= w.pause)) throw std::invalid_argument("window resume must precede pause");
    if (w.resume < prev_end - 1e-12) throw std::invalid_argument("windows must not overlap");
    prev_end = w.pause;
    if (w.g.size() != 2 * n) throw std::invalid_argument("window amplitude must have length 2n");
    if (w.g.head(n).norm() > 1e-9 * std::max(1.0, w.g.norm()))
      throw std::invalid_argument("attack amplitude must have a zero position block");
    for (int i = 0; i < n; ++i) {
      if (std::abs(w.g(n + i)) > 1e-9 * std::max(1.0, w.g.norm()) &&
          !std::binary_search(k_set.begin(), k_set.end(), i))
        throw std::invalid_argument("attack support must stay within the misbehaving set");
    }
  }
}

std::vector<int> ZdaPlan::attacked_topologies() const {
  std::set<int> ids;
  for (const auto& w : windows) ids.insert(w.topology);
  return {ids.begin(), ids.end()};
}

std::map<int, Complex> ZdaPlan::eta_by_topology() const {
  std::map<int, Complex> out;
  for (const auto& w : windows) out.emplace(w.topology, w.eta);
  return out;
}

std::vector<AttackSegment> attack_segments(const ZdaPlan& plan, double horizon, int n) {
  std::vector<ZdaWindow> windows = plan.windows;
  std::sort(windows.begin(), windows.end(),
            [](const ZdaWindow& a, const ZdaWindow& b) { return a.resume < b.resume; });
  std::vector<AttackSegment> segs;
  VectorXd held = VectorXd::Zero(2 * n);
  double cursor = 0.0;
  for (const auto& w : windows) {
    if (cursor >= horizon) break;
    if (w.resume >= horizon) break;
    if (w.resume > cursor + 1e-12) {
      AttackSegment gap;
      gap.start = cursor;
      gap.end = std::min(w.resume, horizon);
      gap.active = false;
      gap.held = held;
      segs.push_back(gap);
    }
    AttackSegment act;
    act.start = std::max(cursor, w.resume);
    act.end = std::min(w.pause, horizon);
    act.active = true;
    act.eta = w.eta;
    act.g = w.g;
    act.dev = w.dev;
    act.resume_time = w.resume;
    if (act.end > act.start) segs.push_back(act);
    if (w.pause <= horizon) {
      const Complex phase = std::exp(w.eta * (w.pause - w.resume));
      held += (w.g * phase).real();
    }
    cursor = w.pause;
  }
  if (cursor < horizon) {
    AttackSegment gap;
    gap.start = cursor;
    gap.end = horizon;
    gap.active = false;
    gap.held = held;
    segs.push_back(gap);
  }
  return segs;
}

std::pair<VectorXd, VectorXd> attack_signal(const ZdaPlan& plan, const OutputConfig& cfg,
                                            double t, int n) {
  VectorXd input = VectorXd::Zero(n);
  VectorXd output = VectorXd::Zero(cfg.m());
  VectorXd signal = VectorXd::Zero(2 * n);  // full injected vector at time t
  bool active = false;
  VectorXd held = VectorXd::Zero(2 * n);
  for (const auto& w : plan.windows) {
    if (t >= w.resume && t < w.pause) {
      const Complex phase = std::exp(w.eta * (t - w.resume));
      signal = (w.g * phase).real();
      active = true;
      break;
    }
    if (w.pause <= t) {
      const Complex phase = std::exp(w.eta * (w.pause - w.resume));
      held += (w.g * phase).real();
    }
  }
  if (!active) signal = held;
  // Input injection stops during pauses; the attacker only keeps feeding the
  // held values into the monitored outputs to avoid a jump.
  if (active) input = signal.tail(n);
  const VectorXd& dcoef = plan.d;
  for (Eigen::Index k = 0; k < cfg.m(); ++k) {
    const double dk = (dcoef.size() == cfg.m()) ? dcoef(k) : 0.0;
    output(k) = dk * signal(n + cfg.monitored[static_cast<std::size_t>(k)]);
  }
  return {input, output};
}

namespace {

// Fit a complex scale c with Re(c * mode) ~= target; returns (c, residual).
std::pair<Complex, double> fit_amplitude(const VectorXcd& mode, const VectorXd& target) {
  const VectorXd re = mode.real();
  const VectorXd im = mode.imag();
  const bool complex_mode = im.norm() > 1e-12 * std::max(1.0, re.norm());
  MatrixXd basis(mode.size(), complex_mode ? 2 : 1);
  basis.col(0) = re;
  if (complex_mode) basis.col(1) = -im;
  const VectorXd coef = basis.colPivHouseholderQr().solve(target);
  const double residual = (basis * coef - target).norm();
  Complex c(coef(0), complex_mode ? coef(1) : 0.0);
  return {c, residual};
}

}  // namespace

ZdaPlan plan_intermittent(const std::map<int, std::vector<ZdaCandidate>>& per_topology,
                          const std::vector<Topology>& topologies,
                          const SwitchingSchedule& schedule, double inference_delay,
                          double horizon, const IntermittentOptions& opts) {
  if (inference_delay < 0.0) throw std::invalid_argument("inference delay must be >= 0");
  const auto windows = windows_over(schedule, horizon);
  if (windows.empty()) throw std::invalid_argument("empty horizon");

  ZdaPlan plan;
  const int first_topology = windows.front().topology;
  const auto it0 = per_topology.find(first_topology);
  if (it0 == per_topology.end() || it0->second.empty()) return plan;  // nothing to start from

  const ZdaCandidate* initial = &it0->second.front();
  if (opts.preferred_eta) {
    for (const auto& cand : it0->second) {
      if (std::abs(cand.eta - *opts.preferred_eta) <= 1e-6 * (1.0 + std::abs(cand.eta))) {
        initial = &cand;
        break;
      }
    }
  }
  plan.z0 = opts.initial_scale * initial->z0;

  const int n = static_cast<int>(plan.z0.size() / 2);
  std::set<int> support;
  for (const auto& [id, list] : per_topology) {
    for (const auto& cand : list)
      for (int i = 0; i < n; ++i)
        if (std::abs(cand.g(n + i)) > 1e-9) support.insert(i);
  }
  plan.k_set = {support.begin(), support.end()};

  const double period = schedule.period();
  VectorXd dev = plan.z0.real();
  for (const auto& w : windows) {
    const MatrixXd a = system_matrix(laplacian(topology_by_id(topologies, w.topology)));
    const bool known = (w.start >= period - 1e-12) ||
                       (w.start == windows.front().start && opts.knows_initial_topology);
    const double resume = known ? w.start : w.start + inference_delay;
    if (resume >= w.end - 1e-12) {
      dev = expm(MatrixXd(a * (w.end - w.start))) * dev;  // paused all window
      continue;
    }
    dev = expm(MatrixXd(a * (resume - w.start))) * dev;

    const auto it = per_topology.find(w.topology);
    bool placed = false;
    if (it != per_topology.end() && dev.norm() > 0.0) {
      // Try the attacker's designed mode first, then the remaining ones.
      std::vector<const ZdaCandidate*> order;
      for (const auto& cand : it->second) {
        if (opts.preferred_eta &&
            std::abs(cand.eta - *opts.preferred_eta) <= 1e-6 * (1.0 + std::abs(cand.eta)))
          order.insert(order.begin(), &cand);
        else
          order.push_back(&cand);
      }
      for (const ZdaCandidate* cand_ptr : order) {
        const auto& cand = *cand_ptr;
        const auto [c, residual] = fit_amplitude(cand.z0, dev);
        if (residual <= opts.fit_tol * std::max(dev.norm(), 1e-12) && std::abs(c) > 1e-12) {
          ZdaWindow zw;
          zw.resume = resume;
          zw.pause = w.end;
          zw.topology = w.topology;
          zw.eta = cand.eta;
          zw.g = c * cand.g;
          zw.dev = c * cand.z0;
          plan.windows.push_back(zw);
          dev = (zw.dev * std::exp(zw.eta * (w.end - resume))).real();
          placed = true;
          break;
        }
      }
    }
    if (!placed) dev = expm(MatrixXd(a * (w.end - resume))) * dev;
  }
  return plan;
}

ZdaPlan make_non_pausing_plan(const ZdaCandidate& candidate, int topology, double resume,
                              double horizon, const std::vector<int>& k_set, const VectorXd& d,
                              Complex scale) {
  ZdaPlan plan;
  plan.z0 = scale * candidate.z0;
  plan.k_set = k_set;
  plan.d = d;
  ZdaWindow w;
  w.resume = resume;
  w.pause = horizon;
  w.topology = topology;
  w.eta = candidate.eta;
  w.g = scale * candidate.g;
  w.dev = scale * candidate.z0;
  plan.windows.push_back(w);
  return plan;
}

StealthReport verify_stealthy(const ZdaPlan& plan, const std::vector<Topology>& topologies,
                              const SwitchingSchedule& schedule, const OutputConfig& cfg,
                              const StackedState& init, double horizon, double dt, double tol,
                              const std::optional<TopologyAttack>& topo_attack,
                              int topo_attack_from_window) {
  const int n = static_cast<int>(init.n());
  auto [c, d] = output_matrices(cfg, n);
  if (plan.d.size() == cfg.m()) {
    // The attacker's own output coefficients take precedence.
    d.setZero();
    for (Eigen::Index k = 0; k < cfg.m(); ++k)
      d(k, n + cfg.monitored[static_cast<std::size_t>(k)]) = plan.d(k);
  }

  const auto segs = attack_segments(plan, horizon, n);
  const auto wins = windows_over(schedule, horizon);

  VectorXd z_clean = init.stacked();
  VectorXd z_attacked = init.stacked() + plan.z0.real();

  StealthReport report;
  const auto segment_at = [&](double t) -> const AttackSegment& {
    for (const auto& s : segs)
      if (t >= s.start - 1e-12 && t < s.end - 1e-12) return s;
    return segs.back();
  };

  const auto sample = [&](double t) {
    const AttackSegment& s = segment_at(t);
    const VectorXd signal = s.active
                                ? VectorXd((s.g * std::exp(s.eta * (t - s.resume_time))).real())
                                : s.held;
    const VectorXd y_att = c * z_attacked + d * signal;
    const VectorXd y_clean = c * z_clean;
    report.max_output_gap =
        std::max(report.max_output_gap, (y_att - y_clean).cwiseAbs().maxCoeff());
    if (s.active && s.dev.size() == 2 * n) {
      const VectorXd predicted = (s.dev * std::exp(s.eta * (t - s.resume_time))).real();
      const double err = ((z_attacked - z_clean) - predicted).norm();
      report.max_deviation_error =
          std::max(report.max_deviation_error, err / std::max(1.0, predicted.norm()));
    }
  };

  for (std::size_t wi = 0; wi < wins.size(); ++wi) {
    const auto& w = wins[wi];
    Topology plant = topology_by_id(topologies, w.topology);
    if (topo_attack && static_cast<int>(wi) >= topo_attack_from_window)
      plant = apply_topology_attack(plant, *topo_attack);
    const MatrixXd a_att = system_matrix(laplacian(plant));
    const MatrixXd a_clean =
        system_matrix(laplacian(topology_by_id(topologies, w.topology)));

    std::vector<double> cuts{w.start, w.end};
    for (const auto& s : segs) {
      if (s.start > w.start && s.start < w.end) cuts.push_back(s.start);
      if (s.end > w.start && s.end < w.end) cuts.push_back(s.end);
    }
    std::sort(cuts.begin(), cuts.end());

    for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
      const double t1 = cuts[piece + 1];
      const AttackSegment& s = segment_at(0.5 * (cuts[piece] + t1));
      const auto rhs_clean = [&](double, const VectorXd& y) -> VectorXd { return a_clean * y; };
      const auto rhs_attacked = [&](double t, const VectorXd& y) -> VectorXd {
        VectorXd dy = a_att * y;
        if (s.active) dy += (s.g * std::exp(s.eta * (t - s.resume_time))).real();
        return dy;
      };

      const double piece_start = cuts[piece];
      const long full_steps = std::lround(std::floor((t1 - piece_start) / dt + 1e-9));
      const double tail = t1 - piece_start - full_steps * dt;
      const long piece_steps = full_steps + (tail > 1e-9 ? 1 : 0);
      for (long k = 0; k < piece_steps; ++k) {
        const double t = piece_start + k * dt;
        const double h = std::min(dt, t1 - t);
        sample(t);
        z_clean = rk4_step(rhs_clean, t, z_clean, h);
        z_attacked = rk4_step(rhs_attacked, t, z_attacked, h);
        if (!z_attacked.allFinite()) throw DivergenceError(t + h);
      }
    }
  }
  sample(horizon - 1e-9);

  report.stealthy = report.max_output_gap <= tol;
  return report;
}

void TopologyAttack::validate(const std::vector<int>& monitored, int n) const {
  if (d_set.empty()) throw std::invalid_argument("topology attack: empty target scope");
  for (std::size_t i = 0; i < d_set.size(); ++i) {
    if (d_set[i] < 0 || d_set[i] >= n)
      throw std::invalid_argument("topology attack: agent index out of range");
    if (i > 0 && d_set[i] <= d_set[i - 1])
      throw std::invalid_argument("topology attack: scope must be strictly increasing");
    if (!std::binary_search(monitored.begin(), monitored.end(), d_set[i]))
      throw std::invalid_argument("topology attack: target scope must stay within the monitored set");
  }
  for (const auto& [i, j, w] : target_edges) {
    (void)w;
    if (i == j) throw std::invalid_argument("topology attack: self-loop edit");
    if (!std::binary_search(d_set.begin(), d_set.end(), i) ||
        !std::binary_search(d_set.begin(), d_set.end(), j))
      throw std::invalid_argument("topology attack: edited edge leaves the target scope");
  }
}

Topology apply_topology_attack(const Topology& topology, const TopologyAttack& atk) {
  Topology out = topology;
  for (const auto& [i, j, w] : atk.target_edges) {
    if (i < 0 || i >= topology.n || j < 0 || j >= topology.n || i == j)
      throw std::invalid_argument("apply_topology_attack: bad edge");
    if (w < 0.0) throw std::invalid_argument("apply_topology_attack: negative weight");
    out.adjacency(i, j) = w;
    out.adjacency(j, i) = w;
  }
  return out;
}

namespace {

bool cooperative_feasible_impl(const Topology& topology, const TopologyAttack& atk,
                               const OutputConfig& cfg, const MatrixXd& x_cols,
                               const MatrixXd& v_cols, int depth, double tol) {
  if (depth < 1) throw std::invalid_argument("cooperative_feasible: depth must be >= 1");
  atk.validate(cfg.monitored, topology.n);
  const int n = topology.n;
  const MatrixXd l = laplacian(topology);
  const MatrixXd lhat = laplacian(apply_topology_attack(topology, atk));
  const MatrixXd diff = lhat - l;

  MatrixXd c2 = MatrixXd::Zero(cfg.m(), n);
  for (Eigen::Index k = 0; k < cfg.m(); ++k)
    c2(k, cfg.monitored[static_cast<std::size_t>(k)]) = cfg.c2(k);

  const double scale =
      std::max(1.0, diff.cwiseAbs().maxCoeff() *
                        std::max(x_cols.cwiseAbs().maxCoeff(), v_cols.cwiseAbs().maxCoeff()));
  MatrixXd xp = x_cols;
  MatrixXd vp = v_cols;
  for (int p = 0; p <= depth; ++p) {
    if ((c2 * diff * xp).cwiseAbs().maxCoeff() > tol * scale) return false;
    if ((c2 * diff * vp).cwiseAbs().maxCoeff() > tol * scale) return false;
    xp = l * xp;
    vp = l * vp;
  }
  return true;
}

}  // namespace

bool cooperative_feasible(const Topology& topology, const TopologyAttack& atk,
                          const OutputConfig& cfg, const StackedState& at_switch, int depth,
                          double tol) {
  return cooperative_feasible_impl(topology, atk, cfg, at_switch.x, at_switch.v, depth, tol);
}

bool cooperative_feasible(const Topology& topology, const TopologyAttack& atk,
                          const OutputConfig& cfg, const MatrixXd& state_basis, int depth,
                          double tol) {
  const int n = topology.n;
  if (state_basis.rows() != 2 * n)
    throw std::invalid_argument("cooperative_feasible: basis must stack positions and velocities");
  return cooperative_feasible_impl(topology, atk, cfg, state_basis.topRows(n),
                                   state_basis.bottomRows(n), depth, tol);
}

}  // namespace zdalab
