#include "zdalab/switching.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace zdalab {

double SwitchingSchedule::period() const {
  double tau = 0.0;
  for (const auto& e : entries) tau += e.dwell;
  return tau;
}

void SwitchingSchedule::validate() const {
  if (entries.empty()) throw std::invalid_argument("schedule must have at least one entry");
  for (const auto& e : entries) {
    if (!(e.dwell > 0.0)) throw std::invalid_argument("dwell times must be positive");
  }
}

int active_topology(const SwitchingSchedule& schedule, double t) {
  schedule.validate();
  if (t < 0.0) throw std::invalid_argument("active_topology: t must be >= t0");
  const double tau = schedule.period();
  double local = std::fmod(t, tau);
  for (const auto& e : schedule.entries) {
    if (local < e.dwell) return e.topology;
    local -= e.dwell;
  }
  return schedule.entries.back().topology;  // local == tau boundary
}

std::vector<DwellWindow> windows_over(const SwitchingSchedule& schedule, double horizon) {
  schedule.validate();
  std::vector<DwellWindow> out;
  double t = 0.0;
  std::size_t k = 0;
  while (t < horizon - 1e-12) {
    const auto& e = schedule.entries[k % schedule.entries.size()];
    DwellWindow w;
    w.entry_index = k % schedule.entries.size();
    w.topology = e.topology;
    w.start = t;
    w.end = std::min(t + e.dwell, horizon);
    out.push_back(w);
    t += e.dwell;
    ++k;
  }
  return out;
}

double matrix_measure(const MatrixXd& a, const MatrixXd& p) {
  if (a.rows() != a.cols() || p.rows() != p.cols() || a.rows() != p.rows())
    throw std::invalid_argument("matrix_measure: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(p);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("matrix_measure: P must be symmetric positive definite");
  const VectorXd d = es.eigenvalues();
  const MatrixXd v = es.eigenvectors();
  const MatrixXd sqrt_p = v * d.cwiseSqrt().asDiagonal() * v.transpose();
  const MatrixXd isqrt_p = v * d.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  const MatrixXd s = sqrt_p * a * isqrt_p;
  Eigen::SelfAdjointEigenSolver<MatrixXd> sym(MatrixXd(s + s.transpose()));
  return 0.5 * sym.eigenvalues().maxCoeff();
}

MatrixXd reduced_consensus_matrix(const SpectralDecomposition& ref, const MatrixXd& l_s) {
  const Eigen::Index n = ref.q.rows();
  if (l_s.rows() != n || l_s.cols() != n)
    throw std::invalid_argument("reduced_consensus_matrix: dimension mismatch");
  const MatrixXd ups = ref.q.transpose() * l_s * ref.q;
  const Eigen::Index r = n - 1;
  MatrixXd a = MatrixXd::Zero(2 * r, 2 * r);
  a.topRightCorner(r, r) = MatrixXd::Identity(r, r);
  a.bottomLeftCorner(r, r) = -ups.bottomRightCorner(r, r);
  a.bottomRightCorner(r, r) = -MatrixXd::Identity(r, r);
  return a;
}

MatrixXd observer_error_matrix(const MatrixXd& l, const MatrixXd& chat) {
  const Eigen::Index n = l.rows();
  if (chat.rows() != n || chat.cols() != n)
    throw std::invalid_argument("observer_error_matrix: dimension mismatch");
  MatrixXd a = MatrixXd::Zero(2 * n, 2 * n);
  a.topRightCorner(n, n) = MatrixXd::Identity(n, n);
  a.bottomLeftCorner(n, n) = -(l + chat);
  a.bottomRightCorner(n, n) = -MatrixXd::Identity(n, n);
  return a;
}

MatrixXd observer_gain_matrix(const OutputConfig& cfg, int n) {
  MatrixXd chat = MatrixXd::Zero(n, n);
  const bool velocity_mode = cfg.mode() == OutputConfig::Mode::velocity;
  for (Eigen::Index k = 0; k < cfg.m(); ++k) {
    const int i = cfg.monitored[static_cast<std::size_t>(k)];
    chat(i, i) = velocity_mode ? cfg.c2(k) : cfg.c1(k);
  }
  return chat;
}

const Topology& topology_by_id(const std::vector<Topology>& topologies, int id) {
  for (const auto& t : topologies) {
    if (t.id == id) return t;
  }
  throw std::invalid_argument("unknown topology id " + std::to_string(id));
}

namespace {

bool is_hurwitz(const MatrixXd& a) {
  Eigen::EigenSolver<MatrixXd> es(a);
  if (es.info() != Eigen::Success) return false;
  return es.eigenvalues().real().maxCoeff() < 0.0;
}

StabilityCertificate evaluate(const SwitchingSchedule& schedule,
                              const std::vector<MatrixXd>& mats, const MatrixXd& p,
                              int reference) {
  StabilityCertificate cert;
  cert.p = p;
  cert.reference_topology = reference;
  const double tau = schedule.period();
  cert.convex_combination = 0.0;
  for (std::size_t s = 0; s < schedule.entries.size(); ++s) {
    const double nu = schedule.entries[s].dwell / tau;
    const double mu = matrix_measure(mats[s], p);
    cert.weights.push_back(nu);
    cert.measures.push_back(mu);
    cert.convex_combination += nu * mu;
  }
  cert.pass = cert.convex_combination < 0.0;
  return cert;
}

}  // namespace

namespace {

// Default certificate weights: the Lyapunov solution for the reference
// matrix, and the one for the dwell-weighted convex combination. The second
// usually certifies schedules whose members differ too much for a single
// reference-based P.
std::vector<MatrixXd> candidate_weights(const SwitchingSchedule& schedule,
                                        const std::vector<MatrixXd>& mats,
                                        const MatrixXd& reference_mat) {
  std::vector<MatrixXd> out;
  const Eigen::Index dim = reference_mat.rows();
  if (is_hurwitz(reference_mat))
    out.push_back(lyapunov_solve(reference_mat, MatrixXd::Identity(dim, dim)));
  MatrixXd blend = MatrixXd::Zero(dim, dim);
  const double tau = schedule.period();
  for (std::size_t s = 0; s < mats.size(); ++s)
    blend += (schedule.entries[s].dwell / tau) * mats[s];
  if (is_hurwitz(blend)) out.push_back(lyapunov_solve(blend, MatrixXd::Identity(dim, dim)));
  if (out.empty()) out.push_back(MatrixXd::Identity(dim, dim));
  return out;
}

StabilityCertificate best_certificate(const SwitchingSchedule& schedule,
                                      const std::vector<MatrixXd>& mats,
                                      const std::vector<MatrixXd>& weights, int reference) {
  StabilityCertificate best;
  bool first = true;
  for (const MatrixXd& p : weights) {
    if (!is_spd(p)) continue;
    const StabilityCertificate cert = evaluate(schedule, mats, p, reference);
    if (first || (cert.convex_combination < best.convex_combination)) {
      best = cert;
      first = false;
    }
    if (best.pass) break;
  }
  return best;
}

}  // namespace

StabilityCertificate certify_consensus(const SwitchingSchedule& schedule,
                                       const std::vector<Topology>& topologies,
                                       const std::optional<MatrixXd>& p) {
  schedule.validate();
  int connected_id = -1;
  for (const auto& e : schedule.entries) {
    const Topology& t = topology_by_id(topologies, e.topology);
    if (is_connected(laplacian(t))) {
      connected_id = e.topology;
      break;
    }
  }
  if (connected_id < 0)
    throw std::invalid_argument(
        "certify_consensus: the sequence must include one connected topology");

  const SpectralDecomposition ref =
      spectral_decompose(laplacian(topology_by_id(topologies, connected_id)));
  std::vector<MatrixXd> mats;
  mats.reserve(schedule.entries.size());
  for (const auto& e : schedule.entries)
    mats.push_back(
        reduced_consensus_matrix(ref, laplacian(topology_by_id(topologies, e.topology))));

  if (p) return evaluate(schedule, mats, *p, connected_id);
  const MatrixXd a_ref =
      reduced_consensus_matrix(ref, laplacian(topology_by_id(topologies, connected_id)));
  return best_certificate(schedule, mats, candidate_weights(schedule, mats, a_ref),
                          connected_id);
}

StabilityCertificate certify_observer(const SwitchingSchedule& schedule,
                                      const std::vector<Topology>& topologies,
                                      const MatrixXd& chat,
                                      const std::optional<MatrixXd>& p) {
  schedule.validate();
  if (chat.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("certify_observer: gain matrix must be nonzero");
  if (chat.minCoeff() < 0.0)
    throw std::invalid_argument("certify_observer: gain matrix must be nonnegative");

  std::vector<MatrixXd> mats;
  mats.reserve(schedule.entries.size());
  for (const auto& e : schedule.entries)
    mats.push_back(observer_error_matrix(laplacian(topology_by_id(topologies, e.topology)), chat));

  int reference = schedule.entries.front().topology;
  MatrixXd reference_mat = mats.front();
  for (std::size_t s = 0; s < mats.size(); ++s) {
    if (is_hurwitz(mats[s])) {
      reference = schedule.entries[s].topology;
      reference_mat = mats[s];
      break;
    }
  }
  if (p) return evaluate(schedule, mats, *p, reference);
  return best_certificate(schedule, mats, candidate_weights(schedule, mats, reference_mat),
                          reference);
}

}  // namespace zdalab
