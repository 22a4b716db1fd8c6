#pragma once

#include "zdalab/dynamics.hpp"

#include <optional>
#include <vector>

namespace zdalab {

struct ScheduleEntry {
  int topology = 0;
  double dwell = 0.0;
};

// Periodic switching plan; sigma(t) = sigma(t + period), t0 = 0.
struct SwitchingSchedule {
  std::vector<ScheduleEntry> entries;

  double period() const;
  void validate() const;
};

int active_topology(const SwitchingSchedule& schedule, double t);

struct DwellWindow {
  std::size_t entry_index = 0;
  int topology = 0;
  double start = 0.0;
  double end = 0.0;
};

// Consecutive dwell windows covering [0, horizon).
std::vector<DwellWindow> windows_over(const SwitchingSchedule& schedule, double horizon);

// Convex-combination matrix-measure certificate over one period.
struct StabilityCertificate {
  MatrixXd p;
  std::vector<double> measures;  // mu_P per schedule entry
  std::vector<double> weights;   // dwell fractions nu_s
  double convex_combination = 0.0;
  bool pass = false;
  int reference_topology = 0;
};

// Induced P-norm matrix measure (log norm); throws on non-SPD P.
double matrix_measure(const MatrixXd& a, const MatrixXd& p);

// A_s built from the reference decomposition: Upsilon_rs = Qr^T L_s Qr,
// then [[0, I], [-Upsilon[2:,2:], -I]] of size 2(n-1).
MatrixXd reduced_consensus_matrix(const SpectralDecomposition& ref, const MatrixXd& l_s);

// [[0, I], [-L - Chat, -I]]
MatrixXd observer_error_matrix(const MatrixXd& l, const MatrixXd& chat);

// Diagonal observer gain built from the output coefficients (velocity mode
// uses c2, otherwise c1).
MatrixXd observer_gain_matrix(const OutputConfig& cfg, int n);

const Topology& topology_by_id(const std::vector<Topology>& topologies, int id);

// Consensus certificate; requires one connected topology in the sequence.
// When p is absent, the Lyapunov solution for the connected topology's
// reduced matrix (right-hand side -I) is used.
StabilityCertificate certify_consensus(const SwitchingSchedule& schedule,
                                       const std::vector<Topology>& topologies,
                                       const std::optional<MatrixXd>& p = std::nullopt);

// Observer certificate with the error matrices of the gain-injected system.
StabilityCertificate certify_observer(const SwitchingSchedule& schedule,
                                      const std::vector<Topology>& topologies,
                                      const MatrixXd& chat,
                                      const std::optional<MatrixXd>& p = std::nullopt);

}  // namespace zdalab
