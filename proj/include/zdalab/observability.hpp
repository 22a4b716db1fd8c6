#pragma once

#include "zdalab/switching.hpp"

#include <map>
#include <string>
#include <vector>

namespace zdalab {

struct Subspace {
  MatrixXd basis;  // orthonormal columns; 0 columns encodes {0}

  Eigen::Index dim() const { return basis.cols(); }
  bool contains(const VectorXd& v, double rtol = 1e-8) const;
};

// Rows [C; CA; ...; CA^{2n-1}].
MatrixXd observability_matrix(const MatrixXd& a, const MatrixXd& c);

// Rows [CA; CA^2; ...; CA^{2n}] (used when the output attack keeps the
// residual constant rather than zero).
MatrixXd shifted_observability_matrix(const MatrixXd& a, const MatrixXd& c);

// Orthonormal basis of ker(observability_matrix(a, c)), computed as the
// largest a-invariant subspace inside ker(c). Identical by Cayley-Hamilton,
// but stays well conditioned where the stacked powers overflow.
MatrixXd observability_stack_kernel(const MatrixXd& a, const MatrixXd& c, double rtol = 1e-9);

// Orthonormal basis of ker(shifted_observability_matrix(a, c)): the preimage
// under a of the unobservable subspace.
MatrixXd shifted_stack_kernel(const MatrixXd& a, const MatrixXd& c, double rtol = 1e-9);

struct PrefixEntry {
  MatrixXd a;
  double dwell = 0.0;
};

// Backward recursion N_m = ker(O_m), N_q = ker(O_q) /\ e^{-A_q tau_q} N_{q+1}.
Subspace unobservable_subspace(const std::vector<PrefixEntry>& prefix, const MatrixXd& c,
                               double rtol = 1e-9);

// True iff some vector of the subspace has a nonzero position or velocity
// entry for every non-monitored agent.
bool privacy_preserved(const Subspace& n0, const std::vector<int>& monitored, int n);

struct DefenseReport {
  std::map<int, bool> distinct_eigenvalues_ok;  // per topology id
  std::vector<int> f_set;                       // monitored agents with fully nonzero Q rows
  bool f_nonempty = false;
  bool c2_positive_ok = false;
  bool row_difference_ok = false;
  bool verdict_intermittent = false;
  bool verdict_cooperative = false;

  std::string table() const;
  std::map<std::string, std::string> key_values() const;
};

DefenseReport defense_check(const std::vector<Topology>& topologies, const OutputConfig& cfg);

}  // namespace zdalab
