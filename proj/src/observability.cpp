#include "zdalab/observability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace zdalab {

bool Subspace::contains(const VectorXd& v, double rtol) const {
  const double nrm = v.norm();
  if (nrm == 0.0) return true;
  if (basis.cols() == 0) return false;
  const VectorXd residual = v - basis * (basis.transpose() * v);
  return residual.norm() <= rtol * nrm;
}

MatrixXd observability_matrix(const MatrixXd& a, const MatrixXd& c) {
  const Eigen::Index dim = a.rows();
  const Eigen::Index m = c.rows();
  if (c.cols() != dim) throw std::invalid_argument("observability_matrix: dimension mismatch");
  MatrixXd o(m * dim, dim);
  MatrixXd block = c;
  for (Eigen::Index k = 0; k < dim; ++k) {
    o.middleRows(k * m, m) = block;
    block = block * a;
  }
  return o;
}

MatrixXd shifted_observability_matrix(const MatrixXd& a, const MatrixXd& c) {
  const Eigen::Index dim = a.rows();
  const Eigen::Index m = c.rows();
  if (c.cols() != dim) throw std::invalid_argument("shifted_observability_matrix: dimension mismatch");
  MatrixXd o(m * dim, dim);
  MatrixXd block = c * a;
  for (Eigen::Index k = 0; k < dim; ++k) {
    o.middleRows(k * m, m) = block;
    block = block * a;
  }
  return o;
}

MatrixXd observability_stack_kernel(const MatrixXd& a, const MatrixXd& c, double rtol) {
  const double a_scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  MatrixXd basis = kernel_basis(c, rtol);
  for (Eigen::Index iter = 0; iter < a.rows() && basis.cols() > 0; ++iter) {
    // Keep x in span(basis) with A x still in span(basis).
    const MatrixXd leak = (a * basis) - basis * (basis.transpose() * (a * basis));
    const MatrixXd keep = kernel_basis(leak, rtol, rtol * a_scale);
    if (keep.cols() == basis.cols()) break;
    basis = orthonormal_columns(basis * keep, 1e-12);
  }
  return basis;
}

MatrixXd shifted_stack_kernel(const MatrixXd& a, const MatrixXd& c, double rtol) {
  const double a_scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const MatrixXd inv = observability_stack_kernel(a, c, rtol);
  MatrixXd leak = a;
  if (inv.cols() > 0) leak -= inv * (inv.transpose() * a);
  return kernel_basis(leak, rtol, rtol * a_scale);
}

Subspace unobservable_subspace(const std::vector<PrefixEntry>& prefix, const MatrixXd& c,
                               double rtol) {
  if (prefix.empty()) throw std::invalid_argument("unobservable_subspace: empty prefix");
  MatrixXd basis = observability_stack_kernel(prefix.back().a, c, rtol);
  for (std::size_t q = prefix.size() - 1; q-- > 0;) {
    const MatrixXd ker_q = observability_stack_kernel(prefix[q].a, c, rtol);
    // Preimage of the later subspace under the dwell-interval flow.
    const MatrixXd mapped =
        orthonormal_columns(expm(MatrixXd(-prefix[q].a * prefix[q].dwell)) * basis, 1e-12);
    basis = subspace_intersect(ker_q, mapped, rtol);
  }
  return Subspace{basis};
}

bool privacy_preserved(const Subspace& n0, const std::vector<int>& monitored, int n) {
  if (n0.dim() == 0) return false;
  std::vector<bool> is_monitored(static_cast<std::size_t>(n), false);
  for (int i : monitored) is_monitored[static_cast<std::size_t>(i)] = true;
  // A generic combination works for every agent iff no agent forces both of
  // its rows to vanish on the whole basis.
  for (int i = 0; i < n; ++i) {
    if (is_monitored[static_cast<std::size_t>(i)]) continue;
    const double mass = n0.basis.row(i).norm() + n0.basis.row(i + n).norm();
    if (mass <= 1e-10) return false;
  }
  return true;
}

DefenseReport defense_check(const std::vector<Topology>& topologies, const OutputConfig& cfg) {
  if (topologies.empty()) throw std::invalid_argument("defense_check: no topologies");
  DefenseReport report;

  struct Decomp {
    int id;
    SpectralDecomposition sd;
    double tol;
  };
  std::vector<Decomp> decomps;
  bool all_distinct = true;
  for (const auto& t : topologies) {
    cfg.validate(t.n);
    const MatrixXd l = laplacian(t);
    SpectralDecomposition sd = spectral_decompose(l);
    const double tol = distinct_eigenvalue_tolerance(sd.eigenvalues(sd.eigenvalues.size() - 1));
    bool distinct = true;
    for (Eigen::Index i = 1; i < sd.eigenvalues.size(); ++i)
      distinct &= (sd.eigenvalues(i) - sd.eigenvalues(i - 1)) > tol;
    report.distinct_eigenvalues_ok[t.id] = distinct;
    all_distinct &= distinct;
    decomps.push_back({t.id, std::move(sd), tol});
  }

  // F = monitored agents whose Q rows are entirely nonzero across all
  // topologies of the sequence.
  for (int i : cfg.monitored) {
    bool all_nonzero = true;
    for (const auto& d : decomps) {
      for (Eigen::Index j = 0; j < d.sd.q.cols(); ++j)
        all_nonzero &= std::abs(d.sd.q(i, j)) > d.tol;
    }
    if (all_nonzero) report.f_set.push_back(i);
  }
  report.f_nonempty = !report.f_set.empty();

  report.c2_positive_ok = true;
  for (Eigen::Index k = 0; k < cfg.m(); ++k) report.c2_positive_ok &= cfg.c2(k) > 0.0;

  report.row_difference_ok = true;
  for (const auto& d : decomps) {
    for (Eigen::Index col = 1; col < d.sd.q.cols(); ++col) {
      for (std::size_t a = 0; a < cfg.monitored.size(); ++a) {
        for (std::size_t b = a + 1; b < cfg.monitored.size(); ++b) {
          const double diff =
              std::abs(d.sd.q(cfg.monitored[a], col) - d.sd.q(cfg.monitored[b], col));
          report.row_difference_ok &= diff > d.tol;
        }
      }
    }
  }

  report.verdict_intermittent = all_distinct && report.f_nonempty;
  report.verdict_cooperative = all_distinct && report.c2_positive_ok && report.row_difference_ok;
  return report;
}

std::string DefenseReport::table() const {
  std::ostringstream os;
  os << "condition                        status\n";
  os << "-------------------------------  ------\n";
  for (const auto& [id, ok] : distinct_eigenvalues_ok) {
    std::ostringstream name;
    name << "distinct eigenvalues (topo " << id << ")";
    os << name.str();
    for (std::size_t i = name.str().size(); i < 33; ++i) os << ' ';
    os << (ok ? "pass" : "fail") << '\n';
  }
  os << "F set nonempty                   " << (f_nonempty ? "pass" : "fail") << "  {";
  for (std::size_t i = 0; i < f_set.size(); ++i) os << (i ? "," : "") << f_set[i] + 1;
  os << "}\n";
  os << "c2 positive                      " << (c2_positive_ok ? "pass" : "fail") << '\n';
  os << "monitored row differences        " << (row_difference_ok ? "pass" : "fail") << '\n';
  os << "verdict: intermittent defense    " << (verdict_intermittent ? "pass" : "fail") << '\n';
  os << "verdict: cooperative defense     " << (verdict_cooperative ? "pass" : "fail") << '\n';
  return os.str();
}

std::map<std::string, std::string> DefenseReport::key_values() const {
  std::map<std::string, std::string> kv;
  bool all = true;
  for (const auto& [id, ok] : distinct_eigenvalues_ok) {
    kv["distinct_eigenvalues." + std::to_string(id)] = ok ? "true" : "false";
    all &= ok;
  }
  kv["distinct_eigenvalues.all"] = all ? "true" : "false";
  std::ostringstream fs;
  for (std::size_t i = 0; i < f_set.size(); ++i) fs << (i ? "," : "") << f_set[i] + 1;
  kv["f_set"] = fs.str();
  kv["f_nonempty"] = f_nonempty ? "true" : "false";
  kv["c2_positive"] = c2_positive_ok ? "true" : "false";
  kv["row_difference"] = row_difference_ok ? "true" : "false";
  kv["verdict.intermittent"] = verdict_intermittent ? "true" : "false";
  kv["verdict.cooperative"] = verdict_cooperative ? "true" : "false";
  return kv;
}

}  // namespace zdalab
