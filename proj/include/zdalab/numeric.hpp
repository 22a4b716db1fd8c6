#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace zdalab {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Complex = std::complex<double>;

// Orthonormal basis of ker(M). Rank decisions use rtol relative to the
// largest singular value, with atol as an absolute floor so that numerically
// zero matrices resolve to a full kernel. Columns are orthonormal; the count
// may be 0.
MatrixXd kernel_basis(const MatrixXd& m, double rtol = 1e-9, double atol = 0.0);
MatrixXcd kernel_basis(const MatrixXcd& m, double rtol = 1e-9, double atol = 0.0);

// Orthonormalize the columns of b (thin), dropping near-dependent ones.
MatrixXd orthonormal_columns(const MatrixXd& b, double rtol = 1e-12);

// Intersection of two subspaces given by orthonormal bases, via the null
// space of the stacked orthogonal-complement projectors.
MatrixXd subspace_intersect(const MatrixXd& b1, const MatrixXd& b2, double rtol = 1e-9);

// Spectral norm of the projector gap ||P1 - P2||_2.
double subspace_distance(const MatrixXd& b1, const MatrixXd& b2);

// Matrix exponentials (dense, Pade via Eigen).
MatrixXd expm(const MatrixXd& a);
MatrixXcd expm(const MatrixXcd& a);

// Solves A^T P + P A = -Q for symmetric P via the Kronecker linear system.
MatrixXd lyapunov_solve(const MatrixXd& a, const MatrixXd& q);

bool is_spd(const MatrixXd& p, double tol = 0.0);

// Phase-normalize a complex vector: unit norm, first entry with modulus above
// tol rotated to the positive real axis.
VectorXcd phase_normalize(const VectorXcd& v, double tol = 1e-12);

}  // namespace zdalab
