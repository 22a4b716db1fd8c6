#include "zdalab/numeric.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <stdexcept>

namespace zdalab {

namespace {

template <typename Mat>
Mat kernel_basis_impl(const Mat& m, double rtol, double atol) {
  if (m.rows() == 0) {
    // No constraints: kernel is the whole space.
    return Mat::Identity(m.cols(), m.cols());
  }
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = std::max(rtol * (sv.size() > 0 ? sv(0) : 0.0), atol);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  const Eigen::Index k = m.cols() - rank;
  Mat basis(m.cols(), k);
  basis = svd.matrixV().rightCols(k);
  return basis;
}

}  // namespace

MatrixXd kernel_basis(const MatrixXd& m, double rtol, double atol) {
  return kernel_basis_impl(m, rtol, atol);
}
MatrixXcd kernel_basis(const MatrixXcd& m, double rtol, double atol) {
  return kernel_basis_impl(m, rtol, atol);
}

MatrixXd orthonormal_columns(const MatrixXd& b, double rtol) {
  if (b.cols() == 0) return b;
  MatrixXd out(b.rows(), b.cols());
  const double scale = b.colwise().norm().maxCoeff();
  Eigen::Index kept = 0;
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    VectorXd v = b.col(j);
    for (Eigen::Index i = 0; i < kept; ++i) v -= out.col(i).dot(v) * out.col(i);
    // second pass for numerical orthogonality
    for (Eigen::Index i = 0; i < kept; ++i) v -= out.col(i).dot(v) * out.col(i);
    const double nrm = v.norm();
    if (nrm > rtol * std::max(1.0, scale)) out.col(kept++) = v / nrm;
  }
  return out.leftCols(kept);
}

MatrixXd subspace_intersect(const MatrixXd& b1, const MatrixXd& b2, double rtol) {
  const Eigen::Index n = b1.rows();
  if (b2.rows() != n) throw std::invalid_argument("subspace_intersect: dimension mismatch");
  if (b1.cols() == 0 || b2.cols() == 0) return MatrixXd(n, 0);
  MatrixXd stacked(2 * n, n);
  stacked.topRows(n) = MatrixXd::Identity(n, n) - b1 * b1.transpose();
  stacked.bottomRows(n) = MatrixXd::Identity(n, n) - b2 * b2.transpose();
  return kernel_basis(stacked, rtol, rtol);  // projectors have unit scale
}

double subspace_distance(const MatrixXd& b1, const MatrixXd& b2) {
  const Eigen::Index n = std::max(b1.rows(), b2.rows());
  MatrixXd p1 = MatrixXd::Zero(n, n);
  MatrixXd p2 = MatrixXd::Zero(n, n);
  if (b1.cols() > 0) p1 = b1 * b1.transpose();
  if (b2.cols() > 0) p2 = b2 * b2.transpose();
  Eigen::JacobiSVD<MatrixXd> svd(p1 - p2);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

MatrixXd expm(const MatrixXd& a) { return a.exp(); }
MatrixXcd expm(const MatrixXcd& a) { return a.exp(); }

MatrixXd lyapunov_solve(const MatrixXd& a, const MatrixXd& q) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n)
    throw std::invalid_argument("lyapunov_solve: square matrices required");
  // vec(A^T P) = (I kron A^T) vec(P), vec(P A) = (A^T kron I) vec(P)
  MatrixXd big = MatrixXd::Zero(n * n, n * n);
  const MatrixXd at = a.transpose();
  for (Eigen::Index c = 0; c < n; ++c)
    big.block(c * n, c * n, n, n) += at;
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r)
      big.block(r * n, c * n, n, n).diagonal().array() += at(r, c);
  VectorXd rhs = -Eigen::Map<const VectorXd>(q.data(), n * n);
  VectorXd vec_p = big.fullPivLu().solve(rhs);
  MatrixXd p = Eigen::Map<MatrixXd>(vec_p.data(), n, n);
  return 0.5 * (p + p.transpose());
}

bool is_spd(const MatrixXd& p, double tol) {
  if (p.rows() != p.cols()) return false;
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, p.cwiseAbs().maxCoeff()))
    return false;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(p);
  if (es.info() != Eigen::Success) return false;
  return es.eigenvalues().minCoeff() > tol;
}

VectorXcd phase_normalize(const VectorXcd& v, double tol) {
  const double nrm = v.norm();
  if (nrm == 0.0) return v;
  VectorXcd out = v / nrm;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double mag = std::abs(out(i));
    if (mag > tol) {
      out *= std::conj(out(i)) / mag;
      break;
    }
  }
  return out;
}

}  // namespace zdalab
