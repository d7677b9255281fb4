#include "qest/operators.hpp"

#include <algorithm>
#include <sstream>

namespace qest {

const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

double hermiticity_defect(const Matrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& a, double tol_scale) {
  const double scale = 1.0 + a.cwiseAbs().maxCoeff();
  return hermiticity_defect(a) <= tol_scale * scale;
}

HermitianOperator::HermitianOperator(Matrix m, const Tolerances& tol) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() == 0) {
    throw NonHermitianInput("HermitianOperator: matrix must be square and nonempty");
  }
  if (!is_hermitian(mat_, tol.hermiticity)) {
    std::ostringstream os;
    os << "HermitianOperator: Hermiticity defect " << hermiticity_defect(mat_)
       << " exceeds tolerance";
    throw NonHermitianInput(os.str());
  }
  // remove the sub-tolerance skew so downstream eigen solves see an exactly
  // Hermitian matrix
  mat_ = ((mat_ + mat_.adjoint()) / 2.0).eval();
}

HermitianOperator HermitianOperator::symmetrized(const Matrix& m) {
  return HermitianOperator(((m + m.adjoint()) / 2.0).eval());
}

DensityMatrix::DensityMatrix(HermitianOperator op, const Tolerances& tol) : op_(std::move(op)) {
  const double tr_defect = std::abs(op_.mat().trace().real() - 1.0) +
                           std::abs(op_.mat().trace().imag());
  if (tr_defect > tol.trace_one) {
    std::ostringstream os;
    os << "DensityMatrix: |trace - 1| = " << tr_defect;
    throw DomainError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(op_.mat(), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol.psd_slack) {
    std::ostringstream os;
    os << "DensityMatrix: smallest eigenvalue " << es.eigenvalues().minCoeff();
    throw DomainError(os.str());
  }
}

DensityMatrix::DensityMatrix(Matrix m, const Tolerances& tol)
    : DensityMatrix(HermitianOperator(std::move(m), tol), tol) {}

EigDecomposition eig_hermitian(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat());
  if (es.info() != Eigen::Success) {
    throw SolverFailure("eig_hermitian: eigen solver did not converge");
  }
  return EigDecomposition{es.eigenvalues(), es.eigenvectors()};
}

double default_cutoff(const DensityMatrix& rho, const Tolerances& tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat(), Eigen::EigenvaluesOnly);
  return tol.cutoff_scale * std::max(es.eigenvalues().maxCoeff(), 0.0);
}

namespace {

// shared core of the two anticommutator solves; divides in rho's eigenbasis
Matrix anticommutator_core(const DensityMatrix& rho, const Matrix& b, double cutoff,
                           double rhs_tol) {
  const EigDecomposition eig = eig_hermitian(rho.op());
  const Matrix& u = eig.eigenvectors;
  const Vector& p = eig.eigenvalues;
  const Index n = rho.dim();

  Matrix bt = u.adjoint() * b * u;
  Matrix xt = Matrix::Zero(n, n);
  double dropped_sq = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double s = p(i) + p(j);
      if (s > cutoff) {
        xt(i, j) = bt(i, j) / s;
      } else {
        dropped_sq += std::norm(bt(i, j));
      }
    }
  }
  const double bnorm = b.norm();
  if (std::sqrt(dropped_sq) > rhs_tol * bnorm && bnorm > 0.0) {
    std::ostringstream os;
    os << "anticommutator solve: rhs has weight " << std::sqrt(dropped_sq)
       << " on blocks with p_i + p_j <= " << cutoff;
    throw InconsistentRhs(os.str());
  }
  return u * xt * u.adjoint();
}

}  // namespace

HermitianOperator lyapunov_solve(const DensityMatrix& rho, const HermitianOperator& b,
                                 double cutoff, const Tolerances& tol) {
  if (cutoff < 0.0) throw DomainError("lyapunov_solve: cutoff must be >= 0");
  // (X rho + rho X)/2 = B  <=>  rho X + X rho = 2B
  Matrix x = anticommutator_core(rho, 2.0 * b.mat(), cutoff, tol.rhs_consistency);
  return HermitianOperator::symmetrized(x);
}

Matrix anticommutator_inverse_apply(const DensityMatrix& rho, const Matrix& b,
                                    double cutoff, const Tolerances& tol) {
  if (cutoff < 0.0) throw DomainError("anticommutator_inverse_apply: cutoff must be >= 0");
  return anticommutator_core(rho, b, cutoff, tol.rhs_consistency);
}

double trace_norm(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().sum();
}

RealMatrix complex_to_real_embed(const Matrix& a) {
  const Index n = a.rows();
  RealMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = a.real();
  out.topRightCorner(n, n) = -a.imag();
  out.bottomLeftCorner(n, n) = a.imag();
  out.bottomRightCorner(n, n) = a.real();
  return out;
}

Matrix matrix_sqrt_psd(const HermitianOperator& a, double floor) {
  const EigDecomposition eig = eig_hermitian(a);
  Vector d = eig.eigenvalues;
  for (Index i = 0; i < d.size(); ++i) d(i) = d(i) > floor ? std::sqrt(d(i)) : 0.0;
  return eig.eigenvectors * d.asDiagonal() * eig.eigenvectors.adjoint();
}

Matrix pseudo_inverse_psd(const HermitianOperator& a, double cutoff) {
  const EigDecomposition eig = eig_hermitian(a);
  Vector d = eig.eigenvalues;
  for (Index i = 0; i < d.size(); ++i) d(i) = d(i) > cutoff ? 1.0 / d(i) : 0.0;
  return eig.eigenvectors * d.asDiagonal() * eig.eigenvectors.adjoint();
}

RealMatrix real_sqrt_psd(const RealMatrix& a, double floor) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(a);
  Vector d = es.eigenvalues();
  for (Index i = 0; i < d.size(); ++i) d(i) = d(i) > floor ? std::sqrt(d(i)) : 0.0;
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

RealMatrix real_inv_sqrt_psd(const RealMatrix& a, double rank_floor) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(a);
  const Vector& d = es.eigenvalues();
  const double dmax = d.maxCoeff();
  if (dmax <= 0.0 || d.minCoeff() <= rank_floor * dmax) {
    throw SingularQfi("real_inv_sqrt_psd: matrix is numerically singular");
  }
  Vector inv = d.cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace qest
