#pragma once

#include "qest/errors.hpp"
#include "qest/tolerances.hpp"
#include "qest/types.hpp"

namespace qest {

/// Dense Hermitian matrix with the Hermiticity invariant checked on
/// construction.  The raw Eigen matrix is exposed read-only; all values in
/// the library are immutable once built.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix m, const Tolerances& tol = default_tolerances());

  Index dim() const { return mat_.rows(); }
  const Matrix& mat() const { return mat_; }

  /// Builds from an almost-Hermitian matrix by averaging with its adjoint.
  static HermitianOperator symmetrized(const Matrix& m);

 private:
  Matrix mat_;
};

/// Unit-trace positive-semidefinite Hermitian matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m, const Tolerances& tol = default_tolerances());
  explicit DensityMatrix(HermitianOperator op, const Tolerances& tol = default_tolerances());

  Index dim() const { return op_.dim(); }
  const Matrix& mat() const { return op_.mat(); }
  const HermitianOperator& op() const { return op_; }

 private:
  HermitianOperator op_;
};

struct EigDecomposition {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // unitary, columns
};

/// Spectral decomposition of a Hermitian matrix; eigenvalues ascending.
EigDecomposition eig_hermitian(const HermitianOperator& a);

/// Checks max_ij |a_ij - conj(a_ji)| against the relative Hermiticity budget.
bool is_hermitian(const Matrix& a, double tol_scale);
double hermiticity_defect(const Matrix& a);

/// Solves (X rho + rho X)/2 = B for Hermitian X.  In rho's eigenbasis
/// X_ij = 2 B_ij / (p_i + p_j) on the retained support (p_i + p_j > cutoff)
/// and zero elsewhere.  Throws InconsistentRhs when B carries more than
/// rhs_consistency * ||B|| outside the solvable support.
HermitianOperator lyapunov_solve(const DensityMatrix& rho, const HermitianOperator& b,
                                 double cutoff, const Tolerances& tol = default_tolerances());

/// Solves rho Y + Y rho = B for general (possibly non-Hermitian) B;
/// Y_ij = B_ij / (p_i + p_j) above the cutoff.
Matrix anticommutator_inverse_apply(const DensityMatrix& rho, const Matrix& b,
                                    double cutoff, const Tolerances& tol = default_tolerances());

/// Default cutoff for (p_i + p_j) divisions: cutoff_scale * largest eigenvalue.
double default_cutoff(const DensityMatrix& rho, const Tolerances& tol = default_tolerances());

/// Sum of singular values.
double trace_norm(const Matrix& a);

/// [[Re a, -Im a], [Im a, Re a]]; PSD iff a is, every eigenvalue doubled.
RealMatrix complex_to_real_embed(const Matrix& a);

// eigen-backed matrix functions (single backend for all matrix functions)
Matrix matrix_sqrt_psd(const HermitianOperator& a, double floor = 0.0);
Matrix pseudo_inverse_psd(const HermitianOperator& a, double cutoff);
RealMatrix real_sqrt_psd(const RealMatrix& a, double floor = 0.0);
RealMatrix real_inv_sqrt_psd(const RealMatrix& a, double rank_floor);

}  // namespace qest
