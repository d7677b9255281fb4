#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qest/information.hpp"
#include "qest/sdp.hpp"

namespace qest {

/// Positive-definite weight matrix for scalar bounds.
class WeightMatrix {
 public:
  explicit WeightMatrix(RealMatrix w);
  static WeightMatrix identity(Index d);
  const RealMatrix& mat() const { return w_; }
  Index dim() const { return w_.rows(); }
  RealMatrix sqrt() const;

 private:
  RealMatrix w_;
};

struct ChainBounds {
  double c_s_plus_norm;  // C^S + ||sqrt(W) Q^-1 D Q^-1 sqrt(W)||_1
  double one_plus_R_cs;  // (1 + R) C^S
  double two_cs;         // 2 C^S
};

struct HolevoCertificate {
  std::vector<HermitianOperator> x_ops;
  RealMatrix u;
  double sdp_gap;
};

struct BoundsReport {
  double c_sld = 0.0;
  std::optional<double> c_rld;
  std::optional<double> c_holevo;
  double holevo_gap = 0.0;
  ChainBounds chain{};
  double r_incompat = 0.0;
};

/// C^S = Tr[W Q^-1].
double scalar_sld_bound(const RealMatrix& q, const WeightMatrix& w,
                        const Tolerances& tol = default_tolerances());

/// C^R = Tr[W Re(J^-1)] + ||sqrt(W) Im(J^-1) sqrt(W)||_1.
double scalar_rld_bound(const Matrix& j, const WeightMatrix& w,
                        const Tolerances& tol = default_tolerances());

/// Holevo bound via the dense SDP reduction: X_mu expanded over an
/// orthonormal Hermitian operator basis, block [[U, V*],[V, I]] >= 0 with
/// V's mu-th column vec(X_mu sqrt(rho)), minimize Tr[W U].
std::pair<double, HolevoCertificate> holevo_bound(const ModelPoint& pt, const WeightMatrix& w,
                                                  const Tolerances& tol = default_tolerances());

ChainBounds upper_bound_chain(const RealMatrix& q, const RealMatrix& d, const WeightMatrix& w,
                              const Tolerances& tol = default_tolerances());

/// Tr[W_sub (Q^-1)_SS]: bound on the interest parameters with the
/// complement treated as unknown nuisance.
double nuisance_bound(const RealMatrix& q, const std::vector<int>& interest_indices,
                      const WeightMatrix& w_sub, const Tolerances& tol = default_tolerances());

/// Multi-start derivative-free minimization of Tr[W F(Pi)^-1] over mixtures
/// of two rank-one projective qubit measurements.  Returns an upper bound on
/// the most-informative bound C^MI, never a certified optimum.
double most_informative_search(const ModelPoint& pt, const WeightMatrix& w, int starts = 32,
                               const Tolerances& tol = default_tolerances());

/// Assembles C^S, C^R (when defined), C^H, the upper-bound chain and R.
BoundsReport bounds_report(const ModelPoint& pt, const WeightMatrix& w,
                           const Tolerances& tol = default_tolerances());

/// Orthonormal Hermitian basis of n x n matrices under <A,B> = Tr[A B]:
/// identity/sqrt(n) first, then a traceless Gram-Schmidt completion.
std::vector<Matrix> hermitian_basis(Index n);

}  // namespace qest
