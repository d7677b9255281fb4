#pragma once

#include <optional>
#include <vector>

#include "qest/model.hpp"

namespace qest {

/// Symmetric logarithmic derivatives with their defining-equation residuals.
struct SldSet {
  std::vector<HermitianOperator> operators;
  Vector residuals;  // ||(L rho + rho L)/2 - d_rho||_F per parameter
};

/// Right logarithmic derivatives (generally non-Hermitian).
struct RldSet {
  std::vector<Matrix> operators;
  Vector residuals;  // ||rho L - d_rho||_F per parameter
};

/// Q (SLD-QFI), J (RLD-QFI, absent on rank-deficient support), and the mean
/// Uhlmann curvature D.
struct InfoMatrices {
  RealMatrix q;
  RealMatrix d;
  std::optional<Matrix> j;
};

/// Positive operator-valued measure; elements PSD, summing to identity.
class Povm {
 public:
  explicit Povm(std::vector<HermitianOperator> elements,
                const Tolerances& tol = default_tolerances());
  const std::vector<HermitianOperator>& elements() const { return elements_; }
  Index size() const { return static_cast<Index>(elements_.size()); }
  Index dim() const { return elements_.front().dim(); }

 private:
  std::vector<HermitianOperator> elements_;
};

SldSet compute_sld(const ModelPoint& pt, const Tolerances& tol = default_tolerances());

/// L^R_mu = rho^+ d_mu rho.  Throws RldUndefined when some d_mu rho has
/// support outside rho's support (the RLD bound does not apply there).
RldSet compute_rld(const ModelPoint& pt, const Tolerances& tol = default_tolerances());

InfoMatrices qfi_matrices(const ModelPoint& pt, const Tolerances& tol = default_tolerances());

/// R = largest eigenvalue of i Q^{-1/2} D Q^{-1/2} (same spectrum as
/// i Q^{-1} D), clamped to [0, 1].
double incompatibility_R(const InfoMatrices& info, const Tolerances& tol = default_tolerances());

/// Classical Fisher information of the POVM's outcome distribution.
RealMatrix classical_fi(const ModelPoint& pt, const Povm& povm,
                        const Tolerances& tol = default_tolerances());

/// Upsilon = Tr[F Q^{-1}].
double upsilon(const RealMatrix& f, const RealMatrix& q,
               const Tolerances& tol = default_tolerances());

}  // namespace qest
