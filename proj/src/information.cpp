#include "qest/information.hpp"

#include <sstream>

namespace qest {

Povm::Povm(std::vector<HermitianOperator> elements, const Tolerances& tol)
    : elements_(std::move(elements)) {
  if (elements_.empty()) throw DomainError("Povm: no elements");
  const Index n = elements_.front().dim();
  Matrix sum = Matrix::Zero(n, n);
  for (const auto& e : elements_) {
    if (e.dim() != n) throw DomainError("Povm: element dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> es(e.mat(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol.psd_slack) {
      std::ostringstream os;
      os << "Povm: element has eigenvalue " << es.eigenvalues().minCoeff();
      throw DomainError(os.str());
    }
    sum += e.mat();
  }
  const double defect = (sum - Matrix::Identity(n, n)).norm();
  if (defect > 1e-9) {
    std::ostringstream os;
    os << "Povm: completeness defect ||sum - I||_F = " << defect;
    throw DomainError(os.str());
  }
}

SldSet compute_sld(const ModelPoint& pt, const Tolerances& tol) {
  const double cutoff = default_cutoff(pt.rho, tol);
  SldSet out;
  out.operators.reserve(pt.drho.size());
  out.residuals.resize(pt.param_dim());
  for (Index mu = 0; mu < pt.param_dim(); ++mu) {
    HermitianOperator l = lyapunov_solve(pt.rho, pt.drho[mu], cutoff, tol);
    const Matrix resid =
        (l.mat() * pt.rho.mat() + pt.rho.mat() * l.mat()) / 2.0 - pt.drho[mu].mat();
    out.residuals(mu) = resid.norm();
    out.operators.push_back(std::move(l));
  }
  return out;
}

RldSet compute_rld(const ModelPoint& pt, const Tolerances& tol) {
  const EigDecomposition eig = eig_hermitian(pt.rho.op());
  const double cutoff = tol.cutoff_scale * std::max(eig.eigenvalues.maxCoeff(), 0.0);
  const Matrix rho = pt.rho.mat();
  const Matrix rho_pinv = pseudo_inverse_psd(pt.rho.op(), cutoff);

  // support projector complement from the same spectral data
  Vector kernel_mask = Vector::Zero(eig.eigenvalues.size());
  for (Index i = 0; i < eig.eigenvalues.size(); ++i) {
    kernel_mask(i) = eig.eigenvalues(i) > cutoff ? 0.0 : 1.0;
  }
  const Matrix p_kernel = eig.eigenvectors * kernel_mask.asDiagonal().toDenseMatrix().cast<Complex>() *
                          eig.eigenvectors.adjoint();

  RldSet out;
  out.operators.reserve(pt.drho.size());
  out.residuals.resize(pt.param_dim());
  for (Index mu = 0; mu < pt.param_dim(); ++mu) {
    const Matrix& d = pt.drho[mu].mat();
    const double off_support = (p_kernel * d).norm();
    if (off_support > tol.rhs_consistency * std::max(d.norm(), 1e-300)) {
      std::ostringstream os;
      os << "compute_rld: derivative " << mu << " has weight " << off_support
         << " outside the state's support";
      throw RldUndefined(os.str());
    }
    Matrix l = rho_pinv * d;
    out.residuals(mu) = (rho * l - d).norm();
    out.operators.push_back(std::move(l));
  }
  return out;
}

InfoMatrices qfi_matrices(const ModelPoint& pt, const Tolerances& tol) {
  const Index d = pt.param_dim();
  const SldSet sld = compute_sld(pt, tol);
  const Matrix& rho = pt.rho.mat();

  InfoMatrices out;
  out.q.resize(d, d);
  out.d.resize(d, d);
  for (Index mu = 0; mu < d; ++mu) {
    for (Index nu = 0; nu < d; ++nu) {
      const Matrix prod = sld.operators[mu].mat() * sld.operators[nu].mat();
      const Complex t = (rho * prod).trace();
      // Tr[rho {Lmu, Lnu}/2] = Re Tr[rho Lmu Lnu];
      // -(i/2) Tr[rho [Lmu, Lnu]] = Im Tr[rho Lmu Lnu]
      out.q(mu, nu) = t.real();
      out.d(mu, nu) = t.imag();
    }
  }
  out.q = ((out.q + out.q.transpose()) / 2.0).eval();
  out.d = ((out.d - out.d.transpose()) / 2.0).eval();

  try {
    const RldSet rld = compute_rld(pt, tol);
    Matrix j(d, d);
    for (Index mu = 0; mu < d; ++mu) {
      for (Index nu = 0; nu < d; ++nu) {
        j(mu, nu) = (rho * rld.operators[nu] * rld.operators[mu].adjoint()).trace();
      }
    }
    out.j = ((j + j.adjoint()) / 2.0).eval();
  } catch (const RldUndefined&) {
    out.j.reset();
  }
  return out;
}

double incompatibility_R(const InfoMatrices& info, const Tolerances& tol) {
  const RealMatrix qis = real_inv_sqrt_psd(info.q, tol.qfi_rank_floor);
  const Matrix m = Complex(0.0, 1.0) * (qis * info.d * qis).cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const double r = es.eigenvalues().maxCoeff();
  if (r < -1e-10 || r > 1.0 + 1e-10) {
    std::ostringstream os;
    os << "incompatibility_R: value " << r << " outside [0, 1]";
    throw SolverFailure(os.str());
  }
  return std::clamp(r, 0.0, 1.0);
}

RealMatrix classical_fi(const ModelPoint& pt, const Povm& povm, const Tolerances& tol) {
  const Index d = pt.param_dim();
  const Index k = povm.size();
  RealMatrix f = RealMatrix::Zero(d, d);
  for (Index i = 0; i < k; ++i) {
    const Matrix& pi = povm.elements()[i].mat();
    const double p = (pt.rho.mat() * pi).trace().real();
    Vector dp(d);
    for (Index mu = 0; mu < d; ++mu) dp(mu) = (pt.drho[mu].mat() * pi).trace().real();
    if (p > tol.prob_floor) {
      f += (dp * dp.transpose()) / p;
    } else if (dp.cwiseAbs().maxCoeff() > tol.prob_slope_floor) {
      std::ostringstream os;
      os << "classical_fi: outcome " << i << " has p = " << p << " but |dp| = "
         << dp.cwiseAbs().maxCoeff() << " (non-regular measurement point)";
      throw SingularOutcome(os.str());
    }
  }
  return ((f + f.transpose()) / 2.0).eval();
}

double upsilon(const RealMatrix& f, const RealMatrix& q, const Tolerances& tol) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(q);
  const Vector& ev = es.eigenvalues();
  if (ev.minCoeff() <= tol.qfi_rank_floor * std::max(ev.maxCoeff(), 0.0)) {
    throw SingularQfi("upsilon: Q is numerically singular");
  }
  const RealMatrix qinv =
      es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  return (f * qinv).trace();
}

}  // namespace qest
