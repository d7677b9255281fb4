#include "qest/classify.hpp"

#include <algorithm>

namespace qest {

namespace {

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

// least-squares residual of projecting y onto the real span of the SLDs
double span_projection_residual(const Matrix& y, const std::vector<HermitianOperator>& ls) {
  const Index d = static_cast<Index>(ls.size());
  RealMatrix gram(d, d);
  Vector rhs(d);
  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b < d; ++b) {
      gram(a, b) = (ls[a].mat().adjoint() * ls[b].mat()).trace().real();
    }
    rhs(a) = (ls[a].mat().adjoint() * y).trace().real();
  }
  const Vector coef = gram.completeOrthogonalDecomposition().solve(rhs);
  Matrix proj = Matrix::Zero(y.rows(), y.cols());
  for (Index a = 0; a < d; ++a) proj += coef(a) * ls[a].mat();
  return (y - proj).norm();
}

}  // namespace

ClassificationReport classify(const StatisticalModel& model,
                              const std::vector<Vector>& sample_points, const Tolerances& tol) {
  if (sample_points.size() < 3) {
    throw DomainError("classify: need at least 3 sample points");
  }
  // local-frame models (imaging scenes) are re-expressed in one shared basis
  // so states at different points can be compared
  if (model.local_frame) {
    if (!model.fixed_frame) {
      throw DomainError("classify: local-frame model provides no fixed-frame builder");
    }
    return classify(model.fixed_frame(sample_points), sample_points, tol);
  }

  const double tau = tol.classify_tau;
  ClassificationReport rep;
  rep.classical = true;
  rep.quasi_classical = true;
  rep.d_invariant = true;
  rep.asymptotically_classical = true;
  rep.partial_commutativity = true;

  std::vector<ModelPoint> pts;
  pts.reserve(sample_points.size());
  for (const auto& lam : sample_points) pts.push_back(evaluate(model, lam, tol));

  // cross-point state commutators (shared-eigenbasis proxy)
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j) {
      const double c = commutator(pts[i].rho.mat(), pts[j].rho.mat()).norm();
      rep.witnesses.classical_residual = std::max(rep.witnesses.classical_residual, c);
      if (c > tau) rep.classical = false;
    }
  }

  for (const auto& pt : pts) {
    const double cutoff = default_cutoff(pt.rho, tol);
    const EigDecomposition eig = eig_hermitian(pt.rho.op());
    const Index n = pt.hilbert_dim();
    Index rank = 0;
    for (Index i = 0; i < n; ++i) {
      if (eig.eigenvalues(i) > cutoff) ++rank;
    }
    if (rank < n) rep.rank_deficient = true;

    for (const auto& dr : pt.drho) {
      const double c = commutator(pt.rho.mat(), dr.mat()).norm();
      rep.witnesses.classical_residual = std::max(rep.witnesses.classical_residual, c);
      if (c > tau) rep.classical = false;
    }

    const SldSet sld = compute_sld(pt, tol);
    const InfoMatrices info = qfi_matrices(pt, tol);
    const double qnorm = info.q.norm();

    const Matrix support = eig.eigenvectors.rightCols(rank);  // eigenvalues ascending
    for (size_t a = 0; a < sld.operators.size(); ++a) {
      for (size_t b = a + 1; b < sld.operators.size(); ++b) {
        const Matrix comm = commutator(sld.operators[a].mat(), sld.operators[b].mat());
        const double c = comm.norm();
        rep.witnesses.quasi_residual = std::max(rep.witnesses.quasi_residual, c);
        if (c > tau) rep.quasi_classical = false;
        const double csup = (support.adjoint() * comm * support).norm();
        if (csup > tau) rep.partial_commutativity = false;
      }
    }

    for (const auto& l : sld.operators) {
      const Matrix rhol = pt.rho.mat() * l.mat();
      const Matrix b = Complex(0.0, -1.0) * (rhol - rhol.adjoint());
      const Matrix y = anticommutator_inverse_apply(pt.rho, b, cutoff, tol);
      const double ynorm = y.norm();
      if (ynorm <= tau) continue;  // commutation superoperator maps it to zero
      const double resid = span_projection_residual(y, sld.operators) / ynorm;
      rep.witnesses.d_invariant_residual = std::max(rep.witnesses.d_invariant_residual, resid);
      if (resid > tau) rep.d_invariant = false;
    }

    const double weak = info.d.norm();
    const double weak_rel = qnorm > 0.0 ? weak / qnorm : weak;
    rep.witnesses.weak_commutativity_residual =
        std::max(rep.witnesses.weak_commutativity_residual, weak_rel);
    if (weak_rel > tau) rep.asymptotically_classical = false;
  }

  return rep;
}

}  // namespace qest
