#include "qest/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qest {

WeightMatrix::WeightMatrix(RealMatrix w) : w_(std::move(w)) {
  if (w_.rows() != w_.cols() || w_.rows() == 0) {
    throw DomainError("WeightMatrix: must be square");
  }
  if ((w_ - w_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + w_.cwiseAbs().maxCoeff())) {
    throw DomainError("WeightMatrix: must be symmetric");
  }
  w_ = ((w_ + w_.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(w_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < 1e-12) {
    throw DomainError("WeightMatrix: must be positive definite (eigenvalues >= 1e-12)");
  }
}

WeightMatrix WeightMatrix::identity(Index d) { return WeightMatrix(RealMatrix::Identity(d, d)); }

RealMatrix WeightMatrix::sqrt() const { return real_sqrt_psd(w_, 0.0); }

namespace {

RealMatrix inverse_spd(const RealMatrix& q, double rank_floor, const char* who) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(q);
  const Vector& ev = es.eigenvalues();
  if (ev.minCoeff() <= rank_floor * std::max(ev.maxCoeff(), 0.0)) {
    throw SingularQfi(std::string(who) + ": matrix is numerically singular");
  }
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double scalar_sld_bound(const RealMatrix& q, const WeightMatrix& w, const Tolerances& tol) {
  return (w.mat() * inverse_spd(q, tol.qfi_rank_floor, "scalar_sld_bound")).trace();
}

double scalar_rld_bound(const Matrix& j, const WeightMatrix& w, const Tolerances& tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(j);
  const Vector& ev = es.eigenvalues();
  if (ev.minCoeff() <= tol.qfi_rank_floor * std::max(ev.maxCoeff(), 0.0)) {
    throw SingularQfi("scalar_rld_bound: J is numerically singular");
  }
  const Matrix jinv = es.eigenvectors() * ev.cwiseInverse().asDiagonal().toDenseMatrix().cast<Complex>() *
                      es.eigenvectors().adjoint();
  const RealMatrix sw = w.sqrt();
  return (w.mat() * jinv.real()).trace() + trace_norm((sw * jinv.imag() * sw).cast<Complex>());
}

std::vector<Matrix> hermitian_basis(Index n) {
  // candidates: identity, elementary symmetric/antisymmetric Hermitians,
  // then the remaining diagonal units; Gram-Schmidt under <A,B> = Tr[A B]
  std::vector<Matrix> candidates;
  candidates.push_back(Matrix::Identity(n, n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      if (i == j) {
        e(i, i) = 1.0;
        candidates.push_back(e);
      } else {
        e(i, j) = 1.0;
        e(j, i) = 1.0;
        candidates.push_back(e);
        Matrix k = Matrix::Zero(n, n);
        k(i, j) = Complex(0.0, -1.0);
        k(j, i) = Complex(0.0, 1.0);
        candidates.push_back(k);
      }
    }
  }
  std::vector<Matrix> basis;
  basis.reserve(n * n);
  for (auto& cand : candidates) {
    Matrix v = cand;
    for (const auto& e : basis) {
      const double coef = (e.adjoint() * v).trace().real();
      v -= coef * e;
    }
    const double nrm = v.norm();
    if (nrm > 1e-8) basis.push_back(v / nrm);
  }
  if (static_cast<Index>(basis.size()) != n * n) {
    throw SolverFailure("hermitian_basis: unexpected basis count");
  }
  return basis;
}

std::pair<double, HolevoCertificate> holevo_bound(const ModelPoint& pt, const WeightMatrix& w,
                                                  const Tolerances& tol) {
  const Index d = pt.param_dim();
  const Index n = pt.hilbert_dim();
  if (w.dim() != d) throw DomainError("holevo_bound: weight dimension mismatch");

  const std::vector<Matrix> basis = hermitian_basis(n);
  const Index nk = static_cast<Index>(basis.size());  // n^2
  const Matrix sqrt_rho = matrix_sqrt_psd(pt.rho.op(), 1e-12);

  const Index n_x = d * nk;
  const Index n_u = d * (d + 1) / 2;
  const Index m = n_x + n_u;
  auto uvar = [d](Index a, Index b) {  // a <= b
    // row-major upper-triangle packing
    return a * d - a * (a - 1) / 2 + (b - a);
  };

  sdp::SdpProblem prob;
  prob.c = Vector::Zero(m);
  for (Index a = 0; a < d; ++a) {
    prob.c(n_x + uvar(a, a)) = w.mat()(a, a);
    for (Index b = a + 1; b < d; ++b) prob.c(n_x + uvar(a, b)) = 2.0 * w.mat()(a, b);
  }

  // local unbiasedness: sum_k x_{mu k} Tr[drho_nu E_k] = delta_{mu nu}
  prob.eq_lhs = RealMatrix::Zero(d * d, m);
  prob.eq_rhs = Vector::Zero(d * d);
  RealMatrix tmat(d, nk);
  for (Index nu = 0; nu < d; ++nu) {
    for (Index k = 0; k < nk; ++k) {
      tmat(nu, k) = (pt.drho[nu].mat() * basis[k]).trace().real();
    }
  }
  for (Index mu = 0; mu < d; ++mu) {
    for (Index nu = 0; nu < d; ++nu) {
      const Index row = mu * d + nu;
      prob.eq_lhs.block(row, mu * nk, 1, nk) = tmat.row(nu);
      prob.eq_rhs(row) = (mu == nu) ? 1.0 : 0.0;
    }
  }

  // complex block [[U, V^dag], [V, I]] with V(:,mu) = vec(X_mu sqrt_rho)
  const Index nb = d + n * n;
  sdp::Block blk;
  {
    Matrix h0 = Matrix::Zero(nb, nb);
    h0.bottomRightCorner(n * n, n * n) = Matrix::Identity(n * n, n * n);
    blk.a0 = complex_to_real_embed(h0);
  }
  blk.coeff.resize(m);
  for (Index mu = 0; mu < d; ++mu) {
    for (Index k = 0; k < nk; ++k) {
      const Matrix prod = basis[k] * sqrt_rho;
      Matrix h = Matrix::Zero(nb, nb);
      const Eigen::Map<const ComplexVector> v(prod.data(), n * n);
      h.block(d, mu, n * n, 1) = v;
      h.block(mu, d, 1, n * n) = v.adjoint();
      blk.coeff[mu * nk + k] = complex_to_real_embed(h);
    }
  }
  for (Index a = 0; a < d; ++a) {
    for (Index b = a; b < d; ++b) {
      Matrix h = Matrix::Zero(nb, nb);
      h(a, b) = 1.0;
      h(b, a) = 1.0;
      if (a == b) h(a, a) = 1.0;
      blk.coeff[n_x + uvar(a, b)] = complex_to_real_embed(h);
    }
  }
  prob.blocks.push_back(std::move(blk));

  sdp::SdpSolution sol;
  try {
    sol = sdp::solve(prob, tol);
  } catch (const SdpInfeasible& e) {
    // infeasible local-unbiasedness constraints <=> singular QFI
    throw SingularQfi(std::string("holevo_bound: ") + e.what());
  }
  if (sol.status == sdp::SdpStatus::Infeasible) {
    throw SingularQfi("holevo_bound: SDP reports infeasibility (singular model)");
  }
  if (sol.status == sdp::SdpStatus::MaxIter &&
      std::abs(sol.gap) > tol.sdp_gap_fail * (1.0 + std::abs(sol.objective_value))) {
    std::ostringstream os;
    os << "holevo_bound: solver gap " << sol.gap << " after iteration cap";
    throw SolverFailure(os.str());
  }

  HolevoCertificate cert;
  cert.sdp_gap = std::abs(sol.gap);
  for (Index mu = 0; mu < d; ++mu) {
    Matrix x = Matrix::Zero(n, n);
    for (Index k = 0; k < nk; ++k) x += sol.x(mu * nk + k) * basis[k];
    cert.x_ops.push_back(HermitianOperator::symmetrized(x));
  }
  cert.u = RealMatrix::Zero(d, d);
  for (Index a = 0; a < d; ++a) {
    for (Index b = a; b < d; ++b) {
      cert.u(a, b) = sol.x(n_x + uvar(a, b));
      cert.u(b, a) = cert.u(a, b);
    }
  }
  return {sol.objective_value, std::move(cert)};
}

ChainBounds upper_bound_chain(const RealMatrix& q, const RealMatrix& d, const WeightMatrix& w,
                              const Tolerances& tol) {
  const RealMatrix qinv = inverse_spd(q, tol.qfi_rank_floor, "upper_bound_chain");
  const double cs = (w.mat() * qinv).trace();
  const RealMatrix sw = w.sqrt();
  const double tn = trace_norm((sw * qinv * d * qinv * sw).cast<Complex>());
  const double r = incompatibility_R(InfoMatrices{q, d, std::nullopt}, tol);
  return ChainBounds{cs + tn, (1.0 + r) * cs, 2.0 * cs};
}

double nuisance_bound(const RealMatrix& q, const std::vector<int>& interest_indices,
                      const WeightMatrix& w_sub, const Tolerances& tol) {
  if (interest_indices.empty()) throw DomainError("nuisance_bound: empty interest set");
  const RealMatrix qinv = inverse_spd(q, tol.qfi_rank_floor, "nuisance_bound");
  const Index s = static_cast<Index>(interest_indices.size());
  if (w_sub.dim() != s) throw DomainError("nuisance_bound: weight dimension mismatch");
  RealMatrix sub(s, s);
  for (Index a = 0; a < s; ++a) {
    for (Index b = 0; b < s; ++b) {
      const int ia = interest_indices[a], ib = interest_indices[b];
      if (ia < 0 || ia >= q.rows() || ib < 0 || ib >= q.rows()) {
        throw DomainError("nuisance_bound: interest index out of range");
      }
      sub(a, b) = qinv(ia, ib);
    }
  }
  return (w_sub.mat() * sub).trace();
}

namespace {

constexpr double kSingularPenalty = 1e30;

// Tr[W F^-1] for a mixture of two rank-one projective qubit measurements;
// params = (theta1, phi1, theta2, phi2, logit mixing weight)
double qubit_mi_objective(const ModelPoint& pt, const RealMatrix& w,
                          const Eigen::Matrix<double, 5, 1>& params, const Tolerances& tol) {
  const Index d = pt.param_dim();
  const double mix = 1.0 / (1.0 + std::exp(-params(4)));

  auto bloch_projector = [](double theta, double phi) {
    Matrix pi(2, 2);
    const double nx = std::sin(theta) * std::cos(phi);
    const double ny = std::sin(theta) * std::sin(phi);
    const double nz = std::cos(theta);
    pi << Complex(1.0 + nz, 0.0) / 2.0, Complex(nx, -ny) / 2.0, Complex(nx, ny) / 2.0,
        Complex(1.0 - nz, 0.0) / 2.0;
    return pi;
  };

  std::vector<Matrix> elems;
  const Matrix p1 = bloch_projector(params(0), params(1));
  const Matrix p2 = bloch_projector(params(2), params(3));
  elems.push_back(mix * p1);
  elems.push_back(mix * (Matrix::Identity(2, 2) - p1));
  elems.push_back((1.0 - mix) * p2);
  elems.push_back((1.0 - mix) * (Matrix::Identity(2, 2) - p2));

  RealMatrix f = RealMatrix::Zero(d, d);
  for (const auto& e : elems) {
    const double p = (pt.rho.mat() * e).trace().real();
    if (p <= tol.prob_floor) continue;
    Vector dp(d);
    for (Index mu = 0; mu < d; ++mu) dp(mu) = (pt.drho[mu].mat() * e).trace().real();
    f += dp * dp.transpose() / p;
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(f);
  const double lmax = es.eigenvalues().maxCoeff();
  if (lmax <= 0.0 || es.eigenvalues().minCoeff() <= 1e-12 * lmax) return kSingularPenalty;
  const RealMatrix finv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                          es.eigenvectors().transpose();
  return (w * finv).trace();
}

uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_double(uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace

double most_informative_search(const ModelPoint& pt, const WeightMatrix& w, int starts,
                               const Tolerances& tol) {
  if (pt.hilbert_dim() != 2) {
    throw DomainError("most_informative_search: restricted to qubit models");
  }
  using Point = Eigen::Matrix<double, 5, 1>;
  auto objective = [&](const Point& p) { return qubit_mi_objective(pt, w.mat(), p, tol); };

  uint64_t rng_state = 0x51d5a1ac0e3f7ULL;  // fixed: the search is deterministic
  double best = kSingularPenalty;
  for (int s = 0; s < starts; ++s) {
    Point p0;
    p0 << unit_double(rng_state) * M_PI, unit_double(rng_state) * 2.0 * M_PI,
        unit_double(rng_state) * M_PI, unit_double(rng_state) * 2.0 * M_PI,
        (unit_double(rng_state) - 0.5) * 2.0;

    // Nelder-Mead
    constexpr int np = 5;
    std::vector<Point> simplex(np + 1, p0);
    for (int i = 0; i < np; ++i) simplex[i + 1](i) += 0.35;
    std::vector<double> fv(np + 1);
    for (int i = 0; i <= np; ++i) fv[i] = objective(simplex[i]);

    for (int it = 0; it < 400; ++it) {
      std::vector<int> order(np + 1);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
      std::vector<Point> sx(np + 1);
      std::vector<double> sf(np + 1);
      for (int i = 0; i <= np; ++i) {
        sx[i] = simplex[order[i]];
        sf[i] = fv[order[i]];
      }
      simplex = sx;
      fv = sf;
      if (std::abs(fv[np] - fv[0]) <= 1e-11 * (1.0 + std::abs(fv[0]))) break;

      Point centroid = Point::Zero();
      for (int i = 0; i < np; ++i) centroid += simplex[i];
      centroid /= np;

      const Point refl = centroid + (centroid - simplex[np]);
      const double fr = objective(refl);
      if (fr < fv[0]) {
        const Point expa = centroid + 2.0 * (centroid - simplex[np]);
        const double fe = objective(expa);
        if (fe < fr) {
          simplex[np] = expa;
          fv[np] = fe;
        } else {
          simplex[np] = refl;
          fv[np] = fr;
        }
      } else if (fr < fv[np - 1]) {
        simplex[np] = refl;
        fv[np] = fr;
      } else {
        const Point contr = centroid + 0.5 * (simplex[np] - centroid);
        const double fc = objective(contr);
        if (fc < fv[np]) {
          simplex[np] = contr;
          fv[np] = fc;
        } else {
          for (int i = 1; i <= np; ++i) {
            simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
            fv[i] = objective(simplex[i]);
          }
        }
      }
    }
    best = std::min(best, *std::min_element(fv.begin(), fv.end()));
  }
  if (best >= kSingularPenalty) {
    throw SearchDegenerate("most_informative_search: all sampled POVMs gave singular F");
  }
  return best;
}

BoundsReport bounds_report(const ModelPoint& pt, const WeightMatrix& w, const Tolerances& tol) {
  const InfoMatrices info = qfi_matrices(pt, tol);
  BoundsReport rep;
  rep.c_sld = scalar_sld_bound(info.q, w, tol);
  rep.r_incompat = incompatibility_R(info, tol);
  rep.chain = upper_bound_chain(info.q, info.d, w, tol);
  if (info.j.has_value()) {
    rep.c_rld = scalar_rld_bound(*info.j, w, tol);
  }
  auto [ch, cert] = holevo_bound(pt, w, tol);
  rep.c_holevo = ch;
  rep.holevo_gap = cert.sdp_gap;
  return rep;
}

}  // namespace qest
