#include "qest/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qest::sdp {

namespace {

constexpr double kDivergenceFactor = 1e9;

struct Reduced {
  // min g.w  s.t.  f0[b] + sum_j w_j fj[b][j] >= 0
  Vector g;
  std::vector<RealMatrix> f0;
  std::vector<std::vector<RealMatrix>> fj;  // [block][var]
  double obj_const = 0.0;
  Vector x_particular;  // x = x_particular + basis * w
  RealMatrix basis;
};

RealMatrix symmetrized(const RealMatrix& a) { return (a + a.transpose()) / 2.0; }

void validate(const SdpProblem& p) {
  const Index m = p.c.size();
  if (p.blocks.empty()) throw DomainError("sdp: problem has no PSD blocks");
  for (const auto& blk : p.blocks) {
    if (blk.a0.rows() != blk.a0.cols()) throw DomainError("sdp: block A0 not square");
    if (static_cast<Index>(blk.coeff.size()) != m) {
      throw DomainError("sdp: block has wrong number of coefficient matrices");
    }
    const double scale = 1.0 + blk.a0.cwiseAbs().maxCoeff();
    if ((blk.a0 - blk.a0.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
      throw DomainError("sdp: block A0 not symmetric");
    }
    for (const auto& ai : blk.coeff) {
      if (ai.rows() != blk.a0.rows() || ai.cols() != blk.a0.cols()) {
        throw DomainError("sdp: coefficient dimension mismatch");
      }
      const double s = 1.0 + ai.cwiseAbs().maxCoeff();
      if ((ai - ai.transpose()).cwiseAbs().maxCoeff() > 1e-10 * s) {
        throw DomainError("sdp: coefficient matrix not symmetric");
      }
    }
  }
  if (p.eq_lhs.rows() > 0 && p.eq_lhs.cols() != m) {
    throw DomainError("sdp: equality matrix has wrong column count");
  }
  if (p.eq_lhs.rows() != p.eq_rhs.size()) {
    throw DomainError("sdp: equality rhs size mismatch");
  }
}

// Eliminate E x = f:  x = x0 + N z with N an orthonormal null-space basis.
// Then drop z-directions that do not move any block (null directions of the
// constraint map); a nonzero objective on such a direction certifies an
// unbounded problem.
Reduced reduce(const SdpProblem& p, const Tolerances& tol, SdpSolution& sol) {
  const Index m = p.c.size();
  Vector x0 = Vector::Zero(m);
  RealMatrix nullbasis = RealMatrix::Identity(m, m);

  if (p.eq_lhs.rows() > 0) {
    Eigen::BDCSVD<RealMatrix> svd(p.eq_lhs, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    const double rank_tol =
        smax * std::numeric_limits<double>::epsilon() * std::max(p.eq_lhs.rows(), p.eq_lhs.cols());
    Index rank = 0;
    while (rank < sv.size() && sv(rank) > rank_tol) ++rank;

    Vector uf = svd.matrixU().transpose() * p.eq_rhs;
    Vector coef = Vector::Zero(sv.size());
    for (Index i = 0; i < rank; ++i) coef(i) = uf(i) / sv(i);
    x0 = svd.matrixV().leftCols(sv.size()) * coef;
    if ((p.eq_lhs * x0 - p.eq_rhs).norm() > 1e-9 * (1.0 + p.eq_rhs.norm())) {
      throw SdpInfeasible("sdp: equality constraints are inconsistent");
    }
    nullbasis = svd.matrixV().rightCols(m - rank);
  }

  const Index mz = nullbasis.cols();
  Reduced r;
  r.obj_const = p.c.dot(x0);
  Vector gz = nullbasis.transpose() * p.c;

  std::vector<RealMatrix> f0;
  std::vector<std::vector<RealMatrix>> fz;
  Index total_sq = 0;
  for (const auto& blk : p.blocks) total_sq += blk.a0.size();
  for (const auto& blk : p.blocks) {
    RealMatrix base = blk.a0;
    for (Index i = 0; i < m; ++i) base += x0(i) * blk.coeff[i];
    f0.push_back(symmetrized(base));
    std::vector<RealMatrix> cs;
    cs.reserve(mz);
    for (Index j = 0; j < mz; ++j) {
      RealMatrix cj = RealMatrix::Zero(blk.a0.rows(), blk.a0.cols());
      for (Index i = 0; i < m; ++i) {
        if (nullbasis(i, j) != 0.0) cj += nullbasis(i, j) * blk.coeff[i];
      }
      cs.push_back(symmetrized(cj));
    }
    fz.push_back(std::move(cs));
  }

  // constraint map null directions
  RealMatrix gmat(total_sq, mz);
  for (Index j = 0; j < mz; ++j) {
    Index at = 0;
    for (const auto& cs : fz) {
      const RealMatrix& cj = cs[j];
      gmat.block(at, j, cj.size(), 1) =
          Eigen::Map<const Vector>(cj.data(), cj.size());
      at += cj.size();
    }
  }
  RealMatrix rot = RealMatrix::Identity(mz, mz);
  Index kept = mz;
  if (mz > 0) {
    Eigen::BDCSVD<RealMatrix> svd(gmat, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    Index rank = 0;
    while (rank < sv.size() && sv(rank) > tol.sdp_null_direction * std::max(smax, 1e-300)) ++rank;
    if (rank < mz) {
      rot = svd.matrixV();
      kept = rank;
      const Vector g_dropped = rot.rightCols(mz - kept).transpose() * gz;
      if (g_dropped.cwiseAbs().maxCoeff() > 1e-8 * (1.0 + gz.norm())) {
        sol.status = SdpStatus::Infeasible;
        throw SdpInfeasible("sdp: objective unbounded along a constraint null direction");
      }
    }
  }

  r.basis = nullbasis * rot.leftCols(kept);
  r.g = rot.leftCols(kept).transpose() * gz;
  r.x_particular = x0;
  r.f0 = std::move(f0);
  r.fj.resize(r.f0.size());
  for (size_t b = 0; b < r.fj.size(); ++b) {
    r.fj[b].reserve(kept);
    for (Index j = 0; j < kept; ++j) {
      RealMatrix cj = RealMatrix::Zero(r.f0[b].rows(), r.f0[b].cols());
      for (Index i = 0; i < mz; ++i) {
        if (rot(i, j) != 0.0) cj += rot(i, j) * fz[b][i];
      }
      r.fj[b].push_back(symmetrized(cj));
    }
  }
  return r;
}

struct BlockVars {
  std::vector<RealMatrix> mats;

  double dot(const BlockVars& other) const {
    double s = 0.0;
    for (size_t b = 0; b < mats.size(); ++b) s += mats[b].cwiseProduct(other.mats[b]).sum();
    return s;
  }
  double norm() const { return std::sqrt(dot(*this)); }
  double trace() const {
    double s = 0.0;
    for (const auto& m : mats) s += m.trace();
    return s;
  }
};

// largest step alpha with X + alpha dX staying PSD, via the Cholesky factor
double max_step(const std::vector<Eigen::LLT<RealMatrix>>& chol, const BlockVars& delta) {
  double alpha = std::numeric_limits<double>::infinity();
  for (size_t b = 0; b < delta.mats.size(); ++b) {
    const RealMatrix& l = chol[b].matrixL();
    RealMatrix scaled = l.triangularView<Eigen::Lower>().solve(delta.mats[b]);
    scaled = l.triangularView<Eigen::Lower>()
                 .solve(scaled.transpose())
                 .transpose();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(symmetrized(scaled), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < -1e-14) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

struct CoreResult {
  Vector w;
  double user_obj = 0.0;   // g.w (no constant)
  double user_dual = 0.0;  // -<F0, X>
  double mu = 0.0;
  SdpStatus status = SdpStatus::MaxIter;
  int iterations = 0;
  std::vector<IterationStat> trace;
};

// Infeasible-start Mehrotra predictor-corrector on the pair
//   (P) min <C,X> : <A_j,X> = b_j, X >= 0
//   (D) max b.y   : C - sum_j y_j A_j = S >= 0
// with C = F0, A_j = -F_j, b = -g, y = w, so that S = F0 + sum w_j F_j.
CoreResult core_solve(const Reduced& r, const Tolerances& tol, double obj_const) {
  const Index m = r.g.size();
  const size_t nb = r.f0.size();
  Index n_total = 0;
  for (const auto& f : r.f0) n_total += f.rows();

  CoreResult res;
  if (m == 0) {
    // no free variables: just report the fixed point
    res.w = Vector();
    res.user_obj = 0.0;
    res.user_dual = 0.0;
    res.status = SdpStatus::Optimal;
    for (const auto& f : r.f0) {
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(f, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -tol.sdp_tol) {
        throw SdpInfeasible("sdp: fixed point violates PSD constraint");
      }
    }
    return res;
  }

  const Vector b = -r.g;
  double a_norm_max = 0.0, c_norm = 0.0;
  for (size_t bk = 0; bk < nb; ++bk) {
    c_norm += r.f0[bk].squaredNorm();
    for (Index j = 0; j < m; ++j) a_norm_max = std::max(a_norm_max, r.fj[bk][j].norm());
  }
  c_norm = std::sqrt(c_norm);

  double ratio = 0.0;
  for (Index j = 0; j < m; ++j) {
    double anorm = 0.0;
    for (size_t bk = 0; bk < nb; ++bk) anorm += r.fj[bk][j].squaredNorm();
    ratio = std::max(ratio, (1.0 + std::abs(b(j))) / (1.0 + std::sqrt(anorm)));
  }
  const double xi_p = std::max({10.0, std::sqrt(double(n_total)), double(n_total) * ratio});
  const double xi_d = std::max({10.0, std::sqrt(double(n_total)), a_norm_max, c_norm});

  BlockVars x, s;
  Vector y = Vector::Zero(m);
  for (size_t bk = 0; bk < nb; ++bk) {
    const Index nbk = r.f0[bk].rows();
    x.mats.push_back(xi_p * RealMatrix::Identity(nbk, nbk));
    s.mats.push_back(xi_d * RealMatrix::Identity(nbk, nbk));
  }

  auto apply_adjoint = [&](const Vector& v) {
    // sum_j v_j A_j with A_j = -F_j
    BlockVars out;
    for (size_t bk = 0; bk < nb; ++bk) {
      RealMatrix acc = RealMatrix::Zero(r.f0[bk].rows(), r.f0[bk].cols());
      for (Index j = 0; j < m; ++j) acc -= v(j) * r.fj[bk][j];
      out.mats.push_back(std::move(acc));
    }
    return out;
  };
  auto apply_map = [&](const BlockVars& mats) {
    Vector out(m);
    for (Index j = 0; j < m; ++j) {
      double acc = 0.0;
      for (size_t bk = 0; bk < nb; ++bk) acc -= r.fj[bk][j].cwiseProduct(mats.mats[bk]).sum();
      out(j) = acc;
    }
    return out;
  };

  const double b_scale = 1.0 + b.norm();
  const double c_scale = 1.0 + c_norm;

  for (int iter = 0; iter < tol.sdp_max_iter; ++iter) {
    // residuals
    Vector rp = b - apply_map(x);
    BlockVars rd;
    {
      BlockVars aty = apply_adjoint(y);
      for (size_t bk = 0; bk < nb; ++bk) {
        rd.mats.push_back(r.f0[bk] - s.mats[bk] - aty.mats[bk]);
      }
    }
    const double mu = x.dot(s) / double(n_total);
    const double pobj = -b.dot(y) + obj_const;        // user objective g.w + const
    const double dobj = -x.dot(BlockVars{r.f0}) + obj_const;
    const double pinf = rp.norm() / b_scale;
    double dinf = 0.0;
    for (const auto& mres : rd.mats) dinf = std::max(dinf, mres.norm());
    dinf /= c_scale;
    res.trace.push_back({mu, pinf, dinf, pobj, dobj});

    const double relgap = x.dot(s) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (relgap <= tol.sdp_tol && pinf <= tol.sdp_tol && dinf <= tol.sdp_tol) {
      res.status = SdpStatus::Optimal;
      res.w = y;
      res.user_obj = -b.dot(y);
      res.user_dual = -x.dot(BlockVars{r.f0});
      res.mu = mu;
      res.iterations = iter;
      return res;
    }
    if (x.trace() > kDivergenceFactor * xi_p * double(n_total) ||
        y.norm() > kDivergenceFactor * std::max(1.0, xi_d)) {
      res.status = SdpStatus::Infeasible;
      res.w = y;
      res.user_obj = -b.dot(y);
      res.user_dual = -x.dot(BlockVars{r.f0});
      res.mu = mu;
      res.iterations = iter;
      return res;
    }

    // Nesterov-Todd scaling per block: W S W = X
    std::vector<Eigen::LLT<RealMatrix>> chol_x(nb), chol_s(nb);
    std::vector<RealMatrix> wmat(nb), sinv(nb);
    for (size_t bk = 0; bk < nb; ++bk) {
      chol_x[bk].compute(x.mats[bk]);
      chol_s[bk].compute(s.mats[bk]);
      if (chol_x[bk].info() != Eigen::Success || chol_s[bk].info() != Eigen::Success) {
        throw SolverFailure("sdp: iterate lost positive definiteness");
      }
      const RealMatrix lx = chol_x[bk].matrixL();
      const RealMatrix ls = chol_s[bk].matrixL();
      Eigen::BDCSVD<RealMatrix> svd(ls.transpose() * lx,
                                    Eigen::ComputeFullU | Eigen::ComputeFullV);
      Vector sv_isqrt = svd.singularValues().cwiseSqrt().cwiseInverse();
      const RealMatrix gfac = lx * svd.matrixV() * sv_isqrt.asDiagonal();
      wmat[bk] = gfac * gfac.transpose();
      const Index nbk = s.mats[bk].rows();
      sinv[bk] = chol_s[bk].solve(RealMatrix::Identity(nbk, nbk));
    }

    // Schur complement M_jk = <A_j, W A_k W> (A sign cancels)
    RealMatrix schur(m, m);
    std::vector<std::vector<RealMatrix>> waw(nb);
    for (size_t bk = 0; bk < nb; ++bk) {
      waw[bk].resize(m);
      for (Index j = 0; j < m; ++j) waw[bk][j] = wmat[bk] * r.fj[bk][j] * wmat[bk];
    }
    for (Index j = 0; j < m; ++j) {
      for (Index k = 0; k <= j; ++k) {
        double acc = 0.0;
        for (size_t bk = 0; bk < nb; ++bk) {
          acc += waw[bk][j].cwiseProduct(r.fj[bk][k]).sum();
        }
        schur(j, k) = acc;
        schur(k, j) = acc;
      }
    }

    Eigen::LDLT<RealMatrix> schur_fac(schur);
    double ridge = 0.0;
    while (schur_fac.info() != Eigen::Success || !schur_fac.isPositive()) {
      ridge = ridge == 0.0 ? 1e-14 * (1.0 + schur.trace() / double(m)) : ridge * 100.0;
      if (ridge > 1e-4 * (1.0 + schur.trace() / double(m))) {
        throw SolverFailure("sdp: Schur complement is numerically indefinite");
      }
      schur_fac.compute(schur + ridge * RealMatrix::Identity(m, m));
    }

    auto solve_direction = [&](const BlockVars& rc, Vector& dy, BlockVars& dx, BlockVars& ds) {
      // M dy = rp - A(rc) + A(W Rd W)
      BlockVars wrdw;
      for (size_t bk = 0; bk < nb; ++bk) {
        wrdw.mats.push_back(wmat[bk] * rd.mats[bk] * wmat[bk]);
      }
      Vector rhs = rp - apply_map(rc) + apply_map(wrdw);
      dy = schur_fac.solve(rhs);
      // one step of iterative refinement on the normal equations
      dy += schur_fac.solve(rhs - schur * dy);
      const BlockVars atdy = apply_adjoint(dy);
      ds.mats.clear();
      dx.mats.clear();
      for (size_t bk = 0; bk < nb; ++bk) {
        RealMatrix dsb = rd.mats[bk] - atdy.mats[bk];
        RealMatrix dxb = rc.mats[bk] - wmat[bk] * dsb * wmat[bk];
        ds.mats.push_back(std::move(dsb));
        dx.mats.push_back(symmetrized(dxb));
      }
    };

    // predictor
    BlockVars rc_aff;
    for (size_t bk = 0; bk < nb; ++bk) rc_aff.mats.push_back(-x.mats[bk]);
    Vector dy_aff;
    BlockVars dx_aff, ds_aff;
    solve_direction(rc_aff, dy_aff, dx_aff, ds_aff);

    const double ap_aff = std::min(1.0, 0.98 * max_step(chol_x, dx_aff));
    const double ad_aff = std::min(1.0, 0.98 * max_step(chol_s, ds_aff));
    double mu_aff = 0.0;
    {
      BlockVars xa, sa;
      for (size_t bk = 0; bk < nb; ++bk) {
        xa.mats.push_back(x.mats[bk] + ap_aff * dx_aff.mats[bk]);
        sa.mats.push_back(s.mats[bk] + ad_aff * ds_aff.mats[bk]);
      }
      mu_aff = xa.dot(sa) / double(n_total);
    }
    double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3);
    sigma = std::clamp(sigma, 1e-12, 0.9999);

    // corrector
    BlockVars rc;
    for (size_t bk = 0; bk < nb; ++bk) {
      const RealMatrix t = dx_aff.mats[bk] * ds_aff.mats[bk] * sinv[bk];
      rc.mats.push_back(sigma * mu * sinv[bk] - x.mats[bk] - (t + t.transpose()) / 2.0);
    }
    Vector dy;
    BlockVars dx, ds;
    solve_direction(rc, dy, dx, ds);

    const double gamma = 0.98;
    const double ap = std::min(1.0, gamma * max_step(chol_x, dx));
    const double ad = std::min(1.0, gamma * max_step(chol_s, ds));
    for (size_t bk = 0; bk < nb; ++bk) {
      x.mats[bk] = symmetrized(x.mats[bk] + ap * dx.mats[bk]);
      s.mats[bk] = symmetrized(s.mats[bk] + ad * ds.mats[bk]);
    }
    y += ad * dy;
  }

  res.status = SdpStatus::MaxIter;
  res.w = y;
  res.user_obj = -b.dot(y);
  res.user_dual = -x.dot(BlockVars{r.f0});
  res.mu = x.dot(s) / double(n_total);
  res.iterations = tol.sdp_max_iter;
  return res;
}

}  // namespace

SdpSolution solve(const SdpProblem& p, const Tolerances& tol) {
  validate(p);
  SdpSolution sol;
  Reduced red = reduce(p, tol, sol);

  CoreResult core = core_solve(red, tol, red.obj_const);

  sol.status = core.status;
  sol.iterations = core.iterations;
  sol.trace = std::move(core.trace);
  sol.x = red.x_particular;
  if (core.w.size() > 0) sol.x += red.basis * core.w;
  sol.objective_value = p.c.dot(sol.x);
  sol.dual_value = core.user_dual + red.obj_const;
  sol.gap = sol.objective_value - sol.dual_value;
  return sol;
}

}  // namespace qest::sdp
