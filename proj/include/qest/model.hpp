#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qest/operators.hpp"

namespace qest {

struct Interval {
  double lo = -1e300;
  double hi = 1e300;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// State plus all parameter derivatives at one point.
struct ModelPoint {
  Vector lambda;
  DensityMatrix rho;
  std::vector<HermitianOperator> drho;

  Index param_dim() const { return static_cast<Index>(drho.size()); }
  Index hilbert_dim() const { return rho.dim(); }
};

using StateFn = std::function<Matrix(const Vector&)>;

/// Parametric family of density matrices.  Derivatives come from analytic
/// callbacks when provided, otherwise from guarded central differences.
///
/// A model flagged local_frame uses a lambda-dependent internal basis (the
/// imaging scenes do); per-point quantities are fine but operators at two
/// different lambda must not be compared directly.  Such models provide
/// fixed_frame to re-express a finite set of points in one shared basis.
struct StatisticalModel {
  int param_dim = 0;
  int hilbert_dim = 0;
  std::vector<Interval> domain;
  StateFn state;
  std::vector<StateFn> derivatives;  // empty => finite differences
  double fd_step = 1e-5;
  bool local_frame = false;
  std::function<StatisticalModel(const std::vector<Vector>&)> fixed_frame;
  std::string name;
};

/// Evaluates state and derivatives; finite differences use per-parameter
/// steps h_mu = h0 (1 + |lambda_mu|) with one Richardson level.
ModelPoint evaluate(const StatisticalModel& model, const Vector& lambda,
                    const Tolerances& tol = default_tolerances());

/// Smooth invertible map lambda_bar -> lambda together with its Jacobian
/// J(lambda_bar) with entries J(nu, mu) = d lambda_nu / d lambda_bar_mu.
struct Reparametrization {
  std::function<Vector(const Vector&)> map;
  std::function<RealMatrix(const Vector&)> jacobian;
  std::vector<Interval> domain;  // in the new parameters
};

/// New model over lambda_bar; derivative lists transform with B = J^T,
/// i.e. drho_bar_mu = sum_nu B(mu, nu) drho_nu.
StatisticalModel reparametrize_model(const StatisticalModel& model, const Reparametrization& re,
                                     const Tolerances& tol = default_tolerances());

/// rho(lambda) = U rho0 U^dag with U = exp(-i sum_mu lambda_mu G_mu).
/// Derivatives are exact (eigenbasis Frechet formula), no finite differences.
StatisticalModel unitary_family(const DensityMatrix& rho0,
                                const std::vector<HermitianOperator>& generators,
                                std::vector<Interval> domain = {});

}  // namespace qest
