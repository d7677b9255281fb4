#include "qest/model.hpp"

#include <sstream>

namespace qest {

namespace {

void check_domain(const StatisticalModel& model, const Vector& lambda) {
  if (lambda.size() != model.param_dim) {
    std::ostringstream os;
    os << "evaluate: lambda has dimension " << lambda.size() << ", model expects "
       << model.param_dim;
    throw DomainError(os.str());
  }
  for (int mu = 0; mu < model.param_dim; ++mu) {
    if (mu < static_cast<int>(model.domain.size()) && !model.domain[mu].contains(lambda(mu))) {
      std::ostringstream os;
      os << "evaluate: lambda[" << mu << "] = " << lambda(mu) << " outside ["
         << model.domain[mu].lo << ", " << model.domain[mu].hi << "]";
      throw DomainError(os.str());
    }
  }
}

// central difference of the state along coordinate mu, step h
Matrix central_diff(const StatisticalModel& model, const Vector& lambda, int mu, double h) {
  Vector lp = lambda, lm = lambda;
  lp(mu) += h;
  lm(mu) -= h;
  Matrix sp, sm;
  try {
    sp = model.state(lp);
    sm = model.state(lm);
  } catch (const Error& e) {
    throw DerivativeError(std::string("finite difference probe failed: ") + e.what());
  }
  return (sp - sm) / (2.0 * h);
}

}  // namespace

ModelPoint evaluate(const StatisticalModel& model, const Vector& lambda, const Tolerances& tol) {
  check_domain(model, lambda);
  DensityMatrix rho(model.state(lambda), tol);

  std::vector<HermitianOperator> drho;
  drho.reserve(model.param_dim);
  const bool analytic = !model.derivatives.empty();
  if (analytic && static_cast<int>(model.derivatives.size()) != model.param_dim) {
    throw DerivativeError("evaluate: derivative callback count does not match param_dim");
  }
  if (!analytic && model.local_frame) {
    throw DerivativeError(
        "evaluate: finite differences are meaningless for a local-frame model");
  }

  for (int mu = 0; mu < model.param_dim; ++mu) {
    Matrix d;
    if (analytic) {
      d = model.derivatives[mu](lambda);
    } else {
      const double h = model.fd_step * (1.0 + std::abs(lambda(mu)));
      // one Richardson level: (4 D(h/2) - D(h)) / 3, O(h^4) error
      const Matrix coarse = central_diff(model, lambda, mu, h);
      const Matrix fine = central_diff(model, lambda, mu, h / 2.0);
      d = (4.0 * fine - coarse) / 3.0;
      d = ((d + d.adjoint()) / 2.0).eval();  // strip asymmetric rounding noise
    }
    HermitianOperator op(std::move(d), tol);
    const double tr = std::abs(op.mat().trace());
    if (tr > tol.derivative_trace) {
      std::ostringstream os;
      os << "evaluate: derivative " << mu << " has |trace| = " << tr;
      throw DerivativeError(os.str());
    }
    drho.push_back(std::move(op));
  }
  return ModelPoint{lambda, std::move(rho), std::move(drho)};
}

StatisticalModel reparametrize_model(const StatisticalModel& model, const Reparametrization& re,
                                     const Tolerances& tol) {
  StatisticalModel out;
  out.param_dim = model.param_dim;
  out.hilbert_dim = model.hilbert_dim;
  out.domain = re.domain;
  out.local_frame = model.local_frame;
  out.fd_step = model.fd_step;
  out.name = model.name + "/reparametrized";

  const auto map = re.map;
  const auto jac = re.jacobian;
  const double det_floor = tol.jacobian_det_floor;
  const StatisticalModel base = model;  // value copy keeps the closure self-contained

  out.state = [base, map](const Vector& lb) { return base.state(map(lb)); };

  for (int mu = 0; mu < model.param_dim; ++mu) {
    out.derivatives.push_back([base, map, jac, det_floor, mu](const Vector& lb) -> Matrix {
      const RealMatrix j = jac(lb);
      if (std::abs(j.determinant()) < det_floor) {
        throw SingularJacobian("reparametrize_model: |det B| below floor");
      }
      const RealMatrix b = j.transpose();  // B_{mu nu} = d lambda_nu / d lambda_bar_mu
      const ModelPoint pt = evaluate(base, map(lb));
      Matrix d = Matrix::Zero(pt.hilbert_dim(), pt.hilbert_dim());
      for (Index nu = 0; nu < pt.param_dim(); ++nu) {
        d += b(mu, nu) * pt.drho[nu].mat();
      }
      return d;
    });
  }
  return out;
}

namespace {

// d/dt exp(-i(H + tG))|_0 in H's eigenbasis: entry (j,k) multiplies
// G_jk by the first divided difference of e^{-ix} at (h_j, h_k),
// continued as -i e^{-i h} on the diagonal (Daleckii-Krein).
Complex exp_divided_difference(double hj, double hk) {
  const double delta = hj - hk;
  const Complex i(0.0, 1.0);
  if (std::abs(delta) < 1e-7) {
    const double mid = (hj + hk) / 2.0;
    return -i * std::exp(-i * mid) * (1.0 - delta * delta / 24.0);
  }
  return (std::exp(Complex(0.0, -hj)) - std::exp(Complex(0.0, -hk))) / delta;
}

}  // namespace

StatisticalModel unitary_family(const DensityMatrix& rho0,
                                const std::vector<HermitianOperator>& generators,
                                std::vector<Interval> domain) {
  const int d = static_cast<int>(generators.size());
  const Index n = rho0.dim();
  for (const auto& g : generators) {
    if (g.dim() != n) throw DomainError("unitary_family: generator dimension mismatch");
  }
  StatisticalModel m;
  m.param_dim = d;
  m.hilbert_dim = static_cast<int>(n);
  m.domain = domain.empty() ? std::vector<Interval>(d, Interval{-10.0, 10.0}) : std::move(domain);
  m.name = "unitary-family";

  const Matrix rho_mat = rho0.mat();
  std::vector<Matrix> gs;
  gs.reserve(d);
  for (const auto& g : generators) gs.push_back(g.mat());

  auto hamiltonian = [gs, n](const Vector& lambda) {
    Matrix h = Matrix::Zero(n, n);
    for (size_t mu = 0; mu < gs.size(); ++mu) h += lambda(static_cast<Index>(mu)) * gs[mu];
    return h;
  };

  m.state = [rho_mat, hamiltonian](const Vector& lambda) -> Matrix {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian(lambda));
    ComplexVector phase = (Complex(0.0, -1.0) * es.eigenvalues().cast<Complex>()).array().exp();
    const Matrix u = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    return u * rho_mat * u.adjoint();
  };

  for (int mu = 0; mu < d; ++mu) {
    m.derivatives.push_back([rho_mat, hamiltonian, gs, mu, n](const Vector& lambda) -> Matrix {
      Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian(lambda));
      const Matrix& v = es.eigenvectors();
      const Vector& h = es.eigenvalues();
      ComplexVector phase = (Complex(0.0, -1.0) * h.cast<Complex>()).array().exp();
      const Matrix u = v * phase.asDiagonal() * v.adjoint();
      const Matrix gtil = v.adjoint() * gs[mu] * v;
      Matrix dut = Matrix::Zero(n, n);
      for (Index j = 0; j < n; ++j) {
        for (Index k = 0; k < n; ++k) {
          dut(j, k) = gtil(j, k) * exp_divided_difference(h(j), h(k));
        }
      }
      const Matrix du = v * dut * v.adjoint();
      const Matrix term = du * rho_mat * u.adjoint();
      return term + term.adjoint();
    });
  }
  return m;
}

}  // namespace qest
