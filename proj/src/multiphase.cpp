#include "qest/multiphase.hpp"

#include <cmath>

#include "qest/bounds.hpp"
#include "qest/information.hpp"

namespace qest {

MultiphaseProbe optimal_probe(int d, int n_photons) {
  if (d < 1) throw DomainError("optimal_probe: d must be >= 1");
  if (n_photons < 1) throw DomainError("optimal_probe: N must be >= 1");
  MultiphaseProbe p;
  p.d = d;
  p.n_photons = n_photons;
  p.beta2 = 1.0 / (1.0 + std::sqrt(double(d)));
  p.alpha2 = (1.0 - p.beta2) / d;
  p.amplitudes.resize(d + 1);
  p.amplitudes(0) = std::sqrt(p.beta2);
  for (int i = 1; i <= d; ++i) p.amplitudes(i) = std::sqrt(p.alpha2);
  return p;
}

StatisticalModel build_multiphase_model(const MultiphaseProbe& probe) {
  const int d = probe.d;
  const int nph = probe.n_photons;
  if (probe.amplitudes.size() != d + 1) {
    throw DomainError("build_multiphase_model: amplitude vector must have d+1 entries");
  }
  if (std::abs(probe.beta2 + d * probe.alpha2 - 1.0) > 1e-12) {
    throw DomainError("build_multiphase_model: probe is not normalized");
  }
  const Vector amps = probe.amplitudes;

  auto state_vector = [amps, d, nph](const Vector& lambda) {
    ComplexVector psi(d + 1);
    psi(0) = amps(0);
    for (int i = 1; i <= d; ++i) {
      psi(i) = amps(i) * std::exp(Complex(0.0, nph * lambda(i - 1)));
    }
    return psi;
  };

  StatisticalModel m;
  m.param_dim = d;
  m.hilbert_dim = d + 1;
  m.domain.assign(d, Interval{-M_PI / nph, M_PI / nph});
  m.name = "multiphase";
  m.state = [state_vector](const Vector& lambda) -> Matrix {
    const ComplexVector psi = state_vector(lambda);
    return psi * psi.adjoint();
  };
  for (int mu = 0; mu < d; ++mu) {
    m.derivatives.push_back([state_vector, mu, nph](const Vector& lambda) -> Matrix {
      const ComplexVector psi = state_vector(lambda);
      ComplexVector dpsi = ComplexVector::Zero(psi.size());
      dpsi(mu + 1) = Complex(0.0, double(nph)) * psi(mu + 1);
      return dpsi * psi.adjoint() + psi * dpsi.adjoint();
    });
  }
  return m;
}

double total_variance_bound(const MultiphaseProbe& probe, const Tolerances& tol) {
  if (probe.alpha2 < 1e-14 || probe.beta2 < 1e-14) {
    throw SingularQfi("total_variance_bound: degenerate probe weights");
  }
  const StatisticalModel m = build_multiphase_model(probe);
  Vector lambda(probe.d);
  for (int i = 0; i < probe.d; ++i) {
    lambda(i) = (0.15 + 0.08 * i) / double(std::max(1, probe.n_photons));
  }
  const ModelPoint pt = evaluate(m, lambda, tol);
  const InfoMatrices info = qfi_matrices(pt, tol);
  return scalar_sld_bound(info.q, WeightMatrix::identity(probe.d), tol);
}

double total_variance_formula(int d, int n_photons) {
  const double rd = std::sqrt(double(d));
  return (1.0 + rd) * (1.0 + rd) * d / (4.0 * double(n_photons) * double(n_photons));
}

double independent_strategy_variance(int d, int n_photons) {
  return double(d) * double(d) * double(d) / (double(n_photons) * double(n_photons));
}

}  // namespace qest
