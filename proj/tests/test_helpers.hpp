#pragma once

#include <cstdint>

#include "qest/model.hpp"

namespace qest::testing {

// deterministic pseudo-random doubles for test fixtures
class TestRng {
 public:
  explicit TestRng(uint64_t seed) : state_(seed) {}
  double uniform() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }
  double symmetric() { return 2.0 * uniform() - 1.0; }

 private:
  uint64_t state_;
};

inline Matrix random_hermitian(TestRng& rng, Index n) {
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = Complex(rng.symmetric(), rng.symmetric());
  }
  return ((a + a.adjoint()) / 2.0).eval();
}

inline Matrix random_density(TestRng& rng, Index n, double mix_floor = 0.05) {
  const Matrix h = random_hermitian(rng, n);
  Matrix rho = h * h.adjoint() + mix_floor * double(n) * Matrix::Identity(n, n);
  rho /= rho.trace().real();
  return rho;
}

// full-rank linear family rho0 + sum lambda_mu Delta_mu with traceless
// generators scaled to keep the state PD on the declared box
inline StatisticalModel random_linear_model(uint64_t seed, Index n, int d,
                                            double box_halfwidth = 0.5) {
  TestRng rng(seed);
  const Matrix rho0 = random_density(rng, n, 0.25);
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho0, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();

  std::vector<Matrix> deltas;
  for (int mu = 0; mu < d; ++mu) {
    Matrix g = random_hermitian(rng, n);
    g -= (g.trace() / double(n)) * Matrix::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<Matrix> ges(g, Eigen::EigenvaluesOnly);
    const double spec = ges.eigenvalues().cwiseAbs().maxCoeff();
    deltas.push_back(g * (0.8 * lmin / (spec * d * box_halfwidth)));
  }

  StatisticalModel m;
  m.param_dim = d;
  m.hilbert_dim = static_cast<int>(n);
  m.domain.assign(d, Interval{-box_halfwidth, box_halfwidth});
  m.name = "random-linear";
  m.state = [rho0, deltas](const Vector& l) -> Matrix {
    Matrix rho = rho0;
    for (size_t mu = 0; mu < deltas.size(); ++mu) rho += l(static_cast<Index>(mu)) * deltas[mu];
    return rho;
  };
  for (int mu = 0; mu < d; ++mu) {
    m.derivatives.push_back([deltas, mu](const Vector&) { return deltas[mu]; });
  }
  return m;
}

inline Vector random_lambda(TestRng& rng, const StatisticalModel& m, double shrink = 0.8) {
  Vector l(m.param_dim);
  for (int mu = 0; mu < m.param_dim; ++mu) {
    const auto& iv = m.domain[mu];
    const double mid = (iv.lo + iv.hi) / 2.0;
    const double half = (iv.hi - iv.lo) / 2.0 * shrink;
    l(mu) = mid + half * rng.symmetric();
  }
  return l;
}

}  // namespace qest::testing
