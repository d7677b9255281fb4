#include "qest/operators.hpp"

#include "doctest.h"
#include "test_helpers.hpp"

using namespace qest;
using qest::testing::TestRng;
using qest::testing::random_hermitian;
using qest::testing::random_density;

TEST_CASE("eig_hermitian basic spectra") {
  const HermitianOperator id2(Matrix::Identity(2, 2));
  const EigDecomposition e1 = eig_hermitian(id2);
  CHECK(e1.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(e1.eigenvalues(1) == doctest::Approx(1.0));

  Matrix sz(2, 2);
  sz << 1, 0, 0, -1;
  const EigDecomposition e2 = eig_hermitian(HermitianOperator(sz));
  CHECK(e2.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(e2.eigenvalues(1) == doctest::Approx(1.0));
}

TEST_CASE("eig_hermitian reconstruction and unitarity on random input") {
  TestRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_hermitian(rng, 5);
    const EigDecomposition e = eig_hermitian(HermitianOperator(a));
    const Matrix rebuilt =
        e.eigenvectors * e.eigenvalues.cast<Complex>().asDiagonal() * e.eigenvectors.adjoint();
    CHECK((rebuilt - a).norm() <= 1e-10 * a.norm());
    CHECK((e.eigenvectors.adjoint() * e.eigenvectors - Matrix::Identity(5, 5)).norm() <=
          1e-12 * 5);
    for (Index i = 1; i < 5; ++i) CHECK(e.eigenvalues(i) >= e.eigenvalues(i - 1));
  }
}

TEST_CASE("non-Hermitian input is rejected") {
  Matrix bad(2, 2);
  bad << 1.0, 2.0, 3.0, 4.0;
  CHECK_THROWS_AS(HermitianOperator{bad}, NonHermitianInput);
}

TEST_CASE("lyapunov_solve diagonal case") {
  Matrix rho(2, 2);
  rho << 0.3, 0, 0, 0.7;
  Matrix b(2, 2);
  b << 1, 0, 0, -1;
  const DensityMatrix dm(rho);
  const HermitianOperator x = lyapunov_solve(dm, HermitianOperator(b), default_cutoff(dm));
  CHECK(x.mat()(0, 0).real() == doctest::Approx(1.0 / 0.3));
  CHECK(x.mat()(1, 1).real() == doctest::Approx(-1.0 / 0.7));
  CHECK(std::abs(x.mat()(0, 1)) < 1e-14);
}

TEST_CASE("lyapunov_solve pure-state projector identity") {
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1.0;
  Matrix b(2, 2);
  b << 0, 1, 1, 0;
  const DensityMatrix dm(rho);
  const HermitianOperator x = lyapunov_solve(dm, HermitianOperator(b), default_cutoff(dm));
  // (X rho + rho X)/2 = B has solution X = 2B when rho is the projector and
  // B is purely off-diagonal in the support split
  CHECK((x.mat() - 2.0 * b).norm() < 1e-12);
  const Matrix resid = (x.mat() * rho + rho * x.mat()) / 2.0 - b;
  CHECK(resid.norm() < 1e-12);
}

TEST_CASE("lyapunov_solve substitution oracle on random full-rank input") {
  TestRng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.uniform() * 7);  // dims <= 8
    const DensityMatrix rho(random_density(rng, n));
    const HermitianOperator b(random_hermitian(rng, n));
    const HermitianOperator x = lyapunov_solve(rho, b, default_cutoff(rho));
    const Matrix resid = (x.mat() * rho.mat() + rho.mat() * x.mat()) / 2.0 - b.mat();
    CHECK(resid.norm() <= 1e-10 * std::max(1.0, b.mat().norm()));
  }
}

TEST_CASE("lyapunov_solve rejects rhs outside the support") {
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1.0;
  Matrix b(2, 2);
  b << 0, 0, 0, 1;  // weight only on the kernel block
  const DensityMatrix dm(rho);
  CHECK_THROWS_AS(lyapunov_solve(dm, HermitianOperator(b), default_cutoff(dm)), InconsistentRhs);
}

TEST_CASE("anticommutator_inverse_apply identities") {
  TestRng rng(5);
  const DensityMatrix rho(random_density(rng, 4));

  SUBCASE("B = 2 rho gives Y = I on the support") {
    const Matrix y = anticommutator_inverse_apply(rho, 2.0 * rho.mat(), default_cutoff(rho));
    CHECK((y - Matrix::Identity(4, 4)).norm() < 1e-10);
  }
  SUBCASE("commuting X gives zero commutator image") {
    // X = rho^2 commutes with rho
    const Matrix x = rho.mat() * rho.mat();
    const Matrix b = Complex(0, -1) * (rho.mat() * x - x * rho.mat());
    const Matrix y = anticommutator_inverse_apply(rho, b, default_cutoff(rho));
    CHECK(y.norm() < 1e-12);
  }
  SUBCASE("substitution residual on random full-rank case") {
    for (int trial = 0; trial < 50; ++trial) {
      Matrix b(4, 4);
      for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) b(i, j) = Complex(rng.symmetric(), rng.symmetric());
      const Matrix y = anticommutator_inverse_apply(rho, b, default_cutoff(rho));
      CHECK((rho.mat() * y + y * rho.mat() - b).norm() <= 1e-10 * b.norm());
    }
  }
}

TEST_CASE("trace_norm") {
  Matrix d(2, 2);
  d << 3, 0, 0, -4;
  CHECK(trace_norm(d) == doctest::Approx(7.0));

  TestRng rng(7);
  SUBCASE("rank-1 outer product of unit vectors") {
    ComplexVector u(3), v(3);
    for (Index i = 0; i < 3; ++i) {
      u(i) = Complex(rng.symmetric(), rng.symmetric());
      v(i) = Complex(rng.symmetric(), rng.symmetric());
    }
    u.normalize();
    v.normalize();
    CHECK(trace_norm(u * v.adjoint()) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("matches eigenvalue oracle for Hermitian input") {
    // independent decomposition route: sum |eigenvalues| for Hermitian A
    for (int trial = 0; trial < 25; ++trial) {
      const Matrix a = random_hermitian(rng, 6);
      Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
      CHECK(trace_norm(a) == doctest::Approx(es.eigenvalues().cwiseAbs().sum()).epsilon(1e-10));
    }
  }
  SUBCASE("norm axioms on random triples") {
    for (int trial = 0; trial < 30; ++trial) {
      const Matrix a = random_hermitian(rng, 4);
      const Matrix b = random_hermitian(rng, 4);
      const double s = 3.0 * rng.symmetric();
      CHECK(trace_norm(a) >= 0.0);
      CHECK(trace_norm(s * a) == doctest::Approx(std::abs(s) * trace_norm(a)).epsilon(1e-10));
      CHECK(trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-10);
    }
  }
}

TEST_CASE("complex_to_real_embed") {
  SUBCASE("real symmetric input gives block diagonal") {
    Matrix a(2, 2);
    a << 1.0, 0.5, 0.5, -2.0;
    const RealMatrix e = complex_to_real_embed(a);
    CHECK((e.topLeftCorner(2, 2) - a.real()).norm() == 0.0);
    CHECK(e.topRightCorner(2, 2).norm() == 0.0);
  }
  SUBCASE("pauli-y spectrum doubled") {
    Matrix sy(2, 2);
    sy << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(complex_to_real_embed(sy));
    CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()(1) == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()(2) == doctest::Approx(1.0));
    CHECK(es.eigenvalues()(3) == doctest::Approx(1.0));
  }
  SUBCASE("eigenvalue multiset doubled and PSD preserved both ways") {
    TestRng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix a = random_hermitian(rng, 4);
      Eigen::SelfAdjointEigenSolver<Matrix> ec(a, Eigen::EigenvaluesOnly);
      Eigen::SelfAdjointEigenSolver<RealMatrix> er(complex_to_real_embed(a));
      for (Index i = 0; i < 4; ++i) {
        CHECK(er.eigenvalues()(2 * i) == doctest::Approx(ec.eigenvalues()(i)).epsilon(1e-10));
        CHECK(er.eigenvalues()(2 * i + 1) == doctest::Approx(ec.eigenvalues()(i)).epsilon(1e-10));
      }
      const double shift = ec.eigenvalues().minCoeff();
      const Matrix psd = a - (shift - 0.1) * Matrix::Identity(4, 4);
      Eigen::SelfAdjointEigenSolver<RealMatrix> ep(complex_to_real_embed(psd));
      CHECK(ep.eigenvalues().minCoeff() >= -1e-12);
    }
  }
}
