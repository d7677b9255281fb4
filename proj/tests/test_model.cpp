#include "qest/model.hpp"

#include "doctest.h"
#include "qest/information.hpp"
#include "qest/zoo.hpp"
#include "test_helpers.hpp"

using namespace qest;
using qest::testing::TestRng;

namespace {

StatisticalModel linear_qubit() {
  StatisticalModel m;
  m.param_dim = 1;
  m.hilbert_dim = 2;
  m.domain = {Interval{0.05, 0.95}};
  m.state = [](const Vector& l) -> Matrix {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = l(0);
    rho(1, 1) = 1.0 - l(0);
    return rho;
  };
  return m;  // finite-difference mode on purpose
}

}  // namespace

TEST_CASE("finite differences recover the exact derivative of a linear model") {
  const StatisticalModel m = linear_qubit();
  Vector l(1);
  l << 0.3;
  const ModelPoint pt = evaluate(m, l);
  Matrix expect(2, 2);
  expect << 1, 0, 0, -1;
  CHECK((pt.drho[0].mat() - expect).norm() < 1e-9);
}

TEST_CASE("phase model derivative matches the generator formula") {
  // rho = e^{-i lambda sz/2} |+><+| e^{+i lambda sz/2}
  Matrix sz(2, 2);
  sz << 1, 0, 0, -1;
  Matrix plus(2, 2);
  plus.setConstant(0.5);
  const StatisticalModel m =
      unitary_family(DensityMatrix(plus), {HermitianOperator(sz / 2.0)});
  Vector l(1);
  l << 0.0;
  const ModelPoint pt = evaluate(m, l);
  const Matrix expect = Complex(0, -0.5) * (sz * plus - plus * sz);
  CHECK((pt.drho[0].mat() - expect).norm() < 1e-12);
}

TEST_CASE("unitary family derivatives agree with finite differences away from zero") {
  TestRng rng(31);
  const Matrix rho0 = qest::testing::random_density(rng, 3);
  std::vector<HermitianOperator> gens;
  gens.emplace_back(qest::testing::random_hermitian(rng, 3));
  gens.emplace_back(qest::testing::random_hermitian(rng, 3));
  StatisticalModel analytic = unitary_family(DensityMatrix(rho0), gens);
  StatisticalModel fd = analytic;
  fd.derivatives.clear();

  Vector l(2);
  l << 0.37, -0.81;
  const ModelPoint pa = evaluate(analytic, l);
  const ModelPoint pf = evaluate(fd, l);
  for (int mu = 0; mu < 2; ++mu) {
    CHECK((pa.drho[mu].mat() - pf.drho[mu].mat()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("multiphase analytic and finite-difference derivatives agree") {
  const ZooEntry zoo = make_model("multiphase:d=2,N=2");
  StatisticalModel fd = zoo.model;
  fd.derivatives.clear();
  TestRng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector l = qest::testing::random_lambda(rng, zoo.model, 0.6);
    const ModelPoint pa = evaluate(zoo.model, l);
    const ModelPoint pf = evaluate(fd, l);
    for (Index mu = 0; mu < 2; ++mu) {
      CHECK((pa.drho[mu].mat() - pf.drho[mu].mat()).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("derivative traces vanish for every zoo model") {
  for (const auto& id : zoo_ids()) {
    const ZooEntry zoo = make_model(id);
    const ModelPoint pt = evaluate(zoo.model, zoo.default_lambda);
    for (const auto& d : pt.drho) {
      CHECK(std::abs(d.mat().trace()) <= 1e-8);
    }
  }
}

TEST_CASE("domain violations raise DomainError") {
  const StatisticalModel m = linear_qubit();
  Vector l(1);
  l << 1.5;
  CHECK_THROWS_AS(evaluate(m, l), DomainError);
}

TEST_CASE("identity reparametrization is a no-op") {
  const ZooEntry zoo = make_model("qubit-tomography");
  Reparametrization re;
  re.map = [](const Vector& l) { return l; };
  re.jacobian = [](const Vector& l) { return RealMatrix::Identity(l.size(), l.size()); };
  re.domain = zoo.model.domain;
  const StatisticalModel back = reparametrize_model(zoo.model, re);
  const ModelPoint p0 = evaluate(zoo.model, zoo.default_lambda);
  const ModelPoint p1 = evaluate(back, zoo.default_lambda);
  CHECK((p0.rho.mat() - p1.rho.mat()).norm() < 1e-14);
  for (Index mu = 0; mu < 3; ++mu) {
    CHECK((p0.drho[mu].mat() - p1.drho[mu].mat()).norm() < 1e-12);
  }
}

TEST_CASE("Q transforms as B Q B^T under reparametrization") {
  // positions (X1, X2) -> (centroid, separation) style linear map on a
  // generic qutrit model
  const StatisticalModel base = qest::testing::random_linear_model(99, 3, 2);
  Reparametrization re;
  RealMatrix jac(2, 2);  // lambda = map(lambda_bar), J(nu,mu) = d lambda_nu / d lbar_mu
  jac << 0.5, 1.0, 0.5, -1.0;
  re.map = [jac](const Vector& lb) -> Vector { return jac * lb; };
  re.jacobian = [jac](const Vector&) { return jac; };
  re.domain.assign(2, Interval{-0.3, 0.3});

  const StatisticalModel reparam = reparametrize_model(base, re);
  Vector lb(2);
  lb << 0.12, -0.2;
  const RealMatrix b = jac.transpose();

  const InfoMatrices direct = qfi_matrices(evaluate(reparam, lb));
  const InfoMatrices orig = qfi_matrices(evaluate(base, jac * lb));
  const RealMatrix expected = b * orig.q * b.transpose();
  CHECK((direct.q - expected).cwiseAbs().maxCoeff() < 1e-8);

  // SLDs transform linearly with the same B
  const SldSet l_orig = compute_sld(evaluate(base, jac * lb));
  const SldSet l_new = compute_sld(evaluate(reparam, lb));
  for (Index mu = 0; mu < 2; ++mu) {
    Matrix combo = Matrix::Zero(3, 3);
    for (Index nu = 0; nu < 2; ++nu) combo += b(mu, nu) * l_orig.operators[nu].mat();
    CHECK((l_new.operators[mu].mat() - combo).norm() < 1e-8);
  }
}

TEST_CASE("doubling the parameter scale quarters the information") {
  // lambda_bar = 2 lambda, so the map back is lambda = lambda_bar / 2
  const ZooEntry zoo = make_model("classical-qubit");
  Reparametrization re;
  re.map = [](const Vector& lb) -> Vector { return 0.5 * lb; };
  re.jacobian = [](const Vector&) {
    RealMatrix j(1, 1);
    j << 0.5;
    return j;
  };
  re.domain = {Interval{0.1, 1.9}};
  const StatisticalModel scaled = reparametrize_model(zoo.model, re);
  Vector lb(1);
  lb << 0.6;
  const InfoMatrices qs = qfi_matrices(evaluate(scaled, lb));
  const InfoMatrices q0 = qfi_matrices(evaluate(zoo.model, 0.5 * lb));
  CHECK(qs.q(0, 0) == doctest::Approx(q0.q(0, 0) / 4.0).epsilon(1e-10));
}

TEST_CASE("singular reparametrization jacobian is rejected") {
  const StatisticalModel base = qest::testing::random_linear_model(7, 2, 2);
  Reparametrization re;
  re.map = [](const Vector& lb) -> Vector { return lb; };
  re.jacobian = [](const Vector&) { return RealMatrix::Zero(2, 2); };
  re.domain.assign(2, Interval{-0.3, 0.3});
  const StatisticalModel bad = reparametrize_model(base, re);
  Vector lb = Vector::Zero(2);
  CHECK_THROWS_AS(evaluate(bad, lb), SingularJacobian);
}
