#include "qest/sdp.hpp"

#include <cmath>

#include "doctest.h"
#include "qest/operators.hpp"
#include "test_helpers.hpp"

using namespace qest;
using namespace qest::sdp;
using qest::testing::TestRng;
using qest::testing::random_hermitian;

namespace {

// min Tr[U] over real symmetric U >= Z for fixed Hermitian Z (embedded);
// optimum is Tr[Re Z] + ||Im Z||_1
SdpProblem min_trace_over_fixed_z(const Matrix& z) {
  const Index d = z.rows();
  const Index m = d * (d + 1) / 2;
  SdpProblem p;
  p.c = Vector::Zero(m);
  Block blk;
  blk.a0 = complex_to_real_embed(-z);
  Index var = 0;
  for (Index a = 0; a < d; ++a) {
    for (Index b = a; b < d; ++b) {
      Matrix e = Matrix::Zero(d, d);
      e(a, b) = 1.0;
      e(b, a) = 1.0;
      blk.coeff.push_back(complex_to_real_embed(e));
      p.c(var++) = (a == b) ? 1.0 : 0.0;
    }
  }
  p.blocks.push_back(std::move(blk));
  return p;
}

}  // namespace

TEST_CASE("scalar bound: min x with x - 1 >= 0") {
  SdpProblem p;
  p.c = Vector::Ones(1);
  Block blk;
  blk.a0 = -RealMatrix::Ones(1, 1);
  blk.coeff.push_back(RealMatrix::Ones(1, 1));
  p.blocks.push_back(blk);
  const SdpSolution sol = solve(p);
  CHECK(sol.status == SdpStatus::Optimal);
  CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(std::abs(sol.gap) <= 1e-7 * (1.0 + std::abs(sol.objective_value)));
}

TEST_CASE("two-block problem with equality constraint") {
  // min x0 + x1 s.t. x0 >= 2, x1 >= 1, x0 + x1 = 4  ->  objective 4
  SdpProblem p;
  p.c = Vector::Ones(2);
  for (int i = 0; i < 2; ++i) {
    Block blk;
    blk.a0 = -RealMatrix::Ones(1, 1) * (i == 0 ? 2.0 : 1.0);
    blk.coeff.assign(2, RealMatrix::Zero(1, 1));
    blk.coeff[i] = RealMatrix::Ones(1, 1);
    p.blocks.push_back(blk);
  }
  p.eq_lhs = RealMatrix::Ones(1, 2);
  p.eq_rhs = Vector::Ones(1) * 4.0;
  const SdpSolution sol = solve(p);
  CHECK(sol.status == SdpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(4.0).epsilon(1e-7));
}

TEST_CASE("fixed-Z inner problem matches the eigen-decomposition oracle") {
  TestRng rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    const Index d = 2 + (trial % 3);
    const Matrix z = random_hermitian(rng, d);
    const SdpProblem p = min_trace_over_fixed_z(z);
    const SdpSolution sol = solve(p);
    CHECK(sol.status == SdpStatus::Optimal);
    const double expect = z.real().trace() + trace_norm(z.imag().cast<Complex>());
    CHECK(sol.objective_value == doctest::Approx(expect).epsilon(1e-7));
    CHECK(std::abs(sol.gap) <= 1e-7 * (1.0 + std::abs(sol.objective_value)));
  }
}

TEST_CASE("random strictly feasible problems: duality bracket and PSD blocks") {
  TestRng rng(57);
  for (int trial = 0; trial < 12; ++trial) {
    const Index n = 3 + (trial % 3);
    const Index m = 4 + (trial % 4);
    SdpProblem p;
    p.c.resize(m);
    Block blk;
    for (Index j = 0; j < m; ++j) {
      RealMatrix a(n, n);
      for (Index r = 0; r < n; ++r)
        for (Index s = 0; s < n; ++s) a(r, s) = rng.symmetric();
      a = ((a + a.transpose()) / 2.0).eval();
      blk.coeff.push_back(a);
    }
    // x = 0 strictly feasible; c near A(I) keeps the problem bounded with an
    // interior dual point
    blk.a0 = RealMatrix::Identity(n, n);
    for (Index j = 0; j < m; ++j) p.c(j) = blk.coeff[j].trace() + 0.05 * rng.symmetric();
    p.blocks.push_back(blk);

    const SdpSolution sol = solve(p);
    REQUIRE(sol.status == SdpStatus::Optimal);
    CHECK(sol.dual_value <= sol.objective_value + 1e-9 * (1.0 + std::abs(sol.objective_value)));
    CHECK(std::abs(sol.gap) <= 1e-7 * (1.0 + std::abs(sol.objective_value)));

    RealMatrix zmat = p.blocks[0].a0;
    for (Index j = 0; j < m; ++j) zmat += sol.x(j) * p.blocks[0].coeff[j];
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(zmat, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("weak duality along the iterate trace") {
  TestRng rng(3);
  const Matrix z = random_hermitian(rng, 3);
  const SdpSolution sol = solve(min_trace_over_fixed_z(z));
  REQUIRE(sol.status == SdpStatus::Optimal);
  REQUIRE(!sol.trace.empty());
  // once an iterate is feasible to tolerance its conic dual value must
  // lower-bound the primal objective
  for (const auto& it : sol.trace) {
    if (it.primal_infeasibility < 1e-9 && it.dual_infeasibility < 1e-9) {
      CHECK(it.dual_objective <= it.objective + 1e-9 * (1.0 + std::abs(it.objective)));
    }
  }
  CHECK(sol.trace.back().dual_objective <=
        sol.trace.back().objective + 1e-9 * (1.0 + std::abs(sol.objective_value)));
}

TEST_CASE("determinism: identical problems give bit-identical output") {
  TestRng rng(77);
  const Matrix z = random_hermitian(rng, 4);
  const SdpProblem p = min_trace_over_fixed_z(z);
  const SdpSolution a = solve(p);
  const SdpSolution b = solve(p);
  REQUIRE(a.x.size() == b.x.size());
  for (Index i = 0; i < a.x.size(); ++i) CHECK(a.x(i) == b.x(i));
  CHECK(a.objective_value == b.objective_value);
  CHECK(a.dual_value == b.dual_value);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("infeasible problem is detected") {
  // x >= 1 and -x >= 0 simultaneously
  SdpProblem p;
  p.c = Vector::Ones(1);
  Block b1;
  b1.a0 = -RealMatrix::Ones(1, 1);
  b1.coeff.push_back(RealMatrix::Ones(1, 1));
  Block b2;
  b2.a0 = RealMatrix::Zero(1, 1);
  b2.coeff.push_back(-RealMatrix::Ones(1, 1));
  p.blocks.push_back(b1);
  p.blocks.push_back(b2);
  const SdpSolution sol = solve(p);
  CHECK(sol.status == SdpStatus::Infeasible);
}

TEST_CASE("unbounded objective along a null direction is flagged") {
  // second variable never enters the constraints but improves the objective
  SdpProblem p;
  p.c = Vector(2);
  p.c << 1.0, 1.0;
  Block blk;
  blk.a0 = -RealMatrix::Ones(1, 1);
  blk.coeff.push_back(RealMatrix::Ones(1, 1));
  blk.coeff.push_back(RealMatrix::Zero(1, 1));
  p.blocks.push_back(blk);
  CHECK_THROWS_AS(solve(p), SdpInfeasible);
}

TEST_CASE("inconsistent equalities are rejected") {
  SdpProblem p;
  p.c = Vector::Ones(1);
  Block blk;
  blk.a0 = RealMatrix::Ones(1, 1);
  blk.coeff.push_back(RealMatrix::Ones(1, 1));
  p.blocks.push_back(blk);
  p.eq_lhs = RealMatrix::Zero(2, 1);
  p.eq_lhs << 1.0, 1.0;
  p.eq_rhs = Vector(2);
  p.eq_rhs << 1.0, 2.0;
  CHECK_THROWS_AS(solve(p), SdpInfeasible);
}
