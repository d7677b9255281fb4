#pragma once

#include <vector>

#include "qest/errors.hpp"
#include "qest/tolerances.hpp"
#include "qest/types.hpp"

namespace qest::sdp {

/// One PSD constraint block A0 + sum_i x_i Ai >= 0 (real symmetric).
struct Block {
  RealMatrix a0;
  std::vector<RealMatrix> coeff;  // one symmetric matrix per scalar variable
};

/// min c.x  subject to every block PSD and (optionally) E x = f.
struct SdpProblem {
  Vector c;
  std::vector<Block> blocks;
  RealMatrix eq_lhs;  // 0 x m when absent
  Vector eq_rhs;
};

enum class SdpStatus { Optimal, MaxIter, Infeasible };

struct IterationStat {
  double mu;
  double primal_infeasibility;
  double dual_infeasibility;
  double objective;       // c.x at the iterate
  double dual_objective;  // conic lower bound at the iterate
};

struct SdpSolution {
  Vector x;
  double objective_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  SdpStatus status = SdpStatus::MaxIter;
  int iterations = 0;
  std::vector<IterationStat> trace;
};

/// Primal-dual path-following (Nesterov-Todd scaling, Mehrotra
/// predictor-corrector, dense Cholesky normal equations).  Deterministic:
/// the same problem yields bit-identical output.
SdpSolution solve(const SdpProblem& p, const Tolerances& tol = default_tolerances());

}  // namespace qest::sdp
