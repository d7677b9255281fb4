#pragma once

#include <vector>

#include "qest/information.hpp"

namespace qest {

/// Numeric verdicts for the four model classes, at the tested points only.
/// classical => quasi_classical, d_invariant, asymptotically_classical;
/// quasi_classical => asymptotically_classical.
struct ClassificationReport {
  bool classical = false;
  bool quasi_classical = false;
  bool d_invariant = false;
  bool asymptotically_classical = false;

  /// The state is rank-deficient somewhere; SLD commutators then depend on
  /// the gauge of the off-support blocks (zero-completed here).
  bool rank_deficient = false;
  /// SLDs commute when restricted to the state's support (informational
  /// only; no attainability claim).
  bool partial_commutativity = false;

  struct Witnesses {
    double classical_residual = 0.0;
    double quasi_residual = 0.0;
    double d_invariant_residual = 0.0;
    double weak_commutativity_residual = 0.0;
  } witnesses;
};

ClassificationReport classify(const StatisticalModel& model, const std::vector<Vector>& sample_points,
                              const Tolerances& tol = default_tolerances());

}  // namespace qest
