#pragma once

#include "qest/model.hpp"

namespace qest {

/// Fock-state probe (beta, alpha, ..., alpha) over {|N in mode i>}, mode 0
/// the reference; beta^2 + d alpha^2 = 1.
struct MultiphaseProbe {
  int d = 1;       // phases
  int n_photons = 1;
  double beta2 = 0.5;
  double alpha2 = 0.5;
  Vector amplitudes;  // (d+1)-vector (beta, alpha, ..., alpha)
};

/// Probe with beta^2 = 1/(1+sqrt(d)), alpha^2 = (1-beta^2)/d.
MultiphaseProbe optimal_probe(int d, int n_photons = 1);

/// Rank-1 model on the (d+1)-dimensional span with phase map
/// |N_i> -> e^{i N lambda_i}|N_i>; derivatives analytic.
StatisticalModel build_multiphase_model(const MultiphaseProbe& probe);

/// Tr[Q^-1], computed numerically from the built model (not the closed form).
double total_variance_bound(const MultiphaseProbe& probe,
                            const Tolerances& tol = default_tolerances());

/// (1+sqrt(d))^2 d / (4 N^2), for reporting next to the numerical value.
double total_variance_formula(int d, int n_photons);

/// d^3/N^2: total variance of d independent single-phase-optimal probes at
/// the same total photon number.
double independent_strategy_variance(int d, int n_photons);

}  // namespace qest
