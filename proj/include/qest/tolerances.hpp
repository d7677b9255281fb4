#pragma once

namespace qest {

/// Central numeric configuration. Every module reads its thresholds from
/// here so a run is reproducible bit-for-bit given one record.
struct Tolerances {
  // operators
  double hermiticity = 1e-12;        // relative Hermiticity slack
  double trace_one = 1e-10;          // |tr rho - 1|
  double psd_slack = 1e-10;          // smallest admissible eigenvalue
  double cutoff_scale = 1e-12;       // lyapunov cutoff = scale * max eigenvalue
  double rhs_consistency = 1e-8;     // off-support weight allowed in lyapunov rhs

  // model
  double fd_step = 1e-5;             // base step h0 for central differences
  double derivative_trace = 1e-8;    // |tr d_rho|
  double jacobian_det_floor = 1e-12;

  // information
  double sld_residual = 1e-9;
  double qfi_rank_floor = 1e-10;     // smallest/largest eigenvalue ratio for Q^-1
  double prob_floor = 1e-12;         // epsilon_p in Fisher sums
  double prob_slope_floor = 1e-6;    // |dp| above this at p<=floor is an error

  // sdp
  double sdp_tol = 1e-8;             // residual/gap stopping threshold
  int sdp_max_iter = 200;
  double sdp_gap_fail = 1e-5;        // SolverFailure beyond this gap
  double sdp_null_direction = 1e-11; // relative cutoff for removing null columns

  // classify
  double classify_tau = 1e-8;

  // imaging
  double gram_drop = 1e-10;          // discard basis directions below this
  double degenerate_scene = 1e-12;   // coincident positions, units of sigma
  double grid_refine_rel = 1e-8;
  int grid_max_refine = 6;
  double hg_tail_max = 1e-10;

  // simulate
  int mle_max_iter = 500;
  double mle_grad_tol = 1e-9;        // scaled by shot count
  int mle_starts = 5;
};

const Tolerances& default_tolerances();

}  // namespace qest
