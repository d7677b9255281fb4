#pragma once

#include <vector>

#include "qest/model.hpp"

namespace qest {

/// Real Gaussian amplitude point-spread function
/// psi(x) = (2 pi sigma^2)^{-1/4} exp(-x^2 / (4 sigma^2)).
struct GaussianPsf {
  double sigma = 1.0;
};

enum class SceneParametrization {
  CentroidSeparation,             // 2 sources: (centroid, separation)
  Separations,                    // N sources: consecutive gaps, centroid held fixed
  PositionsRaw,                   // N sources: the positions themselves
  CentroidSeparationImbalance,    // 2 sources: (centroid, separation, w1)
};

/// Incoherent point sources on a line; weights sum to one, positions
/// strictly increasing.
struct SourceScene {
  std::vector<double> positions;
  std::vector<double> weights;
  SceneParametrization parametrization = SceneParametrization::CentroidSeparation;
};

struct OverlapRecord {
  double psi_psi;    // <psi_a | psi_b>
  double psi_dpsi;   // <psi_a | d/dxb psi_b>
  double dpsi_dpsi;  // <d/dxa psi_a | d/dxb psi_b>
};

/// Closed-form Gaussian overlap integrals for sources at xa, xb.
OverlapRecord gaussian_overlaps(const GaussianPsf& psf, double xa, double xb);

/// Finite statistical model over the span of {psi_s, psi_s'}; exact, not
/// truncated (state and every position derivative live in that span).
struct SceneModel {
  int basis_dim = 0;        // retained orthonormal directions
  RealMatrix gram;          // raw 2N x 2N overlap Gram matrix
  StatisticalModel model;   // local-frame model over the scene parameters
  Vector lambda;            // parameter value of the scene as built
  ModelPoint point;         // state and derivatives at lambda
};

SceneModel build_scene_model(const GaussianPsf& psf, const SourceScene& scene,
                             const Tolerances& tol = default_tolerances());

struct ImagingGrid {
  double halfwidth_in_sigma = 12.0;
  int points = 2001;  // odd, >= 1001
};

/// Classical Fisher information of ideal photon-flux measurement, composite
/// Simpson on an auto-refined grid.
RealMatrix direct_imaging_fi(const GaussianPsf& psf, const SourceScene& scene,
                             const ImagingGrid& grid, const Tolerances& tol = default_tolerances());

struct HgModeReport {
  Vector probabilities;       // p_0 .. p_{q_max}
  double tail = 0.0;          // 1 - sum p_q, lumped into one outcome
  double fisher_separation = 0.0;
};

/// Hermite-Gauss demultiplexing at known centroid: outcome distribution for
/// two equal sources separated by `separation` and its Fisher information.
HgModeReport hg_mode_fi(const GaussianPsf& psf, double separation, int q_max,
                        const Tolerances& tol = default_tolerances());

}  // namespace qest
