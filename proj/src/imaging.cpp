#include "qest/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qest {

namespace {

void check_psf(const GaussianPsf& psf) {
  if (!(psf.sigma > 0.0)) throw DomainError("GaussianPsf: sigma must be positive");
}

double psi_amplitude(const GaussianPsf& psf, double u) {
  const double s2 = psf.sigma * psf.sigma;
  return std::pow(2.0 * M_PI * s2, -0.25) * std::exp(-u * u / (4.0 * s2));
}

double dpsi_amplitude(const GaussianPsf& psf, double u) {
  // derivative with respect to the source position: -psi'(u)
  const double s2 = psf.sigma * psf.sigma;
  return u / (2.0 * s2) * psi_amplitude(psf, u);
}

void check_scene(const GaussianPsf& psf, const SourceScene& scene, const Tolerances& tol) {
  const size_t n = scene.positions.size();
  if (n < 1 || scene.weights.size() != n) {
    throw DomainError("SourceScene: positions/weights size mismatch");
  }
  double wsum = 0.0;
  for (double w : scene.weights) {
    if (w < 0.0) throw DomainError("SourceScene: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw DomainError("SourceScene: weights must sum to 1");
  for (size_t s = 0; s + 1 < n; ++s) {
    if (scene.positions[s + 1] - scene.positions[s] < tol.degenerate_scene * psf.sigma) {
      std::ostringstream os;
      os << "scene has coincident sources at index " << s;
      throw DegenerateScene(os.str());
    }
  }
}

// ---------------------------------------------------------------------------
// Hermite-Gauss expansion of a displaced PSF.  A Gaussian of width sigma
// shifted by a is a coherent state of the matched oscillator:
//   <phi_q | psi(. - a)> = e^{-alpha^2/2} alpha^q / sqrt(q!),  alpha = a/(2 sigma)
// so every scene vector has an exact, perfectly conditioned coefficient
// expansion in the orthonormal HG basis.

Vector hg_coeffs(double a, double sigma, int qmax) {
  const double alpha = a / (2.0 * sigma);
  Vector c(qmax + 1);
  c(0) = std::exp(-alpha * alpha / 2.0);
  for (int q = 1; q <= qmax; ++q) c(q) = c(q - 1) * alpha / std::sqrt(double(q));
  return c;
}

Vector hg_dcoeffs(double a, double sigma, int qmax) {
  const double alpha = a / (2.0 * sigma);
  const Vector c = hg_coeffs(a, sigma, qmax);
  Vector d(qmax + 1);
  for (int q = 0; q <= qmax; ++q) {
    d(q) = ((q > 0 ? std::sqrt(double(q)) * c(q - 1) : 0.0) - alpha * c(q)) / (2.0 * sigma);
  }
  return d;
}

int hg_order_for(const std::vector<double>& positions, double sigma) {
  double amax = 0.0;
  for (double x : positions) amax = std::max(amax, std::abs(x));
  const double alpha2 = (amax / (2.0 * sigma)) * (amax / (2.0 * sigma));
  // Poisson-tail style bound: beyond ~alpha^2 + margin the coefficients decay
  // superexponentially; margin sized for < 1e-16 tails
  return std::max(24, static_cast<int>(std::ceil(alpha2 + 12.0 * std::sqrt(alpha2 + 1.0) + 24.0)));
}

// affine parametrization data: lambda -> positions/weights and their slopes
struct SceneChart {
  int d = 0;
  std::function<void(const Vector&, std::vector<double>&, std::vector<double>&)> configure;
  // dpos[s][mu], dwgt[s][mu] -- constant for all charts used here
  RealMatrix dpos;
  RealMatrix dwgt;
  Vector lambda0;
  std::vector<Interval> domain;
};

SceneChart make_chart(const SourceScene& scene, double sigma) {
  const int n = static_cast<int>(scene.positions.size());
  SceneChart ch;
  switch (scene.parametrization) {
    case SceneParametrization::CentroidSeparation: {
      if (n != 2) throw DomainError("CentroidSeparation requires exactly 2 sources");
      ch.d = 2;
      ch.lambda0 = Vector(2);
      ch.lambda0 << (scene.positions[0] + scene.positions[1]) / 2.0,
          scene.positions[1] - scene.positions[0];
      const std::vector<double> w = scene.weights;
      ch.configure = [w](const Vector& l, std::vector<double>& pos, std::vector<double>& wgt) {
        pos = {l(0) - l(1) / 2.0, l(0) + l(1) / 2.0};
        wgt = w;
      };
      ch.dpos = RealMatrix(2, 2);
      ch.dpos << 1.0, -0.5, 1.0, 0.5;
      ch.dwgt = RealMatrix::Zero(2, 2);
      ch.domain = {Interval{-1e6 * sigma, 1e6 * sigma}, Interval{1e-7 * sigma, 1e6 * sigma}};
      break;
    }
    case SceneParametrization::Separations: {
      if (n < 2) throw DomainError("Separations requires at least 2 sources");
      ch.d = n - 1;
      ch.lambda0 = Vector(n - 1);
      for (int s = 0; s + 1 < n; ++s) ch.lambda0(s) = scene.positions[s + 1] - scene.positions[s];
      double mean = 0.0;
      for (double x : scene.positions) mean += x;
      mean /= n;
      const std::vector<double> w = scene.weights;
      const int nn = n;
      ch.configure = [w, mean, nn](const Vector& l, std::vector<double>& pos,
                                   std::vector<double>& wgt) {
        std::vector<double> cum(nn, 0.0);
        for (int s = 1; s < nn; ++s) cum[s] = cum[s - 1] + l(s - 1);
        double cmean = 0.0;
        for (double c : cum) cmean += c;
        cmean /= nn;
        pos.resize(nn);
        for (int s = 0; s < nn; ++s) pos[s] = mean + cum[s] - cmean;
        wgt = w;
      };
      ch.dpos = RealMatrix(n, n - 1);
      for (int s = 0; s < n; ++s) {
        for (int mu = 0; mu < n - 1; ++mu) {
          const double step = s > mu ? 1.0 : 0.0;
          ch.dpos(s, mu) = step - double(n - 1 - mu) / double(n);
        }
      }
      ch.dwgt = RealMatrix::Zero(n, n - 1);
      ch.domain.assign(n - 1, Interval{1e-7 * sigma, 1e6 * sigma});
      break;
    }
    case SceneParametrization::PositionsRaw: {
      ch.d = n;
      ch.lambda0 = Eigen::Map<const Vector>(scene.positions.data(), n);
      const std::vector<double> w = scene.weights;
      const int nn = n;
      ch.configure = [w, nn](const Vector& l, std::vector<double>& pos, std::vector<double>& wgt) {
        pos.assign(l.data(), l.data() + nn);
        wgt = w;
      };
      ch.dpos = RealMatrix::Identity(n, n);
      ch.dwgt = RealMatrix::Zero(n, n);
      ch.domain.assign(n, Interval{-1e6 * sigma, 1e6 * sigma});
      break;
    }
    case SceneParametrization::CentroidSeparationImbalance: {
      if (n != 2) throw DomainError("CentroidSeparationImbalance requires exactly 2 sources");
      ch.d = 3;
      ch.lambda0 = Vector(3);
      ch.lambda0 << (scene.positions[0] + scene.positions[1]) / 2.0,
          scene.positions[1] - scene.positions[0], scene.weights[0];
      ch.configure = [](const Vector& l, std::vector<double>& pos, std::vector<double>& wgt) {
        pos = {l(0) - l(1) / 2.0, l(0) + l(1) / 2.0};
        wgt = {l(2), 1.0 - l(2)};
      };
      ch.dpos = RealMatrix(2, 3);
      ch.dpos << 1.0, -0.5, 0.0, 1.0, 0.5, 0.0;
      ch.dwgt = RealMatrix(2, 3);
      ch.dwgt << 0.0, 0.0, 1.0, 0.0, 0.0, -1.0;
      ch.domain = {Interval{-1e6 * sigma, 1e6 * sigma}, Interval{1e-7 * sigma, 1e6 * sigma},
                   Interval{1e-3, 1.0 - 1e-3}};
      break;
    }
  }
  return ch;
}

struct FramePoint {
  Matrix rho;
  std::vector<Matrix> drho;
};

// Build the state and derivatives for one configuration inside the span of
// a fixed orthonormal frame (columns of `frame` are HG-coefficient vectors).
FramePoint frame_point(const RealMatrix& frame, const GaussianPsf& psf,
                       const std::vector<double>& pos, const std::vector<double>& wgt,
                       const RealMatrix& dpos, const RealMatrix& dwgt, int qmax) {
  const int n = static_cast<int>(pos.size());
  const int d = static_cast<int>(dpos.cols());
  const Index k = frame.cols();

  RealMatrix u(k, n), du(k, n);
  for (int s = 0; s < n; ++s) {
    u.col(s) = frame.transpose() * hg_coeffs(pos[s], psf.sigma, qmax);
    du.col(s) = frame.transpose() * hg_dcoeffs(pos[s], psf.sigma, qmax);
  }

  FramePoint out;
  RealMatrix rho = RealMatrix::Zero(k, k);
  for (int s = 0; s < n; ++s) rho += wgt[s] * u.col(s) * u.col(s).transpose();
  out.rho = rho.cast<Complex>();
  for (int mu = 0; mu < d; ++mu) {
    RealMatrix dr = RealMatrix::Zero(k, k);
    for (int s = 0; s < n; ++s) {
      if (dwgt(s, mu) != 0.0) dr += dwgt(s, mu) * u.col(s) * u.col(s).transpose();
      if (dpos(s, mu) != 0.0) {
        const RealMatrix cross = du.col(s) * u.col(s).transpose();
        dr += wgt[s] * dpos(s, mu) * (cross + cross.transpose());
      }
    }
    out.drho.push_back(dr.cast<Complex>());
  }
  return out;
}

// Orthonormal frame spanning the given HG-coefficient columns; directions
// with squared singular value (= Gram eigenvalue) below `drop` are discarded.
RealMatrix build_frame(const RealMatrix& columns, double drop) {
  Eigen::BDCSVD<RealMatrix> svd(columns, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  Index kept = 0;
  while (kept < sv.size() && sv(kept) * sv(kept) > drop) ++kept;
  if (kept == 0) throw DegenerateScene("scene basis collapsed entirely");
  return svd.matrixU().leftCols(kept);
}

RealMatrix scene_columns(const GaussianPsf& psf, const std::vector<double>& pos, int qmax) {
  const int n = static_cast<int>(pos.size());
  RealMatrix cols(qmax + 1, 2 * n);
  for (int s = 0; s < n; ++s) {
    cols.col(s) = hg_coeffs(pos[s], psf.sigma, qmax);
    // derivative direction scaled to unit-ish norm so the drop rule is
    // scale-invariant (||d psi/dX|| = 1/(2 sigma))
    cols.col(n + s) = 2.0 * psf.sigma * hg_dcoeffs(pos[s], psf.sigma, qmax);
  }
  return cols;
}

}  // namespace

OverlapRecord gaussian_overlaps(const GaussianPsf& psf, double xa, double xb) {
  check_psf(psf);
  const double s2 = psf.sigma * psf.sigma;
  const double delta = xa - xb;
  const double g = std::exp(-delta * delta / (8.0 * s2));
  OverlapRecord rec;
  rec.psi_psi = g;
  rec.psi_dpsi = delta / (4.0 * s2) * g;
  rec.dpsi_dpsi = (1.0 / (4.0 * s2) - delta * delta / (16.0 * s2 * s2)) * g;
  return rec;
}

SceneModel build_scene_model(const GaussianPsf& psf, const SourceScene& scene,
                             const Tolerances& tol) {
  check_psf(psf);
  check_scene(psf, scene, tol);
  const SceneChart chart = make_chart(scene, psf.sigma);
  const int nsrc = static_cast<int>(scene.positions.size());

  RealMatrix gram(2 * nsrc, 2 * nsrc);
  for (int a = 0; a < nsrc; ++a) {
    for (int b = 0; b < nsrc; ++b) {
      const OverlapRecord rec = gaussian_overlaps(psf, scene.positions[a], scene.positions[b]);
      gram(a, b) = rec.psi_psi;
      gram(a, nsrc + b) = rec.psi_dpsi;
      gram(nsrc + a, b) = gaussian_overlaps(psf, scene.positions[b], scene.positions[a]).psi_dpsi;
      gram(nsrc + a, nsrc + b) = rec.dpsi_dpsi;
    }
  }

  const GaussianPsf psf_c = psf;
  const SceneChart chart_c = chart;
  const Tolerances tol_c = tol;

  auto build_point = [psf_c, chart_c, tol_c](const Vector& lambda) {
    std::vector<double> pos, wgt;
    chart_c.configure(lambda, pos, wgt);
    for (size_t s = 0; s + 1 < pos.size(); ++s) {
      if (pos[s + 1] - pos[s] < tol_c.degenerate_scene * psf_c.sigma) {
        throw DegenerateScene("scene has coincident sources");
      }
    }
    const int qmax = hg_order_for(pos, psf_c.sigma);
    const RealMatrix frame = build_frame(scene_columns(psf_c, pos, qmax), tol_c.gram_drop);
    return frame_point(frame, psf_c, pos, wgt, chart_c.dpos, chart_c.dwgt, qmax);
  };

  StatisticalModel m;
  m.param_dim = chart.d;
  m.hilbert_dim = 2 * nsrc;
  m.domain = chart.domain;
  m.local_frame = true;
  m.name = "gaussian-scene";
  m.state = [build_point](const Vector& l) { return build_point(l).rho; };
  for (int mu = 0; mu < chart.d; ++mu) {
    m.derivatives.push_back([build_point, mu](const Vector& l) { return build_point(l).drho[mu]; });
  }
  m.fixed_frame = [psf_c, chart_c, tol_c](const std::vector<Vector>& lams) {
    // one shared frame spanning {psi_s, psi_s'} of every requested point
    int qmax = 24;
    std::vector<std::pair<std::vector<double>, std::vector<double>>> configs;
    for (const auto& l : lams) {
      std::vector<double> pos, wgt;
      chart_c.configure(l, pos, wgt);
      qmax = std::max(qmax, hg_order_for(pos, psf_c.sigma));
      configs.emplace_back(std::move(pos), std::move(wgt));
    }
    RealMatrix cols(qmax + 1, 2 * static_cast<Index>(configs.size()) *
                                  static_cast<Index>(configs.front().first.size()));
    Index at = 0;
    for (const auto& [pos, wgt] : configs) {
      const RealMatrix c = scene_columns(psf_c, pos, qmax);
      cols.middleCols(at, c.cols()) = c;
      at += c.cols();
    }
    const RealMatrix frame = build_frame(cols, tol_c.gram_drop);

    StatisticalModel fixed;
    fixed.param_dim = chart_c.d;
    fixed.hilbert_dim = static_cast<int>(frame.cols());
    fixed.domain = chart_c.domain;
    fixed.name = "gaussian-scene/fixed-frame";
    auto point_in_frame = [psf_c, chart_c, frame, qmax](const Vector& l) {
      std::vector<double> pos, wgt;
      chart_c.configure(l, pos, wgt);
      return frame_point(frame, psf_c, pos, wgt, chart_c.dpos, chart_c.dwgt, qmax);
    };
    fixed.state = [point_in_frame](const Vector& l) { return point_in_frame(l).rho; };
    for (int mu = 0; mu < chart_c.d; ++mu) {
      fixed.derivatives.push_back(
          [point_in_frame, mu](const Vector& l) { return point_in_frame(l).drho[mu]; });
    }
    return fixed;
  };

  ModelPoint point = evaluate(m, chart.lambda0, tol);
  const int basis_dim = static_cast<int>(point.hilbert_dim());
  return SceneModel{basis_dim, std::move(gram), std::move(m), chart.lambda0, std::move(point)};
}

RealMatrix direct_imaging_fi(const GaussianPsf& psf, const SourceScene& scene,
                             const ImagingGrid& grid, const Tolerances& tol) {
  check_psf(psf);
  check_scene(psf, scene, tol);
  if (grid.points < 1001 || grid.points % 2 == 0) {
    throw DomainError("direct_imaging_fi: grid.points must be odd and >= 1001");
  }
  if (grid.halfwidth_in_sigma < 8.0) {
    throw DomainError("direct_imaging_fi: halfwidth must be >= 8 sigma");
  }
  const SceneChart chart = make_chart(scene, psf.sigma);
  const int nsrc = static_cast<int>(scene.positions.size());
  const int d = chart.d;

  double center = 0.0;
  for (double x : scene.positions) center += x;
  center /= nsrc;
  double spread = 0.0;
  for (double x : scene.positions) spread = std::max(spread, std::abs(x - center));
  const double half = grid.halfwidth_in_sigma * psf.sigma + spread;

  auto fisher_on_grid = [&](int npts) {
    const double h = 2.0 * half / (npts - 1);
    RealMatrix f = RealMatrix::Zero(d, d);
    Vector dp(d);
    for (int i = 0; i < npts; ++i) {
      const double x = center - half + i * h;
      double p = 0.0;
      dp.setZero();
      for (int s = 0; s < nsrc; ++s) {
        const double uu = x - scene.positions[s];
        const double a = psi_amplitude(psf, uu);
        const double da = dpsi_amplitude(psf, uu);
        p += scene.weights[s] * a * a;
        for (int mu = 0; mu < d; ++mu) {
          double term = 0.0;
          if (chart.dwgt(s, mu) != 0.0) term += chart.dwgt(s, mu) * a * a;
          if (chart.dpos(s, mu) != 0.0) term += scene.weights[s] * chart.dpos(s, mu) * 2.0 * a * da;
          dp(mu) += term;
        }
      }
      if (p < 1e-280) continue;
      const double simpson = (i == 0 || i == npts - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      f += (simpson * h / 3.0 / p) * (dp * dp.transpose());
    }
    return f;
  };

  int npts = grid.points;
  RealMatrix f = fisher_on_grid(npts);
  for (int refine = 0; refine <= tol.grid_max_refine; ++refine) {
    if (refine == tol.grid_max_refine) {
      throw GridUnconverged("direct_imaging_fi: grid did not converge");
    }
    const int finer = 2 * npts - 1;
    const RealMatrix f2 = fisher_on_grid(finer);
    const double scale = std::max(f2.cwiseAbs().maxCoeff(), 1e-300);
    if (((f2 - f).cwiseAbs().maxCoeff()) <= tol.grid_refine_rel * scale) {
      return f2;
    }
    f = f2;
    npts = finer;
  }
  return f;
}

HgModeReport hg_mode_fi(const GaussianPsf& psf, double separation, int q_max,
                        const Tolerances& tol) {
  check_psf(psf);
  if (!(separation > 0.0)) throw DomainError("hg_mode_fi: separation must be positive");
  if (q_max < 8) throw DomainError("hg_mode_fi: q_max must be >= 8");

  // two equal sources at +-s/2: by parity both give |c_q(s/2)|^2, a Poisson
  // distribution over mode index with mean nu = s^2/(16 sigma^2)
  const double s2 = psf.sigma * psf.sigma;
  const double nu = separation * separation / (16.0 * s2);
  const double dnu = separation / (8.0 * s2);

  HgModeReport rep;
  rep.probabilities.resize(q_max + 1);
  Vector dprob(q_max + 1);
  double psum = 0.0, dsum = 0.0;
  double pq = std::exp(-nu);
  for (int q = 0; q <= q_max; ++q) {
    if (q > 0) pq *= nu / q;
    rep.probabilities(q) = pq;
    dprob(q) = pq * (q / nu - 1.0) * dnu;
    psum += pq;
    dsum += dprob(q);
  }
  rep.tail = std::max(0.0, 1.0 - psum);
  if (rep.tail > tol.hg_tail_max) {
    std::ostringstream os;
    os << "hg_mode_fi: tail probability " << rep.tail << " exceeds " << tol.hg_tail_max
       << "; increase q_max";
    throw TailTooLarge(os.str());
  }

  double fi = 0.0;
  for (int q = 0; q <= q_max; ++q) {
    if (rep.probabilities(q) > tol.prob_floor) fi += dprob(q) * dprob(q) / rep.probabilities(q);
  }
  if (rep.tail > tol.prob_floor) fi += dsum * dsum / rep.tail;
  rep.fisher_separation = fi;
  return rep;
}

}  // namespace qest
