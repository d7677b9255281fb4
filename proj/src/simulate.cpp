#include "qest/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qest {

namespace {

uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vector born_probabilities(const ModelPoint& pt, const Povm& povm) {
  Vector p(povm.size());
  for (Index k = 0; k < povm.size(); ++k) {
    p(k) = std::max(0.0, (pt.rho.mat() * povm.elements()[k].mat()).trace().real());
  }
  const double sum = p.sum();
  if (sum <= 0.0 || std::abs(sum - 1.0) > 1e-8) {
    std::ostringstream os;
    os << "sample_outcomes: Born probabilities sum to " << sum;
    throw DomainError(os.str());
  }
  return p / sum;
}

}  // namespace

CounterRng::CounterRng(uint64_t seed, uint64_t stream)
    : key_(mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1))) {}

uint64_t CounterRng::next_u64() {
  return mix64(key_ + 0x9e3779b97f4a7c15ULL * (++counter_));
}

double CounterRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

OutcomeSample sample_outcomes(const ModelPoint& pt, const Povm& povm, long long shots,
                              uint64_t seed, const Tolerances&) {
  if (shots < 0) throw DomainError("sample_outcomes: negative shot count");
  const Vector p = born_probabilities(pt, povm);
  Vector cdf(p.size());
  double acc = 0.0;
  for (Index k = 0; k < p.size(); ++k) {
    acc += p(k);
    cdf(k) = acc;
  }
  cdf(p.size() - 1) = 1.0;

  OutcomeSample sample;
  sample.counts.assign(p.size(), 0);
  sample.shots = shots;
  sample.seed = seed;
  CounterRng rng(seed, 0);
  for (long long i = 0; i < shots; ++i) {
    const double u = rng.uniform();
    const Index k = std::lower_bound(cdf.data(), cdf.data() + cdf.size(), u) - cdf.data();
    ++sample.counts[std::min<Index>(k, p.size() - 1)];
  }
  return sample;
}

namespace {

struct LikelihoodEval {
  double loglik;
  Vector grad;
};

LikelihoodEval eval_loglik(const OutcomeSample& sample, const StatisticalModel& model,
                           const Povm& povm, const Vector& lambda, const Tolerances& tol) {
  const ModelPoint pt = evaluate(model, lambda, tol);
  LikelihoodEval out;
  out.loglik = 0.0;
  out.grad = Vector::Zero(model.param_dim);
  for (Index k = 0; k < povm.size(); ++k) {
    if (sample.counts[k] == 0) continue;
    const double p =
        std::max((pt.rho.mat() * povm.elements()[k].mat()).trace().real(), tol.prob_floor);
    out.loglik += double(sample.counts[k]) * std::log(p);
    for (Index mu = 0; mu < model.param_dim; ++mu) {
      const double dp = (pt.drho[mu].mat() * povm.elements()[k].mat()).trace().real();
      out.grad(mu) += double(sample.counts[k]) * dp / p;
    }
  }
  return out;
}

Vector project_to_domain(const StatisticalModel& model, Vector lambda) {
  for (int mu = 0; mu < model.param_dim; ++mu) {
    if (mu < static_cast<int>(model.domain.size())) {
      lambda(mu) = std::clamp(lambda(mu), model.domain[mu].lo, model.domain[mu].hi);
    }
  }
  return lambda;
}

}  // namespace

Vector mle(const OutcomeSample& sample, const StatisticalModel& model, const Povm& povm,
           const Vector& lambda0, const Tolerances& tol) {
  if (lambda0.size() != model.param_dim) throw DomainError("mle: lambda0 dimension mismatch");
  const double grad_tol = tol.mle_grad_tol * std::max<double>(1, sample.shots);

  CounterRng perturb_rng(sample.seed, 0x6d6c65ULL);
  Vector best;
  double best_loglik = -std::numeric_limits<double>::infinity();
  bool any_converged = false;

  for (int start = 0; start < tol.mle_starts; ++start) {
    Vector lambda = lambda0;
    if (start > 0) {
      for (int mu = 0; mu < model.param_dim; ++mu) {
        const double width = 0.05 * (1.0 + std::abs(lambda0(mu)));
        lambda(mu) += width * (2.0 * perturb_rng.uniform() - 1.0);
      }
    }
    lambda = project_to_domain(model, lambda);

    LikelihoodEval cur = eval_loglik(sample, model, povm, lambda, tol);
    double step = 1.0 / std::max<double>(1, sample.shots);
    bool converged = false;
    for (int it = 0; it < tol.mle_max_iter; ++it) {
      // projected-gradient stationarity test
      const Vector probe = project_to_domain(model, lambda + cur.grad * (1.0 / grad_tol));
      const double stat = ((probe - lambda) * grad_tol).cwiseAbs().maxCoeff();
      if (stat <= grad_tol) {
        converged = true;
        break;
      }
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        const Vector cand = project_to_domain(model, lambda + step * cur.grad);
        if ((cand - lambda).cwiseAbs().maxCoeff() == 0.0) break;
        LikelihoodEval next = eval_loglik(sample, model, povm, cand, tol);
        if (next.loglik > cur.loglik + 1e-4 * cur.grad.dot(cand - lambda)) {
          lambda = cand;
          cur = next;
          step *= 2.0;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) {
        // no uphill step representable: treat as stationary (boundary clamp)
        converged = true;
        break;
      }
    }
    if (!converged) continue;
    any_converged = true;
    if (cur.loglik > best_loglik) {
      best_loglik = cur.loglik;
      best = lambda;
    }
  }
  if (!any_converged) {
    throw NonConvergent("mle: no start converged within the iteration budget");
  }
  return best;
}

EstimatorRun empirical_mse(const StatisticalModel& model, const Povm& povm,
                           const Vector& lambda_true, long long shots, int repetitions,
                           uint64_t seed, const Tolerances& tol) {
  if (repetitions < 1) throw DomainError("empirical_mse: repetitions must be >= 1");
  const ModelPoint pt = evaluate(model, lambda_true, tol);
  EstimatorRun run;
  run.repetitions = repetitions;
  run.estimates.reserve(repetitions);
  run.v_hat = RealMatrix::Zero(model.param_dim, model.param_dim);
  run.bias = Vector::Zero(model.param_dim);
  for (int rep = 0; rep < repetitions; ++rep) {
    OutcomeSample sample =
        sample_outcomes(pt, povm, shots, mix64(seed + 0x9e3779b97f4a7c15ULL * (rep + 1)), tol);
    const Vector est = mle(sample, model, povm, lambda_true, tol);
    const Vector err = est - lambda_true;
    run.v_hat += err * err.transpose();
    run.bias += err;
    run.estimates.push_back(est);
  }
  run.v_hat /= double(repetitions);
  run.bias /= double(repetitions);
  return run;
}

RealMatrix bootstrap_se(const EstimatorRun& run, const Vector& lambda_true, int resamples,
                        uint64_t seed) {
  const int r = run.repetitions;
  const Index d = lambda_true.size();
  CounterRng rng(seed, 0xb007ULL);
  RealMatrix mean = RealMatrix::Zero(d, d);
  RealMatrix meansq = RealMatrix::Zero(d, d);
  for (int b = 0; b < resamples; ++b) {
    RealMatrix v = RealMatrix::Zero(d, d);
    for (int i = 0; i < r; ++i) {
      const int pick = std::min<int>(static_cast<int>(rng.uniform() * r), r - 1);
      const Vector err = run.estimates[pick] - lambda_true;
      v += err * err.transpose();
    }
    v /= double(r);
    mean += v;
    meansq += v.cwiseProduct(v);
  }
  mean /= double(resamples);
  meansq /= double(resamples);
  return (meansq - mean.cwiseProduct(mean)).cwiseMax(0.0).cwiseSqrt();
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw DomainError("gamma_q: requires x >= 0, a > 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    // lower series, return 1 - P
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    return std::clamp(1.0 - p, 0.0, 1.0);
  }
  // Lentz continued fraction for Q
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double dd = 1.0 / b;
  double h = dd;
  for (int i = 1; i < 500; ++i) {
    const double an = -double(i) * (double(i) - a);
    b += 2.0;
    dd = an * dd + b;
    if (std::abs(dd) < tiny) dd = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    dd = 1.0 / dd;
    const double delta = dd * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::clamp(std::exp(-x + a * std::log(x) - std::lgamma(a)) * h, 0.0, 1.0);
}

double chi_square_pvalue(const std::vector<long long>& counts, const Vector& probs) {
  if (static_cast<Index>(counts.size()) != probs.size()) {
    throw DomainError("chi_square_pvalue: size mismatch");
  }
  long long total = 0;
  for (long long c : counts) total += c;
  double stat = 0.0;
  int dof = -1;
  for (Index k = 0; k < probs.size(); ++k) {
    const double expected = probs(k) * double(total);
    if (expected < 5.0) continue;  // fold sparse cells out of the statistic
    stat += (double(counts[k]) - expected) * (double(counts[k]) - expected) / expected;
    ++dof;
  }
  if (dof < 1) throw DomainError("chi_square_pvalue: not enough populated cells");
  return gamma_q(dof / 2.0, stat / 2.0);
}

}  // namespace qest
