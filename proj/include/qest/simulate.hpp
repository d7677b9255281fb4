#pragma once

#include <cstdint>
#include <vector>

#include "qest/information.hpp"

namespace qest {

/// Counter-based deterministic generator: output i is a pure function of
/// (seed, stream, i), so repetitions split reproducibly.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream);
  uint64_t next_u64();
  double uniform();  // in [0, 1)

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

struct OutcomeSample {
  std::vector<long long> counts;
  long long shots = 0;
  uint64_t seed = 0;
};

/// Multinomial draw of M shots from the Born-rule distribution.
OutcomeSample sample_outcomes(const ModelPoint& pt, const Povm& povm, long long shots,
                              uint64_t seed, const Tolerances& tol = default_tolerances());

/// Maximum-likelihood estimate by box-projected gradient ascent with
/// backtracking line search and 5 perturbed starts.
Vector mle(const OutcomeSample& sample, const StatisticalModel& model, const Povm& povm,
           const Vector& lambda0, const Tolerances& tol = default_tolerances());

struct EstimatorRun {
  std::vector<Vector> estimates;
  RealMatrix v_hat;   // empirical mean-square error matrix
  Vector bias;        // mean(estimate) - lambda_true
  int repetitions = 0;
};

EstimatorRun empirical_mse(const StatisticalModel& model, const Povm& povm,
                           const Vector& lambda_true, long long shots, int repetitions,
                           uint64_t seed, const Tolerances& tol = default_tolerances());

/// Bootstrap standard errors of the entries of v_hat (resampling the
/// repetitions), deterministic given the seed.
RealMatrix bootstrap_se(const EstimatorRun& run, const Vector& lambda_true, int resamples,
                        uint64_t seed);

/// Upper regularized incomplete gamma Q(a, x); chi-square tail probability
/// is Q(k/2, x/2).
double gamma_q(double a, double x);

/// Goodness-of-fit p-value of observed counts against expected probabilities.
double chi_square_pvalue(const std::vector<long long>& counts, const Vector& probs);

}  // namespace qest
