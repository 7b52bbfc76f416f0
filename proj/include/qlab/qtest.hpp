#pragma once

#include "qlab/adversary.hpp"
#include "qlab/core.hpp"
#include "qlab/haar.hpp"
#include "qlab/measure.hpp"
#include "qlab/rng.hpp"

#include <array>
#include <functional>
#include <vector>

namespace qlab {

struct TestVerdict {
  bool accept = false;
  double statistic = 0.0;
  double threshold = 0.0;
  double corrupted_budget = 0.0;  // gamma
};

struct TesterConfig {
  double gamma = 0.0;
  double epsilon_target = 0.1;
  std::size_t calibration_trials = 200;
  double null_quantile = 0.95;

  void validate() const;
};

/// Trimmed-L1 identity test with a Monte Carlo-calibrated null threshold.
/// statistic = max(0, ||p_emp - q||_1 - 2 gamma): an adversary moving
/// gamma*n of n samples shifts the empirical L1 by at most 2 gamma, so that
/// slack is subtracted. threshold = the null_quantile of the clean empirical
/// L1 under H0, estimated from calibration_trials seeded simulations of
/// sampling from q. Accepts iff statistic <= threshold.
TestVerdict robust_identity_test(const std::vector<int>& outcomes, const OutcomeDistribution& q,
                                 const TesterConfig& cfg, Rng& rng);

/// Corruption hook applied to the clean outcome record before testing; the
/// reference distribution of the known state under the sampled basis is
/// provided so attacks can target it.
using AdversaryHook =
    std::function<LabelRecord(const LabelRecord&, const OutcomeDistribution& reference, Rng&)>;

/// Identity test for quantum states: samples a Haar basis, measures n copies
/// of rho in it, lets the adversary hook corrupt the outcomes, then runs
/// robust_identity_test against the known state's outcome distribution.
TestVerdict quantum_identity_test(const DensityMatrix& rho, const DensityMatrix& sigma,
                                  std::size_t n, const TesterConfig& cfg,
                                  const AdversaryHook& adversary, Rng& rng);

/// Exact distribution-level (l1, l2, linf) distances between p_rho^U and
/// p_sigma^U per Haar draw (no sampling noise).
std::vector<std::array<double, 3>> outcome_distance_diagnostics(const DensityMatrix& rho,
                                                                const DensityMatrix& sigma,
                                                                std::size_t trials, Rng& rng);

/// Upper bound (d/2) binom(d+p-1, p)^{-1} hs_norm(Delta)^p on
/// E_U ||p_rho^U - p_sigma^U||_p^p for traceless Delta and even p <= 6.
double expected_lp_bound(const HermitianMatrix& delta, int p);

}  // namespace qlab
