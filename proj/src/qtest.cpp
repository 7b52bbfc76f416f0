#include "qlab/qtest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlab {

void TesterConfig::validate() const {
  if (gamma < 0.0 || gamma >= 0.5) {
    throw std::invalid_argument("TesterConfig: gamma must lie in [0, 0.5)");
  }
  if (epsilon_target <= 0.0) {
    throw std::invalid_argument("TesterConfig: epsilon_target must be positive");
  }
  if (calibration_trials == 0) {
    throw std::invalid_argument("TesterConfig: calibration_trials must be positive");
  }
  if (null_quantile <= 0.0 || null_quantile >= 1.0) {
    throw std::invalid_argument("TesterConfig: null_quantile must lie in (0, 1)");
  }
}

namespace {

double empirical_l1(const std::vector<int>& outcomes, const OutcomeDistribution& q) {
  std::vector<double> counts(static_cast<std::size_t>(q.num_outcomes()), 0.0);
  for (int x : outcomes) {
    if (x < 0 || x >= q.num_outcomes()) {
      throw std::invalid_argument("empirical_l1: outcome label out of range");
    }
    counts[static_cast<std::size_t>(x)] += 1.0;
  }
  const double n = static_cast<double>(outcomes.size());
  double l1 = 0.0;
  for (int x = 0; x < q.num_outcomes(); ++x) {
    l1 += std::abs(counts[static_cast<std::size_t>(x)] / n - q.prob(x));
  }
  return l1;
}

double order_quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size());
  std::size_t idx = static_cast<std::size_t>(std::ceil(pos));
  if (idx > 0) --idx;
  if (idx >= values.size()) idx = values.size() - 1;
  return values[idx];
}

}  // namespace

TestVerdict robust_identity_test(const std::vector<int>& outcomes, const OutcomeDistribution& q,
                                 const TesterConfig& cfg, Rng& rng) {
  cfg.validate();
  if (outcomes.empty()) throw std::invalid_argument("robust_identity_test: empty record");

  const double l1 = empirical_l1(outcomes, q);
  TestVerdict v;
  v.corrupted_budget = cfg.gamma;
  v.statistic = std::max(0.0, l1 - 2.0 * cfg.gamma);

  // Null calibration: the clean empirical l1 under H0 at the same n, without
  // the 2 gamma trim (the trim is an adversary allowance, not sampling noise).
  std::vector<double> null_l1(cfg.calibration_trials);
  for (std::size_t trial = 0; trial < cfg.calibration_trials; ++trial) {
    const std::vector<int> sim = sample_outcomes(q, outcomes.size(), rng);
    null_l1[trial] = empirical_l1(sim, q);
  }
  v.threshold = order_quantile(std::move(null_l1), cfg.null_quantile);
  v.accept = v.statistic <= v.threshold;
  return v;
}

TestVerdict quantum_identity_test(const DensityMatrix& rho, const DensityMatrix& sigma,
                                  std::size_t n, const TesterConfig& cfg,
                                  const AdversaryHook& adversary, Rng& rng) {
  cfg.validate();
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("quantum_identity_test: dimension mismatch");
  }
  if (n == 0) throw std::invalid_argument("quantum_identity_test: need n >= 1");

  const UnitaryMatrix u = sample_haar_unitary(rho.dim(), rng);
  const Povm basis = basis_povm(u);
  const OutcomeDistribution p = born_distribution(rho, basis);
  const OutcomeDistribution q = born_distribution(sigma, basis);

  LabelRecord rec = LabelRecord::clean(sample_outcomes(p, n, rng));
  if (adversary) rec = adversary(rec, q, rng);
  return robust_identity_test(rec.entries, q, cfg, rng);
}

std::vector<std::array<double, 3>> outcome_distance_diagnostics(const DensityMatrix& rho,
                                                                const DensityMatrix& sigma,
                                                                std::size_t trials, Rng& rng) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("outcome_distance_diagnostics: dimension mismatch");
  }
  const Matrix delta = rho.mat() - sigma.mat();
  std::vector<std::array<double, 3>> out;
  out.reserve(trials);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const UnitaryMatrix u = sample_haar_unitary(rho.dim(), rng);
    // p_rho(x) - p_sigma(x) = <u_x| (rho - sigma) |u_x> = diag(U^dag Delta U).
    const Eigen::VectorXd diffs = (u.mat().adjoint() * (delta * u.mat())).diagonal().real();
    const double l1 = diffs.cwiseAbs().sum();
    const double l2 = diffs.norm();
    const double linf = diffs.cwiseAbs().maxCoeff();
    out.push_back({l1, l2, linf});
  }
  return out;
}

double expected_lp_bound(const HermitianMatrix& delta, int p) {
  if (p < 2 || p > kMaxMomentOrder || p % 2 != 0) {
    throw std::invalid_argument("expected_lp_bound: p must be even in [2, 6]");
  }
  if (std::abs(delta.mat().trace().real()) > 1e-8) {
    throw std::invalid_argument("expected_lp_bound: delta must be traceless");
  }
  const int d = delta.dim();
  return 0.5 * static_cast<double>(d) * symmetric_moment_scale(d, p) *
         std::pow(hs_norm(delta), p);
}

}  // namespace qlab
