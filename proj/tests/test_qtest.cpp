#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qlab/adversary.hpp"
#include "qlab/haar.hpp"
#include "qlab/measure.hpp"
#include "qlab/qtest.hpp"
#include "qlab/rng.hpp"

#include "stats_util.hpp"

#include <cmath>
#include <vector>

using namespace qlab;

namespace {

HermitianMatrix random_traceless(int d, double hs, Rng& rng) {
  Matrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = rng.complex_normal();
  }
  Matrix h = 0.5 * (g + g.adjoint());
  h -= (h.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
  return HermitianMatrix(h * (hs / h.norm()));
}

// Mixture of q and a point mass: l1 distance to q is controllable.
OutcomeDistribution shifted(const OutcomeDistribution& q, double l1) {
  std::vector<double> p(q.probs());
  // Move l1/2 mass onto label 0 proportionally from the others.
  const double moved = l1 / 2.0;
  const double others = 1.0 - p[0];
  for (std::size_t x = 1; x < p.size(); ++x) p[x] *= (others - moved) / others;
  p[0] += moved;
  return OutcomeDistribution(p);
}

}  // namespace

TEST_CASE("tester config validation") {
  TesterConfig cfg;
  cfg.gamma = 0.7;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.gamma = 0.1;
  cfg.null_quantile = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("robust identity test: null accept, far reject") {
  Rng rng(81);
  const int k = 16;
  std::vector<double> probs(k, 1.0 / k);
  const OutcomeDistribution q(probs);
  TesterConfig cfg;
  cfg.gamma = 0.0;
  cfg.calibration_trials = 100;

  int accepts = 0;
  const int trials = 60;
  const std::size_t n = 20000;
  for (int t = 0; t < trials; ++t) {
    const TestVerdict v = robust_identity_test(sample_outcomes(q, n, rng), q, cfg, rng);
    CHECK(v.accept == (v.statistic <= v.threshold));
    if (v.accept) ++accepts;
  }
  CHECK(accepts >= trials * 9 / 10);

  const OutcomeDistribution far = shifted(q, 1.0);
  int rejects = 0;
  for (int t = 0; t < 30; ++t) {
    if (!robust_identity_test(sample_outcomes(far, n, rng), q, cfg, rng).accept) ++rejects;
  }
  CHECK(rejects == 30);
}

TEST_CASE("robust identity test: adversarial null absorbed by the 2 gamma allowance") {
  Rng rng(82);
  const int k = 16;
  const OutcomeDistribution q(std::vector<double>(k, 1.0 / k));
  const OutcomeDistribution far = shifted(q, 1.0);
  TesterConfig cfg;
  cfg.gamma = 0.01;
  cfg.calibration_trials = 100;
  const std::size_t n = 20000;
  int accepts = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    LabelRecord rec = LabelRecord::clean(sample_outcomes(q, n, rng));
    rec = coupling_attack(rec, CouplingPlan::repeated(q, far, n), cfg.gamma, rng);
    if (robust_identity_test(rec.entries, q, cfg, rng).accept) ++accepts;
  }
  CHECK(accepts >= trials * 8 / 10);
}

TEST_CASE("calibration validity: null rejection rate matches 1 - quantile") {
  Rng rng(83);
  const int k = 8;
  const OutcomeDistribution q(std::vector<double>(k, 1.0 / k));
  TesterConfig cfg;
  cfg.gamma = 0.0;
  cfg.calibration_trials = 100;
  const std::size_t n = 2000;
  const int trials = 1000;
  int rejects = 0;
  for (int t = 0; t < trials; ++t) {
    if (!robust_identity_test(sample_outcomes(q, n, rng), q, cfg, rng).accept) ++rejects;
  }
  const double rate = static_cast<double>(rejects) / trials;
  // Threshold is itself Monte Carlo-estimated, widening the tolerance beyond
  // the pure binomial 3 std errors.
  const double se = std::sqrt(0.05 * 0.95 / trials);
  CHECK(std::abs(rate - 0.05) <= 3.0 * se + 0.03);
}

TEST_CASE("rejection rate is monotone in the true l1 distance") {
  Rng rng(84);
  const int k = 16;
  const OutcomeDistribution q(std::vector<double>(k, 1.0 / k));
  TesterConfig cfg;
  cfg.gamma = 0.0;
  cfg.calibration_trials = 100;
  const std::size_t n = 20000;
  const int trials = 30;
  std::vector<double> rates;
  for (double l1 : {0.0, 0.02, 0.05, 0.1, 0.4}) {
    const OutcomeDistribution p = shifted(q, l1);
    int rejects = 0;
    for (int t = 0; t < trials; ++t) {
      if (!robust_identity_test(sample_outcomes(p, n, rng), q, cfg, rng).accept) ++rejects;
    }
    rates.push_back(static_cast<double>(rejects) / trials);
  }
  for (std::size_t i = 1; i < rates.size(); ++i) {
    CHECK(rates[i] >= rates[i - 1] - 0.05);
  }
  CHECK(rates.front() <= 0.2);
  CHECK(rates.back() == 1.0);
}

TEST_CASE("quantum identity test null and separated states") {
  Rng rng(85);
  const int d = 8;
  const DensityMatrix mm = DensityMatrix::maximally_mixed(d);
  TesterConfig cfg;
  cfg.gamma = 0.0;
  cfg.calibration_trials = 100;
  const std::size_t n = 20000;

  int accepts = 0;
  for (int t = 0; t < 20; ++t) {
    if (quantum_identity_test(mm, mm, n, cfg, nullptr, rng).accept) ++accepts;
  }
  CHECK(accepts >= 17);

  // A state far from maximally mixed in trace distance.
  const PureState psi = sample_haar_state(d, rng);
  const Matrix far = 0.5 * mm.mat() + 0.5 * psi.projector();
  int rejects = 0;
  for (int t = 0; t < 20; ++t) {
    if (!quantum_identity_test(DensityMatrix(far), mm, n, cfg, nullptr, rng).accept) ++rejects;
  }
  CHECK(rejects >= 17);

  CHECK_THROWS_AS(
      quantum_identity_test(DensityMatrix::maximally_mixed(4), mm, n, cfg, nullptr, rng),
      std::invalid_argument);
}

TEST_CASE("outcome distance diagnostics") {
  Rng rng(86);
  const int d = 8;
  const DensityMatrix mm = DensityMatrix::maximally_mixed(d);
  for (const auto& [l1, l2, linf] : outcome_distance_diagnostics(mm, mm, 5, rng)) {
    CHECK(l1 == doctest::Approx(0.0));
    CHECK(l2 == doctest::Approx(0.0));
    CHECK(linf == doctest::Approx(0.0));
  }

  const HermitianMatrix delta = random_traceless(d, 0.3, rng);
  const DensityMatrix rho(mm.mat() + 0.5 * delta.mat() * (1.0 / (d * op_norm(delta))));
  const auto diags = outcome_distance_diagnostics(rho, mm, 50, rng);
  for (const auto& [l1, l2, linf] : diags) {
    CHECK(l1 >= l2 - 1e-12);
    CHECK(l2 >= linf - 1e-12);
    CHECK(l2 * l2 <= l1 * linf + 1e-15);  // Hoelder chain, exact
  }
}

TEST_CASE("expected_lp_bound closed forms") {
  Rng rng(87);
  CHECK(expected_lp_bound(HermitianMatrix::zero(3), 2) == doctest::Approx(0.0));

  const double a = 0.3;
  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = a;
  diag(1, 1) = -a;
  const HermitianMatrix delta(diag);
  const double bound = expected_lp_bound(delta, 2);
  CHECK(bound == doctest::Approx(2.0 * a * a / 3.0));
  // Tight at d = 2, p = 2: E||p_rho - p_sigma||_2^2 = 2 E<u|Delta|u>^2.
  const double mc_exact = 2.0 * haar_trace_moment(delta, 2);
  CHECK(bound == doctest::Approx(mc_exact).epsilon(1e-12));

  CHECK_THROWS_AS(expected_lp_bound(delta, 3), std::invalid_argument);
  CHECK_THROWS_AS(expected_lp_bound(HermitianMatrix::identity(2), 2), std::invalid_argument);
}

TEST_CASE("expected_lp_bound dominates Monte Carlo at d=16, p=4") {
  Rng rng(88);
  const int d = 16;
  const HermitianMatrix delta = random_traceless(d, 0.2, rng);
  const DensityMatrix mm = DensityMatrix::maximally_mixed(d);
  const DensityMatrix rho(mm.mat() + delta.mat() * std::min(1.0, 1.0 / (2.0 * d * op_norm(delta))));
  const Matrix scaled = rho.mat() - mm.mat();  // clipped delta actually applied
  const HermitianMatrix applied(scaled);

  const double bound = expected_lp_bound(applied, 4);
  std::vector<double> vals;
  const std::size_t trials = 2000;
  for (std::size_t t = 0; t < trials; ++t) {
    const UnitaryMatrix u = sample_haar_unitary(d, rng);
    const Eigen::VectorXd diffs = (u.mat().adjoint() * (scaled * u.mat())).diagonal().real();
    vals.push_back(diffs.array().pow(4).sum());
  }
  const auto ms = teststats::mean_stderr(vals);
  CHECK(ms.mean <= bound + 5.0 * ms.stderr_of_mean);
}
