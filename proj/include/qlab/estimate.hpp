#pragma once

#include "qlab/core.hpp"
#include "qlab/measure.hpp"
#include "qlab/rng.hpp"

#include <utility>
#include <vector>

namespace qlab {

/// Knobs for the robust covariance estimators and constraint checker.
struct RobustConfig {
  double gamma = 0.1;                 // corruption fraction, [0, 0.5)
  int t = 1;                          // moment half-order, h = 2t
  double hyper_constant = 2.0;        // C in the moment constraints
  // Stop threshold multiplier on the certified bound 3/d^2. Calibration on
  // clean data at d in {4, 8}, n = 1e5 shows top eigenvalues <= ~1.3/d^2, so
  // the certified bound itself (slack 1) already gives no false removals
  // while staying below the shift a 5% replace attack induces at d = 8.
  double filter_threshold_slack = 1.0;
  double max_removed_fraction = -1.0; // < 0 means default 2 * gamma

  void validate() const;
  double removal_cap() const {
    return max_removed_fraction >= 0.0 ? max_removed_fraction : 2.0 * gamma;
  }
};

/// Theoretical HS-error scale eta = C sqrt(C) t (2 gamma)^{1 - 1/(2t)};
/// reported for dashboards (error scale eta/(d+1)), not enforced.
double sos_error_scale(const RobustConfig& cfg);

/// Per-probe margins from the constraint system check.
struct ConstraintReport {
  std::vector<bool> weights;
  std::size_t selected = 0;
  bool count_ok = false;
  bool sigma_ok = false;
  std::vector<double> hyper_margins;         // rhs - lhs per probe
  std::vector<double> second_moment_margins; // rhs - lhs per probe
  bool pass = false;
};

struct FilterResult {
  CovarianceEstimate covariance;
  bool threshold_met = false;   // warning flag when false: removal cap hit first
  int iterations = 0;
  std::size_t removed = 0;
  double final_top_eigenvalue = 0.0;
  std::vector<double> eigenvalue_trace;  // top eigenvalue per iteration
};

/// Plug-in estimator: rho_hat = (d+1) Sigma_hat - I. Hermitian and unit
/// trace, not necessarily PSD.
HermitianMatrix naive_tomography(const std::vector<Vector>& samples);
HermitianMatrix naive_tomography(const CovarianceEstimate& cov);

/// Iterative spectral filter over the d^2 x d^2 second-moment operator of
/// sample deviations. Stops when the top eigenvalue certifies the bounded
/// second-moment threshold slack * 3/d^2; removal is randomized proportional
/// to the score along the top deviation direction and capped at
/// removal_cap * n samples in total.
FilterResult filter_robust_covariance(const std::vector<Vector>& samples,
                                      const RobustConfig& cfg, Rng& rng);

/// Exhaustive ground-truth at n <= 20: enumerates all subsets of size
/// ceil((1-gamma) n) and returns the subset covariance minimizing the worst
/// single-sample deviation score over probe matrices (Gell-Mann directions
/// plus the subset's own top deviation direction). Deterministic
/// lexicographic tie-break.
CovarianceEstimate subset_oracle(const std::vector<Vector>& samples, double gamma);

/// Selected indices of the winning subset (exposed for planted-outlier tests).
std::vector<std::size_t> subset_oracle_selection(const std::vector<Vector>& samples,
                                                 double gamma);

/// Checks the boolean-weight constraint system: selected count, covariance
/// consistency, hypercontractivity, and bounded second moment per probe.
ConstraintReport check_constraints(const std::vector<Vector>& samples,
                                   const std::vector<bool>& w, const CovarianceEstimate& sigma,
                                   const std::vector<HermitianMatrix>& probes,
                                   const RobustConfig& cfg);

/// Closed-form second moment of |v><v| under D(rho):
/// (I + F)(I + I (x) rho + rho (x) I) / ((d+1)(d+2)), a d^2 x d^2 matrix.
Matrix second_moment_closed_form(const DensityMatrix& rho);

/// Kronecker product and the flip (swap) operator on C^d (x) C^d.
Matrix kron(const Matrix& a, const Matrix& b);
Matrix flip_operator(int d);

/// Monte Carlo hypercontractivity check: returns
/// (lhs, rhs) = ((d+1)^h (E[<v|M|v>^h])^2, ((h+1)!)^2 (Tr[M^2] + Tr[M]^2)^h).
std::pair<double, double> hypercontractivity_margin(const DensityMatrix& rho,
                                                    const HermitianMatrix& m, int h,
                                                    std::size_t n_mc, Rng& rng);

}  // namespace qlab
