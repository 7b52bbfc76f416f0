#pragma once

#include "qlab/core.hpp"
#include "qlab/haar.hpp"
#include "qlab/rng.hpp"

#include <vector>

namespace qlab {

/// Finite POVM: PSD effects summing to identity (entrywise to 1e-8).
class Povm {
public:
  Povm(int dim, std::vector<Matrix> effects);

  int dim() const { return dim_; }
  int num_outcomes() const { return static_cast<int>(effects_.size()); }
  const std::vector<Matrix>& effects() const { return effects_; }
  const Matrix& effect(int x) const { return effects_[static_cast<std::size_t>(x)]; }

private:
  int dim_;
  std::vector<Matrix> effects_;
};

/// Nonnegative probability vector summing to 1 +- 1e-9.
class OutcomeDistribution {
public:
  explicit OutcomeDistribution(std::vector<double> probabilities);

  int num_outcomes() const { return static_cast<int>(probs_.size()); }
  double prob(int x) const { return probs_[static_cast<std::size_t>(x)]; }
  const std::vector<double>& probs() const { return probs_; }

private:
  std::vector<double> probs_;
};

/// Empirical second moment of uniform-POVM outcomes: Hermitian, PSD,
/// unit trace (average of unit-trace projectors).
struct CovarianceEstimate {
  Matrix sigma;
  std::size_t count = 0;

  int dim() const { return static_cast<int>(sigma.rows()); }
};

/// Basis measurement M_U = {|u_i><u_i|}.
Povm basis_povm(const UnitaryMatrix& u);

/// Born's rule: p(x) = Tr[rho M_x].
OutcomeDistribution born_distribution(const DensityMatrix& rho, const Povm& m);

/// n i.i.d. categorical draws via inverse CDF on a precomputed cumulative array.
std::vector<int> sample_outcomes(const OutcomeDistribution& dist, std::size_t n, Rng& rng);

/// Total variation distance 0.5 sum_x |p(x) - q(x)|.
double total_variation(const OutcomeDistribution& p, const OutcomeDistribution& q);

/// Exact sampler for the uniform-POVM outcome law D(rho) with density
/// d <v|rho|v> dv. Eigendecomposes rho once; each draw picks an eigenvector
/// index i ~ lambda, a weight w ~ Beta(2, d-1), a uniform phase, and a Haar
/// vector in the orthogonal complement of the chosen eigenvector.
class UniformPovmSampler {
public:
  explicit UniformPovmSampler(const DensityMatrix& rho);

  Vector draw(Rng& rng) const;
  std::vector<Vector> draw_many(std::size_t n, Rng& rng) const;

private:
  int dim_;
  Eigen::VectorXd cumulative_;
  Matrix eigenvectors_;
};

Vector sample_uniform_povm(const DensityMatrix& rho, Rng& rng);

/// Sigma_hat = (1/n) sum |v_i><v_i|.
CovarianceEstimate accumulate_covariance(const std::vector<Vector>& samples);

}  // namespace qlab
