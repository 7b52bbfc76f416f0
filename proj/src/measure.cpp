#include "qlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qlab {

Povm::Povm(int dim, std::vector<Matrix> effects) : dim_(dim), effects_(std::move(effects)) {
  if (dim_ < 1 || effects_.empty()) {
    throw std::invalid_argument("Povm: need dim >= 1 and at least one effect");
  }
  Matrix sum = Matrix::Zero(dim_, dim_);
  for (const Matrix& e : effects_) {
    if (e.rows() != dim_ || e.cols() != dim_) {
      throw std::invalid_argument("Povm: effect dimension mismatch");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(e, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kEigenvalueTol) {
      throw std::invalid_argument("Povm: effect is not PSD");
    }
    sum += e;
  }
  if ((sum - Matrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::invalid_argument("Povm: effects do not sum to identity");
  }
}

OutcomeDistribution::OutcomeDistribution(std::vector<double> probabilities)
    : probs_(std::move(probabilities)) {
  if (probs_.empty()) throw std::invalid_argument("OutcomeDistribution: empty");
  double sum = 0.0;
  for (double p : probs_) {
    if (p < -kEigenvalueTol) {
      throw std::invalid_argument("OutcomeDistribution: negative probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kEigenvalueTol) {
    throw std::invalid_argument("OutcomeDistribution: probabilities must sum to 1");
  }
  for (double& p : probs_) p = std::max(p, 0.0);
}

Povm basis_povm(const UnitaryMatrix& u) {
  std::vector<Matrix> effects;
  effects.reserve(static_cast<std::size_t>(u.dim()));
  for (int i = 0; i < u.dim(); ++i) {
    const Vector col = u.column(i);
    effects.push_back(col * col.adjoint());
  }
  return Povm(u.dim(), std::move(effects));
}

OutcomeDistribution born_distribution(const DensityMatrix& rho, const Povm& m) {
  if (rho.dim() != m.dim()) {
    throw std::invalid_argument("born_distribution: dimension mismatch");
  }
  std::vector<double> p(static_cast<std::size_t>(m.num_outcomes()));
  for (int x = 0; x < m.num_outcomes(); ++x) {
    p[static_cast<std::size_t>(x)] =
        std::max((rho.mat() * m.effect(x)).trace().real(), 0.0);
  }
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= sum;
  return OutcomeDistribution(std::move(p));
}

std::vector<int> sample_outcomes(const OutcomeDistribution& dist, std::size_t n, Rng& rng) {
  std::vector<double> cdf(dist.probs().size());
  std::partial_sum(dist.probs().begin(), dist.probs().end(), cdf.begin());
  cdf.back() = 1.0;
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    out[i] = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  }
  return out;
}

double total_variation(const OutcomeDistribution& p, const OutcomeDistribution& q) {
  if (p.num_outcomes() != q.num_outcomes()) {
    throw std::invalid_argument("total_variation: label sets differ");
  }
  double s = 0.0;
  for (int x = 0; x < p.num_outcomes(); ++x) s += std::abs(p.prob(x) - q.prob(x));
  return 0.5 * s;
}

UniformPovmSampler::UniformPovmSampler(const DensityMatrix& rho)
    : dim_(rho.dim()), eigenvectors_(rho.eigenvectors()) {
  cumulative_.resize(dim_);
  double acc = 0.0;
  for (int i = 0; i < dim_; ++i) {
    acc += std::max(rho.eigenvalues()[i], 0.0);
    cumulative_[i] = acc;
  }
  cumulative_[dim_ - 1] = 1.0;
}

Vector UniformPovmSampler::draw(Rng& rng) const {
  // d<v|rho|v> dv = sum_i lambda_i d|<psi_i|v>|^2 dv: a lambda-mixture of
  // single-eigenvector size-biased laws. For component i the overlap
  // |<psi_i|v>|^2 is Beta(2, d-1)-distributed and the rest of v is Haar in
  // the complement.
  const double u = rng.uniform();
  int idx = 0;
  while (idx < dim_ - 1 && cumulative_[idx] <= u) ++idx;
  const Vector psi = eigenvectors_.col(idx);
  if (dim_ == 1) {
    const double phi = 2.0 * M_PI * rng.uniform();
    return psi * Complex(std::cos(phi), std::sin(phi));
  }
  // Beta(2, d-1) via Gamma(2) / (Gamma(2) + Gamma(d-1)); integer-shape
  // gammas as sums of exponentials keep the draw exactly reproducible.
  double g2 = rng.exponential() + rng.exponential();
  double gd = 0.0;
  for (int j = 0; j < dim_ - 1; ++j) gd += rng.exponential();
  const double w = g2 / (g2 + gd);
  const double phi = 2.0 * M_PI * rng.uniform();
  // Haar vector in the orthogonal complement of psi.
  Vector z(dim_);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < dim_; ++i) z(i) = rng.complex_normal();
    z -= psi * psi.dot(z);
    norm2 = z.squaredNorm();
  } while (norm2 < 1e-300);
  z /= std::sqrt(norm2);
  Vector v = std::sqrt(w) * Complex(std::cos(phi), std::sin(phi)) * psi +
             std::sqrt(1.0 - w) * z;
  return v / v.norm();
}

std::vector<Vector> UniformPovmSampler::draw_many(std::size_t n, Rng& rng) const {
  std::vector<Vector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(draw(rng));
  return out;
}

Vector sample_uniform_povm(const DensityMatrix& rho, Rng& rng) {
  return UniformPovmSampler(rho).draw(rng);
}

CovarianceEstimate accumulate_covariance(const std::vector<Vector>& samples) {
  if (samples.empty()) {
    throw std::invalid_argument("accumulate_covariance: empty sample list");
  }
  const int d = static_cast<int>(samples.front().size());
  Matrix sum = Matrix::Zero(d, d);
  for (const Vector& v : samples) {
    if (v.size() != d) {
      throw std::invalid_argument("accumulate_covariance: dimension mismatch");
    }
    sum += v * v.adjoint();
  }
  return CovarianceEstimate{sum / static_cast<double>(samples.size()), samples.size()};
}

}  // namespace qlab
