#include "qlab/estimate.hpp"

#include "qlab/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qlab {

void RobustConfig::validate() const {
  if (gamma < 0.0 || gamma >= 0.5) {
    throw std::invalid_argument("RobustConfig: gamma must be in [0, 0.5)");
  }
  if (t < 1) throw std::invalid_argument("RobustConfig: t must be >= 1");
  if (hyper_constant <= 0.0) throw std::invalid_argument("RobustConfig: C must be > 0");
}

double sos_error_scale(const RobustConfig& cfg) {
  cfg.validate();
  const double c = cfg.hyper_constant;
  const double exponent = 1.0 - 1.0 / (2.0 * cfg.t);
  return c * std::sqrt(c) * cfg.t * std::pow(2.0 * cfg.gamma, exponent);
}

HermitianMatrix naive_tomography(const CovarianceEstimate& cov) {
  const int d = cov.dim();
  return HermitianMatrix((d + 1.0) * cov.sigma - Matrix::Identity(d, d));
}

HermitianMatrix naive_tomography(const std::vector<Vector>& samples) {
  return naive_tomography(accumulate_covariance(samples));
}

namespace {

Vector vec_of(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix mat_of(const Vector& v, int d) {
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

// Top (eigenvalue, Hermitian direction) of the deviation second-moment
// operator T = (1/n) sum vec(P_i - Sigma) vec(P_i - Sigma)^dag restricted to
// Hermitian observables. T leaves the Hermitian and anti-Hermitian subspaces
// invariant with mirrored spectra, so the Hermitian part of a top eigenvector
// (or i times its anti-Hermitian part) recovers an optimal Hermitian probe.
struct TopDeviation {
  double eigenvalue = 0.0;
  Matrix direction;  // Hermitian, unit HS norm
};

// Columns are vec(|v_i><v_i| - Sigma).
Matrix deviation_columns(const std::vector<const Vector*>& active, const Matrix& sigma) {
  const int d = static_cast<int>(sigma.rows());
  const Vector sigma_vec = vec_of(sigma);
  Matrix y(d * d, static_cast<int>(active.size()));
  for (std::size_t i = 0; i < active.size(); ++i) {
    const Vector& v = *active[i];
    for (int col = 0; col < d; ++col) {
      y.col(static_cast<int>(i)).segment(col * d, d) = std::conj(v(col)) * v;
    }
    y.col(static_cast<int>(i)) -= sigma_vec;
  }
  return y;
}

// Scores s_i = |<Q, P_i - Sigma>|^2 along a unit-HS-norm Hermitian direction.
Eigen::VectorXd deviation_scores(const Matrix& dev_cols, const Matrix& q) {
  const Vector q_vec = vec_of(q);
  return (q_vec.adjoint() * dev_cols).cwiseAbs2().transpose();
}

TopDeviation top_deviation_direction(const Matrix& dev_cols, int d) {
  const int d2 = d * d;
  const double n = static_cast<double>(dev_cols.cols());
  const Matrix t = dev_cols * dev_cols.adjoint() / n;
  Eigen::SelfAdjointEigenSolver<Matrix> es(t);
  const Matrix q0 = mat_of(es.eigenvectors().col(d2 - 1), d);
  Matrix herm = 0.5 * (q0 + q0.adjoint());
  Matrix anti = Complex(0.0, -0.5) * (q0 - q0.adjoint());
  Matrix q = (herm.norm() >= anti.norm()) ? herm : anti;
  q /= q.norm();
  const double eigenvalue = deviation_scores(dev_cols, q).sum() / n;
  return TopDeviation{eigenvalue, std::move(q)};
}

Matrix mean_projector(const std::vector<const Vector*>& active, int d) {
  Matrix sum = Matrix::Zero(d, d);
  for (const Vector* v : active) sum += (*v) * v->adjoint();
  return sum / static_cast<double>(active.size());
}

}  // namespace

FilterResult filter_robust_covariance(const std::vector<Vector>& samples,
                                      const RobustConfig& cfg, Rng& rng) {
  cfg.validate();
  if (samples.empty()) {
    throw std::invalid_argument("filter_robust_covariance: empty sample list");
  }
  const int d = static_cast<int>(samples.front().size());
  const double threshold = cfg.filter_threshold_slack * 3.0 / (static_cast<double>(d) * d);
  const std::size_t cap =
      static_cast<std::size_t>(std::floor(cfg.removal_cap() * static_cast<double>(samples.size())));

  std::vector<const Vector*> active;
  active.reserve(samples.size());
  for (const Vector& v : samples) active.push_back(&v);

  FilterResult result{};
  while (true) {
    ++result.iterations;
    const Matrix sigma = mean_projector(active, d);
    const Matrix dev_cols = deviation_columns(active, sigma);
    const TopDeviation top = top_deviation_direction(dev_cols, d);
    result.covariance = CovarianceEstimate{sigma, active.size()};
    result.final_top_eigenvalue = top.eigenvalue;
    result.eigenvalue_trace.push_back(top.eigenvalue);
    if (top.eigenvalue <= threshold) {
      result.threshold_met = true;
      return result;
    }
    if (result.removed >= cap) return result;  // cap hit: best iterate, warning flag

    // Randomized removal proportional to the score along the top direction.
    const Eigen::VectorXd score_vec = deviation_scores(dev_cols, top.direction);
    std::vector<double> scores(score_vec.data(), score_vec.data() + score_vec.size());
    const double max_score = *std::max_element(scores.begin(), scores.end());
    std::vector<const Vector*> kept;
    kept.reserve(active.size());
    std::size_t removed_now = 0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      const bool remove = result.removed + removed_now < cap &&
                          rng.uniform() < scores[i] / max_score;
      if (remove) {
        ++removed_now;
      } else {
        kept.push_back(active[i]);
      }
    }
    if (removed_now == 0) {
      // Degenerate round: drop the top-scoring sample to guarantee progress.
      const std::size_t worst =
          static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) -
                                   scores.begin());
      kept.clear();
      for (std::size_t i = 0; i < active.size(); ++i) {
        if (i != worst) kept.push_back(active[i]);
      }
      removed_now = 1;
    }
    result.removed += removed_now;
    active = std::move(kept);
    if (active.empty()) return result;
  }
}

namespace {

// Worst single-sample deviation over all probes. A min-max objective (rather
// than a mean/variance one) is what isolates a planted outlier: an injected
// projector orthogonal to the data can *lower* every probe variance while its
// own deviation stays the largest in the subset.
double max_probe_score(const Matrix& dev_cols, const std::vector<Matrix>& probes) {
  double worst = 0.0;
  for (const Matrix& q : probes) {
    worst = std::max(worst, deviation_scores(dev_cols, q).maxCoeff());
  }
  return worst;
}

void best_subset_search(const std::vector<Vector>& samples, double gamma,
                        std::vector<std::size_t>* best_out, Matrix* sigma_out) {
  const std::size_t n = samples.size();
  if (n == 0 || n > 20) {
    throw std::invalid_argument("subset_oracle: requires 1 <= n <= 20");
  }
  const int d = static_cast<int>(samples.front().size());
  const std::size_t keep =
      static_cast<std::size_t>(std::ceil((1.0 - gamma) * static_cast<double>(n)));
  const HermitianBasis gm = gell_mann_basis(d);
  std::vector<Matrix> base_probes(gm.elements().begin(), gm.elements().end());

  std::vector<std::size_t> indices(keep);
  std::iota(indices.begin(), indices.end(), 0);
  double best_score = -1.0;
  std::vector<std::size_t> best;
  Matrix best_sigma;
  while (true) {
    std::vector<const Vector*> subset;
    subset.reserve(keep);
    for (std::size_t i : indices) subset.push_back(&samples[i]);
    const Matrix sigma = mean_projector(subset, d);
    const Matrix dev_cols = deviation_columns(subset, sigma);
    std::vector<Matrix> probes = base_probes;
    probes.push_back(top_deviation_direction(dev_cols, d).direction);
    const double score = max_probe_score(dev_cols, probes);
    if (best_score < 0.0 || score < best_score) {  // strict <: lexicographic-first tie-break
      best_score = score;
      best = indices;
      best_sigma = sigma;
    }
    // Next combination in lexicographic order.
    std::size_t i = keep;
    while (i > 0 && indices[i - 1] == n - keep + i - 1) --i;
    if (i == 0) break;
    ++indices[i - 1];
    for (std::size_t j = i; j < keep; ++j) indices[j] = indices[j - 1] + 1;
  }
  *best_out = std::move(best);
  *sigma_out = std::move(best_sigma);
}

}  // namespace

CovarianceEstimate subset_oracle(const std::vector<Vector>& samples, double gamma) {
  std::vector<std::size_t> best;
  Matrix sigma;
  best_subset_search(samples, gamma, &best, &sigma);
  return CovarianceEstimate{std::move(sigma), best.size()};
}

std::vector<std::size_t> subset_oracle_selection(const std::vector<Vector>& samples,
                                                 double gamma) {
  std::vector<std::size_t> best;
  Matrix sigma;
  best_subset_search(samples, gamma, &best, &sigma);
  return best;
}

ConstraintReport check_constraints(const std::vector<Vector>& samples,
                                   const std::vector<bool>& w, const CovarianceEstimate& sigma,
                                   const std::vector<HermitianMatrix>& probes,
                                   const RobustConfig& cfg) {
  cfg.validate();
  if (w.size() != samples.size()) {
    throw std::invalid_argument("check_constraints: weight length mismatch");
  }
  if (probes.empty()) {
    throw std::invalid_argument("check_constraints: probe list must be nonempty");
  }
  ConstraintReport report;
  report.weights = w;
  std::vector<const Vector*> selected;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (w[i]) selected.push_back(&samples[i]);
  }
  report.selected = selected.size();
  const double target = (1.0 - cfg.gamma) * static_cast<double>(samples.size());
  report.count_ok = std::abs(static_cast<double>(report.selected) - target) < 0.5 + 1e-9;

  if (selected.empty()) return report;
  const int d = static_cast<int>(samples.front().size());
  const Matrix sel_sigma = mean_projector(selected, d);
  report.sigma_ok = (sel_sigma - sigma.sigma).cwiseAbs().maxCoeff() <= 1e-8;

  const double c = cfg.hyper_constant;
  const int h = 2 * cfg.t;
  const double ct_pow = std::pow(c * cfg.t, static_cast<double>(h));
  for (const HermitianMatrix& probe : probes) {
    const Matrix& q = probe.mat();
    double mean_sq = 0.0;
    double mean_h = 0.0;
    for (const Vector* v : selected) {
      const double val = (v->adjoint() * q * (*v))(0, 0).real();
      mean_sq += val * val;
      mean_h += std::pow(val, static_cast<double>(h));
    }
    mean_sq /= static_cast<double>(selected.size());
    mean_h /= static_cast<double>(selected.size());
    const double hyper_rhs = ct_pow * std::pow(mean_sq, static_cast<double>(cfg.t));
    report.hyper_margins.push_back(hyper_rhs - mean_h);
    const double tr_q = q.trace().real();
    const double sm_rhs =
        c * (q.squaredNorm() + tr_q * tr_q) / ((d + 1.0) * (d + 1.0));
    report.second_moment_margins.push_back(sm_rhs - mean_sq);
  }
  const auto nonneg = [](const std::vector<double>& m) {
    return std::all_of(m.begin(), m.end(), [](double x) { return x >= 0.0; });
  };
  report.pass = report.count_ok && report.sigma_ok && nonneg(report.hyper_margins) &&
                nonneg(report.second_moment_margins);
  return report;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix flip_operator(int d) {
  Matrix f = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      f(i * d + j, j * d + i) = 1.0;
    }
  }
  return f;
}

Matrix second_moment_closed_form(const DensityMatrix& rho) {
  const int d = rho.dim();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix id2 = Matrix::Identity(d * d, d * d);
  const Matrix mix = id2 + kron(id, rho.mat()) + kron(rho.mat(), id);
  return (id2 + flip_operator(d)) * mix / ((d + 1.0) * (d + 2.0));
}

std::pair<double, double> hypercontractivity_margin(const DensityMatrix& rho,
                                                    const HermitianMatrix& m, int h,
                                                    std::size_t n_mc, Rng& rng) {
  if (h < 2 || h % 2 != 0 || h > kMaxMomentOrder) {
    throw std::invalid_argument("hypercontractivity_margin: h must be even with 2 <= h <= 6");
  }
  const int d = rho.dim();
  const UniformPovmSampler sampler(rho);
  double mean_h = 0.0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const Vector v = sampler.draw(rng);
    const double val = (v.adjoint() * m.mat() * v)(0, 0).real();
    mean_h += std::pow(val, static_cast<double>(h));
  }
  mean_h /= static_cast<double>(n_mc);
  const double lhs = std::pow(d + 1.0, static_cast<double>(h)) * mean_h * mean_h;
  double fact = 1.0;
  for (int j = 2; j <= h + 1; ++j) fact *= j;
  const double tr_m = m.mat().trace().real();
  const double base = m.mat().squaredNorm() + tr_m * tr_m;
  const double rhs = fact * fact * std::pow(base, static_cast<double>(h));
  return {lhs, rhs};
}

}  // namespace qlab
