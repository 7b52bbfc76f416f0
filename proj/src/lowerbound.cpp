#include "qlab/lowerbound.hpp"

#include <cmath>

namespace qlab {

HermitianBasis::HermitianBasis(int dim, std::vector<Matrix> elements)
    : dim_(dim), elements_(std::move(elements)) {
  if (dim_ < 2) throw std::invalid_argument("HermitianBasis: d must be >= 2");
  const std::size_t expected = static_cast<std::size_t>(dim_) * static_cast<std::size_t>(dim_);
  if (elements_.size() != expected) {
    throw std::invalid_argument("HermitianBasis: need exactly d^2 elements");
  }
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i].rows() != dim_ || elements_[i].cols() != dim_) {
      throw std::invalid_argument("HermitianBasis: element dimension mismatch");
    }
    if (i + 1 < elements_.size() && std::abs(elements_[i].trace().real()) > kEigenvalueTol) {
      throw std::invalid_argument("HermitianBasis: non-final element must be traceless");
    }
  }
}

HermitianBasis gell_mann_basis(int d) {
  if (d < 2) throw std::invalid_argument("gell_mann_basis: d must be >= 2");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<Matrix> elems;
  elems.reserve(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      Matrix s = Matrix::Zero(d, d);
      s(i, j) = inv_sqrt2;
      s(j, i) = inv_sqrt2;
      elems.push_back(s);
    }
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      Matrix a = Matrix::Zero(d, d);
      a(i, j) = Complex(0.0, -inv_sqrt2);
      a(j, i) = Complex(0.0, inv_sqrt2);
      elems.push_back(a);
    }
  }
  // Diagonal ladder: diag(1,..,1,-k,0,..)/sqrt(k(k+1)) with k ones.
  for (int k = 1; k < d; ++k) {
    Matrix m = Matrix::Zero(d, d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1.0));
    for (int i = 0; i < k; ++i) m(i, i) = scale;
    m(k, k) = -static_cast<double>(k) * scale;
    elems.push_back(m);
  }
  elems.push_back(Matrix::Identity(d, d) / std::sqrt(static_cast<double>(d)));
  return HermitianBasis(d, std::move(elems));
}

HermitianBasis pauli_basis(int num_qubits) {
  if (num_qubits < 1) throw std::invalid_argument("pauli_basis: need >= 1 qubit");
  Matrix id = Matrix::Identity(2, 2);
  Matrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  sz << 1, 0, 0, -1;
  const std::vector<Matrix> single = {id, sx, sy, sz};
  const int d = 1 << num_qubits;
  std::vector<Matrix> elems;
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  const int total = d * d;  // 4^num_qubits strings
  for (int code = 1; code <= total; ++code) {
    const int string = code % total;  // identity string (0) emitted last
    Matrix m = Matrix::Identity(1, 1);
    int rest = string;
    for (int q = 0; q < num_qubits; ++q) {
      const Matrix& factor = single[static_cast<std::size_t>(rest % 4)];
      rest /= 4;
      Matrix next(m.rows() * 2, m.cols() * 2);
      next.topLeftCorner(m.rows(), m.cols()) = factor(0, 0) * m;
      next.topRightCorner(m.rows(), m.cols()) = factor(0, 1) * m;
      next.bottomLeftCorner(m.rows(), m.cols()) = factor(1, 0) * m;
      next.bottomRightCorner(m.rows(), m.cols()) = factor(1, 1) * m;
      m = next;
    }
    elems.push_back(norm * m);
  }
  return HermitianBasis(d, std::move(elems));
}

PerturbedState sample_perturbed_state(int d, std::size_t ell, double epsilon, double c_const,
                                      Rng& rng, const HermitianBasis& basis) {
  const std::size_t d2 = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
  if (ell < d2 / 2 || ell > d2 - 1) {
    throw std::invalid_argument("sample_perturbed_state: require d^2/2 <= ell <= d^2 - 1");
  }
  if (basis.dim() != d) {
    throw std::invalid_argument("sample_perturbed_state: basis dimension mismatch");
  }
  std::vector<int> z(ell);
  Matrix delta = Matrix::Zero(d, d);
  const double scale = c_const * epsilon / std::sqrt(static_cast<double>(d) * ell);
  for (std::size_t i = 0; i < ell; ++i) {
    z[i] = rng.uniform() < 0.5 ? -1 : 1;
    delta += scale * static_cast<double>(z[i]) * basis.element(i);
  }
  const double onorm = op_norm(delta);
  const double clip = (onorm > 0.0) ? std::min(1.0, 1.0 / (2.0 * d * onorm)) : 1.0;
  Matrix sigma = Matrix::Identity(d, d) / static_cast<double>(d) + clip * delta;
  return PerturbedState{std::move(z), ell,  epsilon, c_const,
                        std::move(delta),  clip, DensityMatrix(sigma)};
}

PerturbedState sample_perturbed_state(int d, std::size_t ell, double epsilon, Rng& rng) {
  return sample_perturbed_state(d, ell, epsilon, kPerturbationConstant, rng,
                                gell_mann_basis(d));
}

Matrix apply_info_channel(const Povm& m, const Matrix& a) {
  Matrix out = Matrix::Zero(m.dim(), m.dim());
  for (const Matrix& effect : m.effects()) {
    const double tr = effect.trace().real();
    if (tr <= kEigenvalueTol) {
      if (effect.norm() > 1e-8) {
        throw std::invalid_argument("apply_info_channel: zero-trace effect with nonzero norm");
      }
      continue;
    }
    out += effect * ((effect * a).trace() / tr);
  }
  return out;
}

namespace {

Vector vec_of(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

}  // namespace

InfoChannel info_channel(const Povm& m) {
  const int d = m.dim();
  Matrix c = Matrix::Zero(d * d, d * d);
  for (const Matrix& effect : m.effects()) {
    const double tr = effect.trace().real();
    if (tr <= kEigenvalueTol) {
      if (effect.norm() > 1e-8) {
        throw std::invalid_argument("info_channel: zero-trace effect with nonzero norm");
      }
      continue;
    }
    const Vector v = vec_of(effect);
    c += v * v.adjoint() / tr;
  }
  return InfoChannel{d, std::move(c)};
}

ChiSquareCheck chi_square_bound_check(const Povm& m, const HermitianBasis& basis,
                                      std::size_t ell, double epsilon, std::size_t n_z,
                                      Rng& rng) {
  const int d = m.dim();
  const DensityMatrix mm = DensityMatrix::maximally_mixed(d);
  const OutcomeDistribution p_mm = born_distribution(mm, m);
  for (int x = 0; x < p_mm.num_outcomes(); ++x) {
    if (p_mm.prob(x) <= kEigenvalueTol) {
      throw std::invalid_argument(
          "chi_square_bound_check: reference probability vanishes for an outcome");
    }
  }
  ChiSquareCheck out;
  for (std::size_t trial = 0; trial < n_z; ++trial) {
    const PerturbedState ps =
        sample_perturbed_state(d, ell, epsilon, kPerturbationConstant, rng, basis);
    const OutcomeDistribution p_z = born_distribution(ps.state, m);
    double chi2 = 0.0;
    for (int x = 0; x < p_mm.num_outcomes(); ++x) {
      const double diff = p_z.prob(x) - p_mm.prob(x);
      chi2 += diff * diff / p_mm.prob(x);
    }
    out.empirical_mean += chi2;
  }
  out.empirical_mean /= static_cast<double>(n_z);

  double quad_sum = 0.0;  // sum_{i<=ell} <V_i, H(V_i)>
  for (std::size_t i = 0; i < ell; ++i) {
    const Matrix& v = basis.element(i);
    quad_sum += (v * apply_info_channel(m, v)).trace().real();
  }
  // The c^2 factor comes from Delta_z = (c eps / sqrt(d ell)) sum z_i V_i;
  // expanding chi^2 exactly gives c^2 (eps^2/ell) sum <V_i, H(V_i)> before the
  // clip (a_z <= 1) is dropped.
  const double scale2 = kPerturbationConstant * kPerturbationConstant * epsilon * epsilon /
                        static_cast<double>(ell);
  out.bound = scale2 * quad_sum;
  out.loose_bound = scale2 * info_channel(m).trace();
  return out;
}

double critical_epsilon(double gamma, int d, double trace_h_sup) {
  if (gamma < 0.0 || d < 1 || trace_h_sup <= 0.0) {
    throw std::invalid_argument("critical_epsilon: inputs must be positive");
  }
  return gamma * static_cast<double>(d) / (4.0 * std::sqrt(trace_h_sup));
}

double emd_upper_bound(const std::vector<Povm>& povms, std::size_t n, double epsilon) {
  if (povms.empty()) throw std::invalid_argument("emd_upper_bound: empty measurement list");
  double max_trace = 0.0;
  for (const Povm& m : povms) max_trace = std::max(max_trace, info_channel(m).trace());
  return 2.0 * static_cast<double>(n) * epsilon * std::sqrt(max_trace) /
         static_cast<double>(povms.front().dim());
}

}  // namespace qlab
