#pragma once

#include "qlab/core.hpp"
#include "qlab/measure.hpp"
#include "qlab/rng.hpp"

#include <vector>

namespace qlab {

/// Orthonormal Hermitian basis of d x d matrices: d^2 - 1 traceless elements
/// followed by I/sqrt(d).
class HermitianBasis {
public:
  HermitianBasis(int dim, std::vector<Matrix> elements);

  int dim() const { return dim_; }
  std::size_t size() const { return elements_.size(); }
  const Matrix& element(std::size_t i) const { return elements_[i]; }
  const std::vector<Matrix>& elements() const { return elements_; }

private:
  int dim_;
  std::vector<Matrix> elements_;
};

/// Generalized Gell-Mann construction. Ordering: symmetric pairs
/// (E_ij + E_ji)/sqrt(2) for i < j in lexicographic (i, j), then
/// antisymmetric pairs i(E_ij - E_ji)/sqrt(2), then the diagonal traceless
/// ladder, then I/sqrt(d) last.
HermitianBasis gell_mann_basis(int d);

/// Normalized Pauli strings for d = 2^num_qubits; identity string last.
/// Provided as a cross-check basis.
HermitianBasis pauli_basis(int num_qubits);

/// Sign-vector perturbation of the maximally mixed state:
/// sigma_z = I/d + Delta_z min{1, 1/(2 d opnorm(Delta_z))} with
/// Delta_z = (c eps / sqrt(d ell)) sum z_i V_i.
struct PerturbedState {
  std::vector<int> z;          // entries in {-1, +1}
  std::size_t ell = 0;
  double epsilon = 0.0;
  double c_const = 0.0;
  Matrix delta;                // unclipped Delta_z
  double clip = 1.0;
  DensityMatrix state;
};

inline constexpr double kPerturbationConstant = 14.142135623730950488;  // 10 sqrt(2)

PerturbedState sample_perturbed_state(int d, std::size_t ell, double epsilon, double c_const,
                                      Rng& rng, const HermitianBasis& basis);
PerturbedState sample_perturbed_state(int d, std::size_t ell, double epsilon, Rng& rng);

/// Measurement information channel applied to an observable:
/// H_M(A) = sum_x M_x Tr[M_x A] / Tr[M_x].
Matrix apply_info_channel(const Povm& m, const Matrix& a);

/// Matrix form C_M = sum_x vec(M_x) vec(M_x)^dag / Tr[M_x]; PSD with
/// trace sum_x Tr[M_x^2]/Tr[M_x].
struct InfoChannel {
  int dim = 0;
  Matrix matrix;  // d^2 x d^2

  double trace() const { return matrix.trace().real(); }
};

InfoChannel info_channel(const Povm& m);

struct ChiSquareCheck {
  double empirical_mean = 0.0;  // mean chi^2(p_z || p_mm) over sampled z
  double bound = 0.0;           // c^2 (eps^2/ell) sum_{i<=ell} <V_i, H(V_i)>
  double loose_bound = 0.0;     // c^2 (eps^2/ell) trace(C_M)
};

/// Monte Carlo over sign vectors vs the closed-form chi-square bound.
ChiSquareCheck chi_square_bound_check(const Povm& m, const HermitianBasis& basis,
                                      std::size_t ell, double epsilon, std::size_t n_z,
                                      Rng& rng);

/// Testing-error lower bound scale gamma d / (4 sqrt(sup Tr H)).
double critical_epsilon(double gamma, int d, double trace_h_sup);

/// Earth-mover distance upper bound 2 n eps sqrt(max_m trace(C_m)) / d.
double emd_upper_bound(const std::vector<Povm>& povms, std::size_t n, double epsilon);

}  // namespace qlab
