#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace qlab {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kEigenvalueTol = 1e-9;

/// d x d Hermitian matrix. Construction validates conjugate symmetry to
/// 1e-10 and stores the exact Hermitian part (A + A^dag)/2.
class HermitianMatrix {
public:
  explicit HermitianMatrix(const Matrix& entries);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& mat() const { return mat_; }

  static HermitianMatrix zero(int d) { return HermitianMatrix(Matrix::Zero(d, d)); }
  static HermitianMatrix identity(int d) {
    return HermitianMatrix(Matrix::Identity(d, d));
  }

private:
  Matrix mat_;
};

/// Unit vector in C^d; squared norm validated to 1e-10.
class PureState {
public:
  explicit PureState(const Vector& amplitudes);

  int dim() const { return static_cast<int>(vec_.size()); }
  const Vector& vec() const { return vec_; }
  Matrix projector() const { return vec_ * vec_.adjoint(); }

private:
  Vector vec_;
};

/// Quantum state: Hermitian, PSD (eigenvalues >= -1e-9), trace 1 +- 1e-9.
/// The eigendecomposition is computed at construction and cached.
class DensityMatrix {
public:
  explicit DensityMatrix(const HermitianMatrix& base);
  explicit DensityMatrix(const Matrix& entries) : DensityMatrix(HermitianMatrix(entries)) {}

  int dim() const { return base_.dim(); }
  const Matrix& mat() const { return base_.mat(); }
  const HermitianMatrix& base() const { return base_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }

  static DensityMatrix maximally_mixed(int d) {
    return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d));
  }
  static DensityMatrix pure(const PureState& psi) { return DensityMatrix(psi.projector()); }

private:
  HermitianMatrix base_;
  Eigen::VectorXd eigenvalues_;
  Matrix eigenvectors_;
};

/// Schatten-1 norm: sum of |eigenvalues|.
double trace_norm(const HermitianMatrix& a);
double trace_norm(const Matrix& a);

/// Schatten-2 norm, computed entrywise as sqrt(Tr[A^2]).
double hs_norm(const HermitianMatrix& a);
double hs_norm(const Matrix& a);

/// Schatten-inf norm: largest |eigenvalue|.
double op_norm(const HermitianMatrix& a);
double op_norm(const Matrix& a);

/// Best rank-r approximation in HS norm (Eckart-Young-Mirsky): keeps the r
/// eigenvalues of largest absolute value, ties broken toward the earlier
/// index in descending-|lambda| order.
HermitianMatrix truncate_rank(const HermitianMatrix& a, int r);

/// Euclidean projection of the eigenvalues onto the probability simplex,
/// eigenvectors preserved. Idempotent on valid states.
DensityMatrix project_to_state(const HermitianMatrix& a);

/// Projection of a real vector onto {x >= 0, sum x = 1}.
std::vector<double> simplex_projection(const std::vector<double>& values);

}  // namespace qlab
