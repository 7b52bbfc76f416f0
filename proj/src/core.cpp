#include "qlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qlab {

HermitianMatrix::HermitianMatrix(const Matrix& entries) {
  if (entries.rows() < 1 || entries.rows() != entries.cols()) {
    throw std::invalid_argument("HermitianMatrix: matrix must be square with dim >= 1");
  }
  const double dev = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 2.0 * kHermitianTol) {
    throw std::invalid_argument("HermitianMatrix: input deviates from Hermitian symmetry");
  }
  mat_ = 0.5 * (entries + entries.adjoint());
}

PureState::PureState(const Vector& amplitudes) {
  if (amplitudes.size() < 1) {
    throw std::invalid_argument("PureState: dimension must be >= 1");
  }
  if (std::abs(amplitudes.squaredNorm() - 1.0) > kHermitianTol) {
    throw std::invalid_argument("PureState: squared norm must be 1");
  }
  vec_ = amplitudes;
}

DensityMatrix::DensityMatrix(const HermitianMatrix& base) : base_(base) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(base_.mat());
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
  if (eigenvalues_.minCoeff() < -kEigenvalueTol) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
  }
  if (std::abs(base_.mat().trace().real() - 1.0) > kEigenvalueTol) {
    throw std::invalid_argument("DensityMatrix: trace must be 1");
  }
}

namespace {

Eigen::VectorXd hermitian_eigenvalues(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

double trace_norm(const Matrix& a) {
  return hermitian_eigenvalues(a).cwiseAbs().sum();
}

double trace_norm(const HermitianMatrix& a) { return trace_norm(a.mat()); }

double hs_norm(const Matrix& a) { return a.norm(); }

double hs_norm(const HermitianMatrix& a) { return a.mat().norm(); }

double op_norm(const Matrix& a) {
  return hermitian_eigenvalues(a).cwiseAbs().maxCoeff();
}

double op_norm(const HermitianMatrix& a) { return op_norm(a.mat()); }

HermitianMatrix truncate_rank(const HermitianMatrix& a, int r) {
  const int d = a.dim();
  if (r < 1 || r > d) {
    throw std::invalid_argument("truncate_rank: r out of range");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat());
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(es.eigenvalues()[i]) > std::abs(es.eigenvalues()[j]);
  });
  Matrix out = Matrix::Zero(d, d);
  for (int k = 0; k < r; ++k) {
    const int i = order[k];
    out += es.eigenvalues()[i] * es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  return HermitianMatrix(out);
}

std::vector<double> simplex_projection(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cumsum += sorted[k];
    const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) theta = t;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::max(values[i] - theta, 0.0);
  }
  return out;
}

DensityMatrix project_to_state(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat());
  std::vector<double> lam(es.eigenvalues().data(), es.eigenvalues().data() + a.dim());
  const std::vector<double> proj = simplex_projection(lam);
  Matrix out = Matrix::Zero(a.dim(), a.dim());
  for (int i = 0; i < a.dim(); ++i) {
    out += proj[i] * es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  return DensityMatrix(out);
}

}  // namespace qlab
