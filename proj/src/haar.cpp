#include "qlab/haar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qlab {

UnitaryMatrix::UnitaryMatrix(const Matrix& entries) {
  if (entries.rows() < 1 || entries.rows() != entries.cols()) {
    throw std::invalid_argument("UnitaryMatrix: matrix must be square with dim >= 1");
  }
  const Matrix gram = entries.adjoint() * entries;
  const double dev = (gram - Matrix::Identity(entries.rows(), entries.cols())).cwiseAbs().maxCoeff();
  if (dev > 1e-8) {
    throw std::invalid_argument("UnitaryMatrix: U^dag U deviates from identity");
  }
  mat_ = entries;
}

PermutationSpec PermutationSpec::from_mapping(const std::vector<int>& mapping) {
  const int k = static_cast<int>(mapping.size());
  std::vector<bool> seen(mapping.size(), false);
  for (int v : mapping) {
    if (v < 0 || v >= k || seen[v]) {
      throw std::invalid_argument("PermutationSpec: mapping is not a bijection");
    }
    seen[v] = true;
  }
  PermutationSpec spec;
  spec.mapping = mapping;
  std::vector<bool> visited(mapping.size(), false);
  for (int i = 0; i < k; ++i) {
    if (visited[i]) continue;
    int len = 0;
    for (int j = i; !visited[j]; j = mapping[j]) {
      visited[j] = true;
      ++len;
    }
    spec.cycle_lengths.push_back(len);
  }
  return spec;
}

UnitaryMatrix sample_haar_unitary(int d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("sample_haar_unitary: d must be >= 1");
  Matrix z(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      z(i, j) = rng.complex_normal();
    }
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    Complex rii = r(i, i);
    const double a = std::abs(rii);
    q.col(i) *= (a > 0.0) ? rii / a : Complex(1.0, 0.0);
  }
  return UnitaryMatrix(q);
}

PureState sample_haar_state(int d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("sample_haar_state: d must be >= 1");
  Vector z(d);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < d; ++i) z(i) = rng.complex_normal();
    norm2 = z.squaredNorm();
  } while (norm2 == 0.0);
  return PureState(z / std::sqrt(norm2));
}

double symmetric_moment_scale(int d, int k) {
  if (k < 1) throw std::invalid_argument("symmetric_moment_scale: k must be >= 1");
  // binom(d+k-1, k) = prod_{j=1}^{k} (d+j-1)/j
  double binom = 1.0;
  for (int j = 1; j <= k; ++j) {
    binom *= static_cast<double>(d + j - 1) / static_cast<double>(j);
  }
  return 1.0 / binom;
}

namespace {

// Calls fn(cycle_lengths) for every permutation of {0..k-1}.
template <typename Fn>
void for_each_permutation(int k, Fn&& fn) {
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    fn(PermutationSpec::from_mapping(perm).cycle_lengths);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace

double haar_trace_moment(const HermitianMatrix& m, int k) {
  if (k < 1 || k > kMaxMomentOrder) {
    throw std::invalid_argument("haar_trace_moment: order must satisfy 1 <= k <= 6");
  }
  const int d = m.dim();
  // Tr[M^j] from eigenvalues, j = 1..k.
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat(), Eigen::EigenvaluesOnly);
  std::vector<double> trace_pow(k + 1, 0.0);
  for (int i = 0; i < d; ++i) {
    double p = 1.0;
    for (int j = 1; j <= k; ++j) {
      p *= es.eigenvalues()[i];
      trace_pow[j] += p;
    }
  }
  double total = 0.0;
  double kfact = 1.0;
  for (int j = 2; j <= k; ++j) kfact *= j;
  for_each_permutation(k, [&](const std::vector<int>& cycles) {
    double prod = 1.0;
    for (int len : cycles) prod *= trace_pow[len];
    total += prod;
  });
  return symmetric_moment_scale(d, k) * total / kfact;
}

double cycle_count_generating_sum(int d, int k) {
  if (k < 1 || k > kMaxMomentOrder) {
    throw std::invalid_argument("cycle_count_generating_sum: 1 <= k <= 6");
  }
  double total = 0.0;
  for_each_permutation(k, [&](const std::vector<int>& cycles) {
    total += std::pow(static_cast<double>(d), static_cast<double>(cycles.size()));
  });
  return total;
}

}  // namespace qlab
