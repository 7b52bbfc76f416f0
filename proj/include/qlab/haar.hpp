#pragma once

#include "qlab/core.hpp"
#include "qlab/rng.hpp"

namespace qlab {

/// d x d unitary, validated U^dag U = I to 1e-8 entrywise.
class UnitaryMatrix {
public:
  explicit UnitaryMatrix(const Matrix& entries);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& mat() const { return mat_; }
  Vector column(int i) const { return mat_.col(i); }

private:
  Matrix mat_;
};

/// Permutation of {0..k-1} with its cycle decomposition.
struct PermutationSpec {
  std::vector<int> mapping;
  std::vector<int> cycle_lengths;

  static PermutationSpec from_mapping(const std::vector<int>& mapping);
  int size() const { return static_cast<int>(mapping.size()); }
};

/// Haar-distributed unitary: Ginibre matrix + QR with the R diagonal phases
/// folded back into Q (plain QR of a Ginibre matrix is not Haar).
UnitaryMatrix sample_haar_unitary(int d, Rng& rng);

/// Uniform point on the complex unit sphere.
PureState sample_haar_state(int d, Rng& rng);

inline constexpr int kMaxMomentOrder = 6;

/// Exact E_Haar[<u|M|u>^k] via permutation-cycle enumeration:
/// binom(d+k-1,k)^{-1} (1/k!) sum_{pi in S_k} prod_{c in C(pi)} Tr[M^{|c|}].
/// Supported for k <= 6 (k! enumeration).
double haar_trace_moment(const HermitianMatrix& m, int k);

/// binom(d+k-1,k)^{-1}, the scalar prefactor of E[|u><u|^{otimes k}].
double symmetric_moment_scale(int d, int k);

/// sum_{pi in S_k} d^{#cycles(pi)} = d(d+1)...(d+k-1); exposed for
/// validating the cycle enumeration.
double cycle_count_generating_sum(int d, int k);

}  // namespace qlab
