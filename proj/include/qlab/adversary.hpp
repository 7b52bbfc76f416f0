#pragma once

#include "qlab/core.hpp"
#include "qlab/measure.hpp"
#include "qlab/rng.hpp"

#include <cmath>
#include <type_traits>
#include <vector>

namespace qlab {

/// Sequence of measurement outcomes with per-index corruption flags.
/// T is int for basis-POVM labels or Vector for uniform-POVM outcomes.
template <typename T>
struct OutcomeRecord {
  std::vector<T> entries;
  std::vector<bool> corrupted_flags;
  std::size_t budget_used = 0;

  static OutcomeRecord clean(std::vector<T> entries_in) {
    OutcomeRecord rec;
    rec.corrupted_flags.assign(entries_in.size(), false);
    rec.entries = std::move(entries_in);
    return rec;
  }

  std::size_t size() const { return entries.size(); }
};

using LabelRecord = OutcomeRecord<int>;
using VectorRecord = OutcomeRecord<Vector>;

inline std::size_t corruption_budget(std::size_t n, double gamma) {
  return static_cast<std::size_t>(std::floor(gamma * static_cast<double>(n)));
}

/// Per-index (source, target) distribution pairs with precomputed TV distances.
class CouplingPlan {
public:
  CouplingPlan(std::vector<OutcomeDistribution> sources,
               std::vector<OutcomeDistribution> targets);

  std::size_t size() const { return sources_.size(); }
  const OutcomeDistribution& source(std::size_t i) const { return sources_[i]; }
  const OutcomeDistribution& target(std::size_t i) const { return targets_[i]; }
  double tv(std::size_t i) const { return tv_[i]; }
  double max_tv() const;

  /// Constant plan: the same (p, q) at every index.
  static CouplingPlan repeated(const OutcomeDistribution& p, const OutcomeDistribution& q,
                               std::size_t n);

private:
  std::vector<OutcomeDistribution> sources_;
  std::vector<OutcomeDistribution> targets_;
  std::vector<double> tv_;
};

/// Replaces exactly floor(gamma*n) uniformly chosen indices with the payload.
template <typename T>
OutcomeRecord<T> replace_attack(const OutcomeRecord<T>& rec, double gamma, const T& payload,
                                Rng& rng);

/// Maximal coupling: given X = x distributed per p, returns Y distributed per
/// q with P[Y != X] = TV(p, q). Keeps x with probability min(p,q)(x)/p(x),
/// otherwise resamples from the normalized excess (q - min(p,q))/TV.
int maximal_couple(const OutcomeDistribution& p, const OutcomeDistribution& q, int x, Rng& rng);

/// Applies maximal_couple per index in order, stopping once floor(gamma*n)
/// entries have been changed. With all_or_nothing, the full coupled record is
/// used only when its Hamming distance fits the budget, otherwise nothing
/// changes.
LabelRecord coupling_attack(const LabelRecord& rec, const CouplingPlan& plan, double gamma,
                            Rng& rng, bool all_or_nothing = false);

/// SPAM-noise simulation: per-index target distributions with TV <= gamma/2
/// realized by a coupling attack with budget gamma (= 2 * gamma_spam).
LabelRecord spam_attack(const LabelRecord& rec, const CouplingPlan& channel, double gamma,
                        Rng& rng);

/// Uniform-POVM analogue of the coupling attack: resamples |v> from D(sigma)
/// at floor(gamma*n) uniformly chosen indices.
VectorRecord state_swap_attack(const VectorRecord& rec, const DensityMatrix& sigma, double gamma,
                               Rng& rng);

/// Hamming distance between record entries; used by the budget audit.
template <typename T>
std::size_t hamming_distance(const OutcomeRecord<T>& a, const OutcomeRecord<T>& b);

}  // namespace qlab
