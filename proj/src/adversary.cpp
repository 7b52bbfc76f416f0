#include "qlab/adversary.hpp"

#include <algorithm>
#include <cmath>

namespace qlab {

CouplingPlan::CouplingPlan(std::vector<OutcomeDistribution> sources,
                           std::vector<OutcomeDistribution> targets)
    : sources_(std::move(sources)), targets_(std::move(targets)) {
  if (sources_.size() != targets_.size() || sources_.empty()) {
    throw std::invalid_argument("CouplingPlan: source/target lengths must match and be nonempty");
  }
  tv_.reserve(sources_.size());
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    tv_.push_back(total_variation(sources_[i], targets_[i]));
  }
}

double CouplingPlan::max_tv() const {
  return *std::max_element(tv_.begin(), tv_.end());
}

CouplingPlan CouplingPlan::repeated(const OutcomeDistribution& p, const OutcomeDistribution& q,
                                    std::size_t n) {
  return CouplingPlan(std::vector<OutcomeDistribution>(n, p),
                      std::vector<OutcomeDistribution>(n, q));
}

namespace {

// Distinct uniformly chosen indices via partial Fisher-Yates.
std::vector<std::size_t> choose_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(idx[i], idx[i + rng.uniform_index(n - i)]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace

template <typename T>
OutcomeRecord<T> replace_attack(const OutcomeRecord<T>& rec, double gamma, const T& payload,
                                Rng& rng) {
  if (gamma < 0.0 || gamma > 1.0) {
    throw std::invalid_argument("replace_attack: gamma must be in [0, 1]");
  }
  OutcomeRecord<T> out = rec;
  const std::size_t budget = corruption_budget(rec.size(), gamma);
  for (std::size_t i : choose_indices(rec.size(), budget, rng)) {
    out.entries[i] = payload;
    if (!out.corrupted_flags[i]) {
      out.corrupted_flags[i] = true;
      ++out.budget_used;
    }
  }
  return out;
}

template OutcomeRecord<int> replace_attack(const OutcomeRecord<int>&, double, const int&, Rng&);
template OutcomeRecord<Vector> replace_attack(const OutcomeRecord<Vector>&, double, const Vector&,
                                              Rng&);

int maximal_couple(const OutcomeDistribution& p, const OutcomeDistribution& q, int x, Rng& rng) {
  if (p.num_outcomes() != q.num_outcomes()) {
    throw std::invalid_argument("maximal_couple: label sets differ");
  }
  if (x < 0 || x >= p.num_outcomes() || p.prob(x) <= 0.0) {
    throw std::invalid_argument("maximal_couple: observed label has zero source probability");
  }
  const double tv = total_variation(p, q);
  if (tv <= 0.0) return x;
  const double keep = std::min(p.prob(x), q.prob(x)) / p.prob(x);
  if (rng.uniform() < keep) return x;
  // Resample from the normalized excess (q - min(p,q)) / TV.
  double u = rng.uniform() * tv;
  double acc = 0.0;
  int last = 0;
  for (int y = 0; y < q.num_outcomes(); ++y) {
    const double excess = q.prob(y) - std::min(p.prob(y), q.prob(y));
    if (excess > 0.0) {
      acc += excess;
      last = y;
      if (u < acc) return y;
    }
  }
  return last;
}

LabelRecord coupling_attack(const LabelRecord& rec, const CouplingPlan& plan, double gamma,
                            Rng& rng, bool all_or_nothing) {
  if (plan.size() != rec.size()) {
    throw std::invalid_argument("coupling_attack: plan length does not match record");
  }
  const std::size_t budget = corruption_budget(rec.size(), gamma);
  LabelRecord out = rec;
  if (all_or_nothing) {
    // The whole coupled record is used only if it fits the budget.
    std::vector<int> coupled(rec.size());
    std::size_t changes = 0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
      coupled[i] = maximal_couple(plan.source(i), plan.target(i), rec.entries[i], rng);
      if (coupled[i] != rec.entries[i]) ++changes;
    }
    if (changes <= budget) {
      for (std::size_t i = 0; i < rec.size(); ++i) {
        if (coupled[i] != rec.entries[i]) {
          out.entries[i] = coupled[i];
          out.corrupted_flags[i] = true;
          ++out.budget_used;
        }
      }
    }
    return out;
  }
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const int y = maximal_couple(plan.source(i), plan.target(i), rec.entries[i], rng);
    if (y == rec.entries[i]) continue;
    if (out.budget_used >= budget) break;  // stopping rule: cap reached
    out.entries[i] = y;
    out.corrupted_flags[i] = true;
    ++out.budget_used;
  }
  return out;
}

LabelRecord spam_attack(const LabelRecord& rec, const CouplingPlan& channel, double gamma,
                        Rng& rng) {
  if (channel.max_tv() > gamma / 2.0 + kEigenvalueTol) {
    throw std::invalid_argument("spam_attack: per-index TV exceeds gamma/2");
  }
  return coupling_attack(rec, channel, gamma, rng);
}

VectorRecord state_swap_attack(const VectorRecord& rec, const DensityMatrix& sigma, double gamma,
                               Rng& rng) {
  if (gamma < 0.0 || gamma > 1.0) {
    throw std::invalid_argument("state_swap_attack: gamma must be in [0, 1]");
  }
  VectorRecord out = rec;
  const std::size_t budget = corruption_budget(rec.size(), gamma);
  const UniformPovmSampler sampler(sigma);
  for (std::size_t i : choose_indices(rec.size(), budget, rng)) {
    out.entries[i] = sampler.draw(rng);
    if (!out.corrupted_flags[i]) {
      out.corrupted_flags[i] = true;
      ++out.budget_used;
    }
  }
  return out;
}

template <typename T>
std::size_t hamming_distance(const OutcomeRecord<T>& a, const OutcomeRecord<T>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("hamming_distance: record lengths differ");
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if constexpr (std::is_same_v<T, Vector>) {
      if (a.entries[i].size() != b.entries[i].size() ||
          (a.entries[i] - b.entries[i]).cwiseAbs().maxCoeff() != 0.0) {
        ++count;
      }
    } else {
      if (a.entries[i] != b.entries[i]) ++count;
    }
  }
  return count;
}

template std::size_t hamming_distance(const OutcomeRecord<int>&, const OutcomeRecord<int>&);
template std::size_t hamming_distance(const OutcomeRecord<Vector>&, const OutcomeRecord<Vector>&);

}  // namespace qlab
