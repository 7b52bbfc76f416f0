#pragma once

// Test-only statistics helpers: KS tests, a chi-square goodness-of-fit
// p-value via the regularized incomplete gamma function, and closed-form
// CDFs for the overlap laws used as sampler oracles.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace teststats {

// Asymptotic Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{k-1} e^{-2k^2 lambda^2}.
inline double kolmogorov_tail(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// One-sample KS p-value against a CDF.
inline double ks_test(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  const double sqrt_n = std::sqrt(n);
  return kolmogorov_tail((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
}

// Two-sample KS p-value.
inline double ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  const double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
  const double sqrt_ne = std::sqrt(ne);
  return kolmogorov_tail((sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d);
}

// Regularized upper incomplete gamma Q(a, x) (series + continued fraction).
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  const double log_gamma_a = std::lgamma(a);
  if (x < a + 1.0) {
    // P(a, x) by series.
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-14) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - log_gamma_a);
    return 1.0 - p;
  }
  // Q(a, x) by Lentz continued fraction.
  double b = x + 1.0 - a;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-14) break;
  }
  return h * std::exp(-x + a * std::log(x) - log_gamma_a);
}

// Chi-square goodness-of-fit p-value for observed counts vs expected probabilities.
inline double chi2_gof_p(const std::vector<std::size_t>& counts,
                         const std::vector<double>& probs) {
  if (counts.size() != probs.size()) throw std::invalid_argument("chi2_gof_p: size mismatch");
  std::size_t n = 0;
  for (std::size_t c : counts) n += c;
  double stat = 0.0;
  int dof = -1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = probs[i] * static_cast<double>(n);
    if (expected < 1e-12) continue;
    const double diff = static_cast<double>(counts[i]) - expected;
    stat += diff * diff / expected;
    ++dof;
  }
  if (dof < 1) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * stat);
}

// CDF of |<psi|v>|^2 for v Haar on C^d: Beta(1, d-1), F(x) = 1 - (1-x)^{d-1}.
inline double haar_overlap_cdf(double x, int d) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - x, d - 1);
}

// CDF of Beta(2, d-1): F(x) = 1 - (1-x)^{d-1} (1 + (d-1) x).
inline double beta2_cdf(double x, int d) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - x, d - 1) * (1.0 + (d - 1) * x);
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

inline MeanStderr mean_stderr(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= (n > 1.0 ? n - 1.0 : 1.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace teststats
