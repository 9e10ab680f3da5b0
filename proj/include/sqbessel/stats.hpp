#pragma once

// Kolmogorov-Smirnov statistics.

#include <algorithm>
#include <cmath>
#include <vector>

#include "sqbessel/errors.hpp"

namespace sqbessel {

// Asymptotic critical value of sqrt(n_eff) D at level 0.1%.
inline constexpr double kKsCritical001 = 1.9495;

struct KsResult {
  double statistic = 0.0;  // D
  double n_eff = 0.0;
  double p_value = 1.0;    // asymptotic Kolmogorov distribution

  bool rejects_at_001() const { return std::sqrt(n_eff) * statistic > kKsCritical001; }
};

// Q(t) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2)
inline double kolmogorov_survival(double t) {
  if (t < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    s += (k % 2 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

template <class Cdf>
KsResult ks_one_sample(std::vector<double> x, Cdf&& cdf) {
  if (x.empty()) throw DomainError("ks_one_sample: empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  KsResult r{d, n, 1.0};
  r.p_value = kolmogorov_survival(std::sqrt(n) * d);
  return r;
}

// D restricted to y >= tau: draws below tau are lumped together, so only the
// law above tau is tested. The inverse is accurate in absolute w, which says
// nothing about the order of draws far below its error level.
template <class Cdf>
KsResult ks_one_sample_censored(std::vector<double> x, Cdf&& cdf, double tau) {
  if (x.empty()) throw DomainError("ks_one_sample_censored: empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  const std::size_t below =
      static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), tau) - x.begin());
  double d = std::fabs(static_cast<double>(below) / n - cdf(tau));
  for (std::size_t i = below; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  KsResult r{d, n, 1.0};
  r.p_value = kolmogorov_survival(std::sqrt(n) * d);
  return r;
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r{d, na * nb / (na + nb), 1.0};
  r.p_value = kolmogorov_survival(std::sqrt(r.n_eff) * d);
  return r;
}

inline KsResult ks_two_sample_censored(std::vector<double> a, std::vector<double> b, double tau) {
  for (auto& v : a) v = std::max(v, tau);
  for (auto& v : b) v = std::max(v, tau);
  return ks_two_sample(std::move(a), std::move(b));
}

}  // namespace sqbessel
