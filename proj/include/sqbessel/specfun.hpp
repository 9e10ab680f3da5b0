#pragma once

// Special functions for the central and non-central chi-square laws.
//
// Everything here is a pure function of its arguments. These routines are the
// ground truth the Chebyshev approximation is fitted to and tested against,
// so accuracy is preferred over speed throughout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "sqbessel/errors.hpp"

namespace sqbessel {

// Degrees of freedom and non-centrality of a chi-square law.
struct NoncentralParams {
  double delta = 1.0;
  double lambda = 0.0;

  void validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta))
      throw DomainError("noncentral chi-square: delta must be positive, got " +
                        std::to_string(delta));
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw DomainError("noncentral chi-square: lambda must be nonnegative, got " +
                        std::to_string(lambda));
  }
};

namespace detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

inline void require_positive_delta(double delta, const char* fn) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw DomainError(std::string(fn) + ": delta must be positive");
}

// Series for the lower regularized incomplete gamma, valid for x < a + 1.
inline double gamma_p_series(double a, double x, double log_prefactor) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 100000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return std::exp(log_prefactor) * sum;
}

// Modified Lentz continued fraction for the upper regularized incomplete
// gamma, valid for x >= a + 1.
inline double gamma_q_fraction(double a, double x, double log_prefactor) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor) * h;
}

}  // namespace detail

// ln Gamma(a) for a > 0.
inline double log_gamma(double a) {
  if (!(a > 0.0)) throw DomainError("log_gamma: argument must be positive");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(a, &sign);
#else
  return std::lgamma(a);
#endif
}

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
// Series below x = a + 1, continued fraction above; the complementary value is
// always formed from whichever side is computed directly.
inline double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw DomainError("gamma_p: a must be positive");
  if (x < 0.0 || std::isnan(x)) throw DomainError("gamma_p: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double log_pre = a * std::log(x) - x - log_gamma(a);
  if (x < a + 1.0) return std::min(1.0, detail::gamma_p_series(a, x, log_pre));
  return std::max(0.0, 1.0 - detail::gamma_q_fraction(a, x, log_pre));
}

inline double gamma_q(double a, double x) {
  if (!(a > 0.0)) throw DomainError("gamma_q: a must be positive");
  if (x < 0.0 || std::isnan(x)) throw DomainError("gamma_q: x must be nonnegative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double log_pre = a * std::log(x) - x - log_gamma(a);
  if (x < a + 1.0) return std::max(0.0, 1.0 - detail::gamma_p_series(a, x, log_pre));
  return std::min(1.0, detail::gamma_q_fraction(a, x, log_pre));
}

// F_delta(w), the central chi-square distribution function.
inline double chi2_cdf(double delta, double w) {
  detail::require_positive_delta(delta, "chi2_cdf");
  if (w < 0.0 || std::isnan(w)) throw DomainError("chi2_cdf: w must be nonnegative");
  return gamma_p(0.5 * delta, 0.5 * w);
}

// 1 - F_delta(w), computed without cancellation in the upper tail.
inline double chi2_sf(double delta, double w) {
  detail::require_positive_delta(delta, "chi2_sf");
  if (w < 0.0 || std::isnan(w)) throw DomainError("chi2_sf: w must be nonnegative");
  return gamma_q(0.5 * delta, 0.5 * w);
}

inline double chi2_log_pdf(double delta, double w) {
  detail::require_positive_delta(delta, "chi2_pdf");
  if (!(w > 0.0)) throw DomainError("chi2_pdf: w must be positive");
  const double a = 0.5 * delta;
  return (a - 1.0) * std::log(w) - 0.5 * w - a * std::numbers::ln2 - log_gamma(a);
}

// f_delta(w) = w^{delta/2-1} e^{-w/2} / (2^{delta/2} Gamma(delta/2)).
inline double chi2_pdf(double delta, double w) { return std::exp(chi2_log_pdf(delta, w)); }

namespace detail {

// Solves P(a, w/2) = target (upper == false) or Q(a, w/2) = target
// (upper == true) in t = ln w: log-space bracketing, then Newton steps with
// the density as derivative, bisecting whenever Newton leaves the bracket.
inline double chi2_invert(double delta, double target, bool upper) {
  const double a = 0.5 * delta;
  const double lg = log_gamma(a);

  // increasing in t
  auto residual = [&](double t) {
    const double w = std::exp(t);
    return upper ? target - gamma_q(a, 0.5 * w) : gamma_p(a, 0.5 * w) - target;
  };

  double t_hi = std::log(std::max(2.0, 2.0 * delta));
  for (double step = 1.0; residual(t_hi) < 0.0; step *= 2.0) t_hi += step;
  double t_lo = t_hi - 1.0;
  for (double step = 1.0; residual(t_lo) > 0.0; step *= 2.0) {
    t_lo -= step;
    if (t_lo < -745.0) {
      t_lo = -745.0;
      break;
    }
  }

  // Small-w asymptote F ~ (w/2)^a / Gamma(a+1) is a good start in the lower
  // half; otherwise start mid-bracket.
  double t = 0.5 * (t_lo + t_hi);
  if (!upper) {
    const double guess = std::numbers::ln2 + (std::log(target) + std::log(a) + lg) / a;
    if (guess > t_lo && guess < t_hi) t = guess;
  }

  for (int it = 0; it < 400; ++it) {
    const double r = residual(t);
    if (r == 0.0) break;
    if (r < 0.0) t_lo = t; else t_hi = t;
    const double w = std::exp(t);
    // d residual / dt = w f(w)
    const double slope = std::exp(a * t - 0.5 * w - a * std::numbers::ln2 - lg);
    double next = (slope > 0.0 && std::isfinite(slope))
                      ? t - r / slope
                      : std::numeric_limits<double>::quiet_NaN();
    if (!(next > t_lo && next < t_hi)) next = 0.5 * (t_lo + t_hi);
    const bool done = std::fabs(next - t) <= 2.0 * kEps * std::max(1.0, std::fabs(t));
    t = next;
    if (done || t_hi - t_lo <= 2.0 * kEps * std::max(1.0, std::fabs(t))) break;
  }
  return std::exp(t);
}

}  // namespace detail

// Reference inverse of F_delta, the oracle for the Chebyshev approximation.
// Probabilities above one half are matched through the survival function so
// that the residual stays at rounding level near u = 1.
inline double chi2_inv_reference(double delta, double u, double tol = 1e-13) {
  detail::require_positive_delta(delta, "chi2_inv_reference");
  if (!(u > 0.0 && u < 1.0)) throw DomainError("chi2_inv_reference: u must lie in (0, 1)");
  const bool upper = u > 0.5;
  const double w = detail::chi2_invert(delta, upper ? 1.0 - u : u, upper);
  const double achieved = std::fabs(chi2_cdf(delta, w) - u);
  if (achieved > tol)
    throw ConvergenceError("chi2_inv_reference: residual above tolerance", achieved);
  return w;
}

// Inverse of the survival function: w with 1 - F_delta(w) = q.
inline double chi2_isf_reference(double delta, double q, double rel_tol = 1e-12) {
  detail::require_positive_delta(delta, "chi2_isf_reference");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("chi2_isf_reference: q must lie in (0, 1)");
  const double w = q < 0.5 ? detail::chi2_invert(delta, q, true)
                            : detail::chi2_invert(delta, 1.0 - q, false);
  const double achieved = std::fabs(chi2_sf(delta, w) - q) / q;
  if (achieved > rel_tol)
    throw ConvergenceError("chi2_isf_reference: residual above tolerance", achieved);
  return w;
}

// Poisson(mean) probability mass at i, evaluated in log space.
inline double poisson_pmf(double mean, std::size_t i) {
  if (mean == 0.0) return i == 0 ? 1.0 : 0.0;
  const double k = static_cast<double>(i);
  return std::exp(-mean + k * std::log(mean) - log_gamma(k + 1.0));
}

namespace detail {

// Sum over i of Poisson(lambda/2; i) * term(i), stopped once the unvisited
// Poisson mass drops below 1e-14. Terms are bounded by one for the CDF.
template <class Term>
double poisson_mixture(double lambda, Term&& term) {
  const double mean = 0.5 * lambda;
  if (mean == 0.0) return term(std::size_t{0});
  const std::size_t cap =
      static_cast<std::size_t>(mean + 40.0 * std::sqrt(mean) + 100.0);
  double sum = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i <= cap; ++i) {
    const double p = poisson_pmf(mean, i);
    mass += p;
    if (p > 0.0) sum += p * term(i);
    if (static_cast<double>(i) > mean && 1.0 - mass < 1e-14) break;
  }
  return sum;
}

}  // namespace detail

// Distribution function of chi^2_delta(lambda) as a Poisson mixture of
// central laws with delta + 2i degrees of freedom.
inline double noncentral_chi2_cdf(const NoncentralParams& p, double y) {
  p.validate();
  if (y < 0.0 || std::isnan(y)) throw DomainError("noncentral_chi2_cdf: y must be nonnegative");
  if (y == 0.0) return 0.0;
  if (p.lambda == 0.0) return chi2_cdf(p.delta, y);
  const double v = detail::poisson_mixture(
      p.lambda, [&](std::size_t i) { return gamma_p(0.5 * p.delta + i, 0.5 * y); });
  return std::min(1.0, v);
}

inline double noncentral_chi2_pdf(const NoncentralParams& p, double y) {
  p.validate();
  if (!(y > 0.0)) throw DomainError("noncentral_chi2_pdf: y must be positive");
  if (p.lambda == 0.0) return chi2_pdf(p.delta, y);
  return detail::poisson_mixture(
      p.lambda, [&](std::size_t i) { return chi2_pdf(p.delta + 2.0 * i, y); });
}

// Raw moments E[X^k], k = 1..k_max, of X ~ chi^2_delta(lambda). Uses the
// cumulants kappa_j = 2^{j-1} (j-1)! (delta + j lambda) and the standard
// cumulant-to-moment recursion mu_n = sum_j C(n-1, j) kappa_{j+1} mu_{n-1-j}.
inline std::vector<double> noncentral_chi2_moments(const NoncentralParams& p, int k_max) {
  p.validate();
  if (k_max < 1) throw DomainError("noncentral_chi2_moments: k_max must be >= 1");
  std::vector<double> kappa(static_cast<std::size_t>(k_max));
  double factorial = 1.0;  // (j-1)!
  double pow2 = 1.0;       // 2^{j-1}
  for (int j = 1; j <= k_max; ++j) {
    if (j > 1) {
      factorial *= (j - 1);
      pow2 *= 2.0;
    }
    kappa[j - 1] = pow2 * factorial * (p.delta + j * p.lambda);
  }
  std::vector<double> mu(static_cast<std::size_t>(k_max) + 1, 0.0);
  mu[0] = 1.0;
  for (int n = 1; n <= k_max; ++n) {
    double binom = 1.0;  // C(n-1, j)
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      s += binom * kappa[j] * mu[n - 1 - j];
      binom = binom * (n - 1 - j) / (j + 1);
    }
    mu[n] = s;
  }
  return {mu.begin() + 1, mu.end()};
}

// Standard normal distribution function.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Standard normal quantile, Wichura's AS 241 (PPND16), relative accuracy
// about 1e-16 over (0, 1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

}  // namespace sqbessel
