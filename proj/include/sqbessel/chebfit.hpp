#pragma once

// Offline fit of the 2-D Chebyshev coefficients c_mn of the inverse
// chi-square CDF, one region at a time.
//
//   I_mn = int_0^pi cos(m theta) J_n(delta(cos theta)) d theta
//   J_n(delta) = int_{-1}^{1} F^{-1}(u(x)) T_n(x) / sqrt(1 - x^2) dx
//
// J_n is integrated in w = F^{-1}(u), so the inverse never has to be
// evaluated: dx = x'(w) dw with x'(w) = k1 xi'(F(w)) f(w). A second
// substitution w = w_lo + (w_hi - w_lo) sin^2(phi / 2) removes the
// 1/sqrt(1 - x^2) endpoint singularities.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sqbessel/chebyshev.hpp"
#include "sqbessel/errors.hpp"
#include "sqbessel/quadrature.hpp"
#include "sqbessel/specfun.hpp"

namespace sqbessel {

struct FitOptions {
  double coeff_tol = 1e-10;  // absolute, per coefficient
  double inner_ratio = 0.1;  // inner tolerance = ratio * outer tolerance
  int max_subdivisions = 2000;
  int order_cap = 60;
  int start_order_delta = 8;
  int start_order_u = 16;
};

struct CoefficientMatrix {
  int order_delta = 0;
  int order_u = 0;
  std::vector<double> values;  // row-major, m-major
  double error = 0.0;          // outer quadrature error estimate, on c scale
  int outer_panels = 0;

  double at(int m, int n) const {
    return values[static_cast<std::size_t>(m) * static_cast<std::size_t>(order_u + 1) +
                  static_cast<std::size_t>(n)];
  }
};

namespace detail {

inline double coefficient_weight(int m, int n) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  if (m == 0 && n == 0) return 1.0 / pi2;
  if (m == 0 || n == 0) return 2.0 / pi2;
  return 4.0 / pi2;
}

// J_n(delta) for n = 0..N.
inline void inner_integrals(RegionId r, double delta, const RegionSpec& spec, int N, double tol,
                            int max_sub, std::span<double> out, double& err) {
  const auto geo = region_geometry(r, delta, spec);
  const double lgh = log_gamma(0.5 * delta);
  const double span_w = geo.w_hi - geo.w_lo;
  // reference values for 1 +/- x in log form
  double lo_ref = 0.0, hi_ref = 0.0;
  if (r == RegionId::Tail) {
    lo_ref = -(std::log(geo.q_lo) + lgh);
    hi_ref = -(std::log(geo.q_hi) + lgh);
  }

  auto pdf_at = [delta](double t) { return chi2_pdf(delta, t); };

  auto f = [&](double phi, std::span<double> o) {
    const double s = std::sin(0.5 * phi);
    const double c = std::cos(0.5 * phi);
    const double above = span_w * s * s;  // w - w_lo
    const double below = span_w * c * c;  // w_hi - w, without cancellation
    const double w = geo.w_lo + above;
    const double dw = span_w * s * c;  // dw/dphi
    if (!(w > 0.0) || dw == 0.0) {
      std::fill(o.begin(), o.end(), 0.0);
      return;
    }
    const double pdf = chi2_pdf(delta, w);
    // F(w) - F(w_lo) and F(w_hi) - F(w); close to an end the CDF difference
    // cancels, so integrate the density directly there (short relative to the
    // distance from the density's singularity at 0)
    const bool upper = r != RegionId::First;  // differences of 1 - F are accurate there
    const double cdf_or_sf = upper ? chi2_sf(delta, w) : chi2_cdf(delta, w);
    double d_lo, d_hi;
    if (geo.w_lo == 0.0)
      d_lo = cdf_or_sf;
    else if (above < 0.1 * geo.w_lo)
      d_lo = gauss_legendre10(pdf_at, geo.w_lo, above);
    else
      d_lo = upper ? geo.q_lo - cdf_or_sf : cdf_or_sf - geo.u_lo;
    if (below < 0.1 * w)
      d_hi = gauss_legendre10(pdf_at, geo.w_hi - below, below);
    else
      d_hi = upper ? cdf_or_sf - geo.q_hi : geo.u_hi - cdf_or_sf;
    double one_plus = 0.0, one_minus = 0.0, dxdw = 0.0;
    switch (r) {
      case RegionId::First:
        one_plus = geo.k1 * d_lo;
        one_minus = geo.k1 * d_hi;
        dxdw = geo.k1 * pdf;
        break;
      case RegionId::Middle: {
        const double q = cdf_or_sf;
        one_plus = geo.k1 * std::log1p(-d_lo / geo.q_lo);
        one_minus = -geo.k1 * std::log1p(d_hi / geo.q_hi);
        dxdw = -geo.k1 * pdf / q;
        break;
      }
      case RegionId::Tail: {
        const double q = cdf_or_sf;
        const double L = -(std::log(q) + lgh);
        one_plus = geo.k1 * std::log1p(-std::log1p(-d_lo / geo.q_lo) / lo_ref);
        one_minus = -geo.k1 * std::log1p(-std::log1p(d_hi / geo.q_hi) / hi_ref);
        dxdw = geo.k1 * pdf / (q * L);
        break;
      }
    }
    one_plus = std::max(one_plus, 0.0);
    one_minus = std::max(one_minus, 0.0);
    const double root = std::sqrt(one_plus * one_minus);
    if (!(root > 0.0)) {
      std::fill(o.begin(), o.end(), 0.0);
      return;
    }
    const double x = 0.5 * (one_plus - one_minus);
    const double base = w * dxdw * dw / root;
    double t0 = 1.0, t1 = x;
    o[0] = base;
    if (o.size() > 1) o[1] = base * x;
    for (std::size_t n = 2; n < o.size(); ++n) {
      const double t2 = 2.0 * x * t1 - t0;
      o[n] = base * t2;
      t0 = t1;
      t1 = t2;
    }
  };
  const auto res =
      gauss_kronrod_vec(f, static_cast<std::size_t>(N + 1), 0.0, std::numbers::pi, tol, max_sub);
  if (!res.converged)
    throw ConvergenceError("inner coefficient integral did not converge at delta = " +
                               std::to_string(delta),
                           res.error);
  err = std::max(err, res.error);
  std::copy(res.value.begin(), res.value.end(), out.begin());
}

}  // namespace detail

// All c_mn, 0 <= m <= M, 0 <= n <= N, for one region on [c, d].
inline CoefficientMatrix coefficient_matrix(RegionId r, double c, double d,
                                            const RegionSpec& spec, int M, int N,
                                            const FitOptions& opt = {}) {
  if (!(c > 0.0 && c < d)) throw DomainError("coefficient_matrix: need 0 < c < d");
  if (M < 0 || N < 0) throw DomainError("coefficient_matrix: negative order");
  spec.validate();
  const double pi2 = std::numbers::pi * std::numbers::pi;
  // c = weight * I with weight <= 4/pi^2
  const double outer_tol = opt.coeff_tol * pi2 / 4.0;
  const double inner_tol = outer_tol * opt.inner_ratio;
  const std::size_t w = static_cast<std::size_t>(N + 1);
  const std::size_t dim = static_cast<std::size_t>(M + 1) * w;
  std::vector<double> inner(w);
  double inner_err = 0.0;

  auto outer = [&](double theta, std::span<double> o) {
    const double alpha = std::cos(theta);
    const double delta = 0.5 * ((d - c) * alpha + (d + c));
    detail::inner_integrals(r, delta, spec, N, inner_tol, opt.max_subdivisions, inner, inner_err);
    for (int m = 0; m <= M; ++m) {
      const double cm = std::cos(m * theta);
      for (std::size_t n = 0; n < w; ++n) o[static_cast<std::size_t>(m) * w + n] = cm * inner[n];
    }
  };
  const auto res = gauss_kronrod_vec(outer, dim, 0.0, std::numbers::pi, outer_tol,
                                     opt.max_subdivisions);
  if (!res.converged)
    throw ConvergenceError("outer coefficient integral did not converge", res.error);

  CoefficientMatrix out;
  out.order_delta = M;
  out.order_u = N;
  out.values.resize(dim);
  for (int m = 0; m <= M; ++m)
    for (int n = 0; n <= N; ++n) {
      const std::size_t k = static_cast<std::size_t>(m) * w + static_cast<std::size_t>(n);
      out.values[k] = detail::coefficient_weight(m, n) * res.value[k];
    }
  out.error = 4.0 / pi2 * res.error;
  out.outer_panels = res.subdivisions + 1;
  return out;
}

inline double coefficient(int m, int n, RegionId r, double c, double d, const RegionSpec& spec,
                          const FitOptions& opt = {}) {
  return coefficient_matrix(r, c, d, spec, m, n, opt).at(m, n);
}

// Truncation orders for a computed block: the smallest (M, N) such that every
// computed row m > M and column n > N has max |c| <= tol. Returns -1 for an
// axis when even the last computed row/column exceeds tol.
struct TruncationOrders {
  int order_delta = -1;
  int order_u = -1;
  double omitted_max = 0.0;
};

inline TruncationOrders truncation_orders(const CoefficientMatrix& cm, double tol) {
  const int Mb = cm.order_delta, Nb = cm.order_u;
  std::vector<double> row(static_cast<std::size_t>(Mb + 1), 0.0),
      col(static_cast<std::size_t>(Nb + 1), 0.0);
  for (int m = 0; m <= Mb; ++m)
    for (int n = 0; n <= Nb; ++n) {
      const double a = std::fabs(cm.at(m, n));
      row[m] = std::max(row[m], a);
      col[n] = std::max(col[n], a);
    }
  auto cut = [tol](const std::vector<double>& v) {
    int k = static_cast<int>(v.size());
    while (k > 0 && v[k - 1] <= tol) --k;
    // rows k.. are all small; keep 0..k-1
    return k - 1;
  };
  TruncationOrders t;
  t.order_delta = cut(row);
  t.order_u = cut(col);
  if (t.order_delta == Mb) t.order_delta = -1;
  if (t.order_u == Nb) t.order_u = -1;
  if (t.order_delta >= 0 && t.order_u >= 0) {
    for (int m = 0; m <= Mb; ++m)
      for (int n = 0; n <= Nb; ++n)
        if (m > t.order_delta || n > t.order_u)
          t.omitted_max = std::max(t.omitted_max, std::fabs(cm.at(m, n)));
  }
  return t;
}

// Adaptive fit: grow the computed block until at least two trailing rows and
// columns fall below target_accuracy, then cut it there.
inline ChebyshevPatch fit_patch(RegionId r, double c, double d, const RegionSpec& spec,
                                double target_accuracy, const FitOptions& opt = {}) {
  if (!(c < d)) throw DomainError("fit_patch: need c < d");
  if (!(target_accuracy > 0.0)) throw DomainError("fit_patch: target_accuracy must be positive");
  int Mb = std::min(opt.start_order_delta, opt.order_cap + 2);
  int Nb = std::min(opt.start_order_u, opt.order_cap + 2);
  for (;;) {
    const auto cm = coefficient_matrix(r, c, d, spec, Mb, Nb, opt);
    const auto t = truncation_orders(cm, target_accuracy);
    const bool m_ok = t.order_delta >= 0 && t.order_delta <= Mb - 2;
    const bool n_ok = t.order_u >= 0 && t.order_u <= Nb - 2;
    if (m_ok && n_ok) {
      if (t.order_delta > opt.order_cap || t.order_u > opt.order_cap) break;
      ChebyshevPatch p;
      p.delta_lo = c;
      p.delta_hi = d;
      p.region = spec;
      p.region.region_id = r;
      p.order_delta = t.order_delta;
      p.order_u = t.order_u;
      p.target_accuracy = target_accuracy;
      p.omitted_max = t.omitted_max;
      p.coeffs.reserve(static_cast<std::size_t>(t.order_delta + 1) *
                       static_cast<std::size_t>(t.order_u + 1));
      for (int m = 0; m <= t.order_delta; ++m)
        for (int n = 0; n <= t.order_u; ++n) p.coeffs.push_back(cm.at(m, n));
      return p;
    }
    if ((!m_ok && Mb >= opt.order_cap + 2) || (!n_ok && Nb >= opt.order_cap + 2)) break;
    if (!m_ok) Mb = std::min(Mb + std::max(4, Mb / 2), opt.order_cap + 2);
    if (!n_ok) Nb = std::min(Nb + std::max(8, Nb / 2), opt.order_cap + 2);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s region on [%g, %g]: order cap %d reached at accuracy %g",
                region_name(r), c, d, opt.order_cap, target_accuracy);
  throw FitError(buf);
}

// Default boundaries for an interval [c, d]: w_minus = min(0.01, c^2), w_plus = 1.
inline RegionSpec default_region_spec(double c) {
  RegionSpec s;
  s.w_minus = std::min(0.01, c * c);
  s.w_plus = 1.0;
  return s;
}

inline PatchGroup fit_group(double c, double d, const RegionSpec& spec, double target_accuracy,
                            const FitOptions& opt = {}) {
  PatchGroup g;
  g.delta_lo = c;
  g.delta_hi = d;
  g.target_accuracy = target_accuracy;
  for (RegionId r : kRegions)
    g.patches[static_cast<int>(r)] = fit_patch(r, c, d, spec, target_accuracy, opt);
  return g;
}

}  // namespace sqbessel
