#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature, scalar and vector valued.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <queue>
#include <span>
#include <vector>

namespace sqbessel {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
  int subdivisions = 0;
};

struct VectorQuadResult {
  std::vector<double> value;
  double error = 0.0;  // sum over panels of the max-component error
  bool converged = false;
  int subdivisions = 0;
};

namespace detail {

// Kronrod abscissae (descending, last is the centre) and weights; the Gauss
// 7-point rule uses the odd-indexed abscissae.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double error;
  std::vector<double> value;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// One 15-point panel of a vector integrand f(x, out).
template <class F>
Panel gk15_panel(F& f, std::size_t dim, double a, double b, std::vector<double>& scratch) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Panel p{a, b, 0.0, std::vector<double>(dim, 0.0)};
  std::vector<double> gauss(dim, 0.0);
  scratch.assign(dim, 0.0);

  f(centre, std::span<double>(scratch));
  for (std::size_t k = 0; k < dim; ++k) {
    p.value[k] = kWgk[7] * scratch[k];
    gauss[k] = kWg[3] * scratch[k];
  }
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    for (const double x : {centre - dx, centre + dx}) {
      f(x, std::span<double>(scratch));
      for (std::size_t k = 0; k < dim; ++k) {
        p.value[k] += kWgk[j] * scratch[k];
        if (j % 2 == 1) gauss[k] += kWg[j / 2] * scratch[k];
      }
    }
  }
  double err = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    p.value[k] *= half;
    gauss[k] *= half;
    err = std::max(err, std::fabs(p.value[k] - gauss[k]));
  }
  p.error = err;
  return p;
}

}  // namespace detail

// Integrates a vector-valued f over [a, b]; f is called as f(x, out) with
// out.size() == dim. Panels are bisected in order of decreasing error
// estimate until the summed estimate is below abs_tol or the panel budget is
// spent (converged == false, best estimate returned).
template <class F>
VectorQuadResult gauss_kronrod_vec(F&& f, std::size_t dim, double a, double b, double abs_tol,
                                   int max_subdivisions = 2000) {
  VectorQuadResult out;
  out.value.assign(dim, 0.0);
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::vector<double> scratch;
  std::priority_queue<detail::Panel> heap;
  heap.push(detail::gk15_panel(f, dim, a, b, scratch));
  double total_err = heap.top().error;
  int subdivisions = 0;

  while (total_err > abs_tol && subdivisions < max_subdivisions) {
    detail::Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    // panel no longer resolvable in double precision
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    auto left = detail::gk15_panel(f, dim, worst.a, mid, scratch);
    auto right = detail::gk15_panel(f, dim, mid, worst.b, scratch);
    total_err += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
    ++subdivisions;
  }

  // Re-sum from the panels to avoid drift in the running totals.
  total_err = 0.0;
  std::vector<double> comp(dim, 0.0);
  while (!heap.empty()) {
    const auto& p = heap.top();
    for (std::size_t k = 0; k < dim; ++k) {
      // Kahan summation keeps the result independent of panel count noise.
      const double y = p.value[k] - comp[k];
      const double t = out.value[k] + y;
      comp[k] = (t - out.value[k]) - y;
      out.value[k] = t;
    }
    total_err += p.error;
    heap.pop();
  }
  out.error = total_err;
  out.converged = total_err <= abs_tol;
  out.subdivisions = subdivisions;
  return out;
}

template <class F>
QuadResult gauss_kronrod(F&& f, double a, double b, double abs_tol, int max_subdivisions = 2000) {
  auto vf = [&f](double x, std::span<double> o) { o[0] = f(x); };
  if (b < a) {
    auto r = gauss_kronrod(f, b, a, abs_tol, max_subdivisions);
    r.value = -r.value;
    return r;
  }
  const auto r = gauss_kronrod_vec(vf, 1, a, b, abs_tol, max_subdivisions);
  return {r.value[0], r.error, r.converged, r.subdivisions};
}

// Integral of g(t) / sqrt(1 - t^2) over [-1, 1], evaluated as the integral of
// g(cos theta) over [0, pi] so the endpoint singularities disappear.
template <class G>
QuadResult integrate_chebyshev_weight(G&& g, double abs_tol, int max_subdivisions = 2000) {
  return gauss_kronrod([&g](double theta) { return g(std::cos(theta)); }, 0.0, std::numbers::pi,
                       abs_tol, max_subdivisions);
}

// Fixed 10-point Gauss-Legendre rule on [a, a + len], for short smooth
// integrals. Taking the length rather than b keeps it exact when b - a
// would cancel.
template <class F>
double gauss_legendre10(F&& f, double a, double len) {
  static constexpr std::array<double, 5> x = {0.148874338981631210884826001129720,
                                              0.433395394129247190799265943165784,
                                              0.679409568299024406234327365114874,
                                              0.865063366688984510732096688423493,
                                              0.973906528517171720077964012084452};
  static constexpr std::array<double, 5> w = {0.295524224714752870173892994651338,
                                              0.269266719309996355091226921569469,
                                              0.219086362515982043995534934228163,
                                              0.149451349150580593145776339657697,
                                              0.066671344308688137593568809893332};
  const double h = 0.5 * len, c = a + h;
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i) s += w[i] * (f(c - h * x[i]) + f(c + h * x[i]));
  return h * s;
}

}  // namespace sqbessel
