#pragma once

// Two-dimensional Chebyshev patches for the inverse chi-square CDF and the
// per-delta quantities needed to evaluate them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sqbessel/errors.hpp"
#include "sqbessel/specfun.hpp"

namespace sqbessel {

enum class RegionId { First = 0, Middle = 1, Tail = 2 };

inline constexpr std::array<RegionId, 3> kRegions = {RegionId::First, RegionId::Middle,
                                                     RegionId::Tail};

inline const char* region_name(RegionId r) {
  switch (r) {
    case RegionId::First: return "first";
    case RegionId::Middle: return "middle";
    case RegionId::Tail: return "tail";
  }
  return "?";
}

inline RegionId region_from_name(std::string_view s) {
  if (s == "first") return RegionId::First;
  if (s == "middle") return RegionId::Middle;
  if (s == "tail") return RegionId::Tail;
  throw PatchFormatError("unknown region '" + std::string(s) + "'");
}

// Region boundaries. w_minus / w_plus split the w axis; the tail runs up to
// the smaller of tail_w_cap and the quantile at tail_u_cap.
struct RegionSpec {
  RegionId region_id = RegionId::First;
  double w_minus = 0.01;
  double w_plus = 1.0;
  double tail_u_cap = 1.0 - 1e-8;
  double tail_w_cap = 20.0;

  void validate() const {
    if (!(w_minus > 0.0 && w_minus < w_plus && w_plus < tail_w_cap))
      throw PatchFormatError("region spec needs 0 < w_minus < w_plus < tail_w_cap");
    if (!(tail_u_cap > 0.5 && tail_u_cap < 1.0))
      throw PatchFormatError("tail_u_cap must lie in (0.5, 1)");
  }

  // Mass above the tail cap.
  double tail_q_cap() const { return 1.0 - tail_u_cap; }

  bool operator==(const RegionSpec&) const = default;
};

struct ChebyshevPatch {
  double delta_lo = 0.0;
  double delta_hi = 1.0;
  RegionSpec region;
  int order_delta = 0;  // M
  int order_u = 0;      // N
  std::vector<double> coeffs;  // (M+1) x (N+1), row m = delta index
  double target_accuracy = 1e-8;
  double omitted_max = 0.0;  // largest |c| in the computed but dropped rows/cols

  double coeff(int m, int n) const {
    return coeffs[static_cast<std::size_t>(m) * static_cast<std::size_t>(order_u + 1) +
                  static_cast<std::size_t>(n)];
  }

  double alpha(double delta) const {
    return (2.0 * delta - (delta_hi + delta_lo)) / (delta_hi - delta_lo);
  }

  void validate() const {
    if (!(delta_lo > 0.0 && delta_lo < delta_hi))
      throw PatchFormatError("patch needs 0 < delta_lo < delta_hi");
    region.validate();
    if (order_delta < 0 || order_u < 0) throw PatchFormatError("negative patch order");
    if (coeffs.size() != static_cast<std::size_t>(order_delta + 1) *
                             static_cast<std::size_t>(order_u + 1))
      throw PatchFormatError("coefficient count does not match orders");
    for (double c : coeffs)
      if (!std::isfinite(c)) throw PatchFormatError("non-finite coefficient");
    if (!(target_accuracy > 0.0)) throw PatchFormatError("target_accuracy must be positive");
    if (!(omitted_max <= target_accuracy))
      throw PatchFormatError("omitted coefficients exceed target_accuracy");
  }

  bool operator==(const ChebyshevPatch&) const = default;
};

// ---- xi and the affine pullback --------------------------------------------

inline double xi(RegionId r, double delta, double u) {
  if (!(u >= 0.0 && u < 1.0)) throw DomainError("xi: u outside [0, 1)");
  switch (r) {
    case RegionId::First: return u;
    case RegionId::Middle: return std::log1p(-u) + log_gamma(0.5 * delta);
    case RegionId::Tail: {
      const double inner = -(std::log1p(-u) + log_gamma(0.5 * delta));
      if (!(inner > 0.0)) throw DomainError("xi: (1-u)Gamma(delta/2) >= 1 in tail region");
      return std::log(inner);
    }
  }
  return 0.0;
}

// d xi / du
inline double xi_derivative(RegionId r, double delta, double u) {
  switch (r) {
    case RegionId::First: return 1.0;
    case RegionId::Middle: return -1.0 / (1.0 - u);
    case RegionId::Tail: {
      const double inner = -(std::log1p(-u) + log_gamma(0.5 * delta));
      return 1.0 / ((1.0 - u) * inner);
    }
  }
  return 0.0;
}

// Everything about one region at one delta that the fit and the sampler need.
struct RegionGeometry {
  double u_lo = 0.0, u_hi = 0.0;    // u range of the region
  double q_lo = 1.0, q_hi = 1.0;    // 1 - u at the ends, computed directly
  double w_lo = 0.0, w_hi = 0.0;    // matching w range
  double xi_lo = 0.0, xi_hi = 0.0;
  double k1 = 0.0, k2 = 0.0;
};

inline RegionGeometry region_geometry(RegionId r, double delta, const RegionSpec& spec) {
  if (!(delta > 0.0)) throw DomainError("region_geometry: delta must be positive");
  const double lgh = log_gamma(0.5 * delta);
  RegionGeometry g;
  switch (r) {
    case RegionId::First:
      g.w_lo = 0.0;
      g.w_hi = spec.w_minus;
      break;
    case RegionId::Middle:
      g.w_lo = spec.w_minus;
      g.w_hi = spec.w_plus;
      break;
    case RegionId::Tail: {
      g.w_lo = spec.w_plus;
      const double q_cap = spec.tail_q_cap();
      g.w_hi = chi2_sf(delta, spec.tail_w_cap) >= q_cap ? spec.tail_w_cap
                                                        : chi2_isf_reference(delta, q_cap);
      break;
    }
  }
  g.u_lo = g.w_lo > 0.0 ? chi2_cdf(delta, g.w_lo) : 0.0;
  g.q_lo = g.w_lo > 0.0 ? chi2_sf(delta, g.w_lo) : 1.0;
  g.u_hi = chi2_cdf(delta, g.w_hi);
  g.q_hi = chi2_sf(delta, g.w_hi);
  if (r == RegionId::Tail && g.w_hi < spec.tail_w_cap) {
    g.q_hi = spec.tail_q_cap();
    g.u_hi = spec.tail_u_cap;
  }

  switch (r) {
    case RegionId::First:
      g.xi_lo = 0.0;
      g.xi_hi = g.u_hi;
      break;
    case RegionId::Middle:
      g.xi_lo = std::log(g.q_lo) + lgh;
      g.xi_hi = std::log(g.q_hi) + lgh;
      break;
    case RegionId::Tail: {
      const double lo = -(std::log(g.q_lo) + lgh);
      const double hi = -(std::log(g.q_hi) + lgh);
      if (!(lo > 0.0 && hi > 0.0))
        throw DomainError("tail region undefined: (1-F(w_plus))Gamma(delta/2) >= 1");
      g.xi_lo = std::log(lo);
      g.xi_hi = std::log(hi);
      break;
    }
  }
  if (!(g.xi_hi != g.xi_lo) || !std::isfinite(g.xi_lo) || !std::isfinite(g.xi_hi))
    throw DomainError("degenerate region: xi(left) == xi(right)");
  g.k1 = 2.0 / (g.xi_hi - g.xi_lo);
  g.k2 = -1.0 - g.k1 * g.xi_lo;
  return g;
}

struct KPair {
  double k1, k2;
};

inline KPair solve_k(RegionId r, double delta, const RegionSpec& spec) {
  const auto g = region_geometry(r, delta, spec);
  return {g.k1, g.k2};
}

// ---- Clenshaw ---------------------------------------------------------------

// First sweep, over the delta index, for every u index: a_n = sum_m c_mn T_m(alpha).
inline void clenshaw_reduce(const ChebyshevPatch& p, double alpha, std::vector<double>& a) {
  alpha = std::clamp(alpha, -1.0, 1.0);
  const int M = p.order_delta, N = p.order_u;
  const std::size_t w = static_cast<std::size_t>(N + 1);
  a.assign(w, 0.0);
  std::vector<double> d1(w, 0.0), d2(w, 0.0);
  const double two_a = 2.0 * alpha;
  for (int m = M; m >= 1; --m) {
    const double* row = p.coeffs.data() + static_cast<std::size_t>(m) * w;
    for (std::size_t n = 0; n < w; ++n) {
      const double t = row[n] + two_a * d1[n] - d2[n];
      d2[n] = d1[n];
      d1[n] = t;
    }
  }
  for (std::size_t n = 0; n < w; ++n) a[n] = alpha * d1[n] - d2[n] + p.coeffs[n];
}

inline double clenshaw1d(std::span<const double> a, double x) {
  x = std::clamp(x, -1.0, 1.0);
  const double two_x = 2.0 * x;
  double g1 = 0.0, g2 = 0.0;
  for (std::size_t n = a.size() - 1; n >= 1; --n) {
    const double t = a[n] + two_x * g1 - g2;
    g2 = g1;
    g1 = t;
  }
  return x * g1 - g2 + a[0];
}

inline double clenshaw2d(const ChebyshevPatch& p, double alpha, double x) {
  std::vector<double> a;
  clenshaw_reduce(p, alpha, a);
  return clenshaw1d(a, x);
}

// Plain double sum with T_k from the three-term recurrence, long double
// accumulation. Used to check clenshaw2d.
inline double chebyshev_direct_sum(const ChebyshevPatch& p, double alpha, double x) {
  alpha = std::clamp(alpha, -1.0, 1.0);
  x = std::clamp(x, -1.0, 1.0);
  auto tvals = [](long double t, int n) {
    std::vector<long double> T(static_cast<std::size_t>(n + 1));
    T[0] = 1.0L;
    if (n >= 1) T[1] = t;
    for (int k = 2; k <= n; ++k) T[k] = 2.0L * t * T[k - 1] - T[k - 2];
    return T;
  };
  const auto Ta = tvals(alpha, p.order_delta);
  const auto Tx = tvals(x, p.order_u);
  long double s = 0.0L;
  for (int m = 0; m <= p.order_delta; ++m)
    for (int n = 0; n <= p.order_u; ++n) s += p.coeff(m, n) * Ta[m] * Tx[n];
  return static_cast<double>(s);
}

// ---- patch groups -----------------------------------------------------------

// The three region patches fitted on one delta interval.
struct PatchGroup {
  double delta_lo = 0.0;
  double delta_hi = 0.0;
  double target_accuracy = 0.0;
  std::array<ChebyshevPatch, 3> patches;

  const ChebyshevPatch& operator[](RegionId r) const { return patches[static_cast<int>(r)]; }
  const RegionSpec& spec() const { return patches[0].region; }
  bool covers(double delta) const { return delta >= delta_lo && delta <= delta_hi; }

  void validate() const {
    for (int i = 0; i < 3; ++i) {
      const auto& p = patches[i];
      p.validate();
      if (p.region.region_id != kRegions[i]) throw PatchFormatError("patch regions out of order");
      if (p.delta_lo != delta_lo || p.delta_hi != delta_hi)
        throw PatchFormatError("patch delta interval differs from its group");
      if (p.region.w_minus != spec().w_minus || p.region.w_plus != spec().w_plus ||
          p.region.tail_u_cap != spec().tail_u_cap || p.region.tail_w_cap != spec().tail_w_cap)
        throw PatchFormatError("patches in a group disagree on region boundaries");
    }
  }

  bool operator==(const PatchGroup&) const = default;
};

struct PatchSet {
  std::vector<PatchGroup> groups;

  // First group whose interval contains delta.
  const PatchGroup& find(double delta) const {
    for (const auto& g : groups)
      if (g.covers(delta)) return g;
    throw CoverageError("no coefficient patch covers delta = " + std::to_string(delta));
  }

  bool covers(double delta) const {
    return std::any_of(groups.begin(), groups.end(),
                       [delta](const PatchGroup& g) { return g.covers(delta); });
  }

  void validate() const {
    if (groups.empty()) throw PatchFormatError("empty patch set");
    for (const auto& g : groups) g.validate();
  }

  bool operator==(const PatchSet&) const = default;
};

// Cached per-delta data. reduced[i] holds the first Clenshaw sweep of
// region i at this delta, so a draw costs one 1-D recurrence.
struct PerDeltaContext {
  double delta = 0.0;
  double alpha = 0.0;
  double log_gamma_half_delta = 0.0;
  double u_minus = 0.0;
  double u_plus = 0.0;
  double u_top = 0.0;  // end of the tail patch
  std::array<double, 3> k1{};
  std::array<double, 3> k2{};
  std::array<std::vector<double>, 3> reduced;
  const PatchGroup* group = nullptr;
};

inline PerDeltaContext make_context(const PatchGroup& group, double delta) {
  if (!group.covers(delta)) throw CoverageError("delta outside patch group interval");
  PerDeltaContext ctx;
  ctx.delta = delta;
  ctx.group = &group;
  ctx.alpha = group[RegionId::First].alpha(delta);
  ctx.log_gamma_half_delta = log_gamma(0.5 * delta);
  for (RegionId r : kRegions) {
    const int i = static_cast<int>(r);
    const auto g = region_geometry(r, delta, group.spec());
    ctx.k1[i] = g.k1;
    ctx.k2[i] = g.k2;
    if (r == RegionId::First) ctx.u_minus = g.u_hi;
    if (r == RegionId::Middle) ctx.u_plus = g.u_hi;
    if (r == RegionId::Tail) ctx.u_top = g.u_hi;
    clenshaw_reduce(group[r], ctx.alpha, ctx.reduced[i]);
  }
  return ctx;
}

// Region of u at this delta.
inline RegionId classify(const PerDeltaContext& ctx, double u) {
  if (u < ctx.u_minus) return RegionId::First;
  if (u < ctx.u_plus) return RegionId::Middle;
  return RegionId::Tail;
}

// x = k1 xi(u) + k2 with the cached log Gamma.
inline double pullback(const PerDeltaContext& ctx, RegionId r, double u) {
  const int i = static_cast<int>(r);
  double s = 0.0;
  switch (r) {
    case RegionId::First: s = u; break;
    case RegionId::Middle: s = std::log1p(-u) + ctx.log_gamma_half_delta; break;
    case RegionId::Tail: {
      const double inner = -(std::log1p(-u) + ctx.log_gamma_half_delta);
      if (!(inner > 0.0)) throw DomainError("tail pullback outside region (corrupted patch?)");
      s = std::log(inner);
      break;
    }
  }
  return ctx.k1[i] * s + ctx.k2[i];
}

}  // namespace sqbessel
