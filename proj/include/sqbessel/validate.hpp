#pragma once

// Checks on a loaded patch set: Clenshaw against the naive double sum, and
// the CDF residual |F_delta(W(u)) - u| of the inverse on a (delta, u) grid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>

#include "sqbessel/chebyshev.hpp"
#include "sqbessel/sampler.hpp"
#include "sqbessel/specfun.hpp"

namespace sqbessel {

struct ClenshawCheck {
  int points = 0;
  double max_rel_diff = 0.0;  // |fast - ref| / max(|ref|, sum |c_mn|)
  double max_pointwise_rel_diff = 0.0;  // |fast - ref| / |ref|
};

inline ClenshawCheck clenshaw_check(const ChebyshevPatch& p, int points, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  ClenshawCheck r{points, 0.0, 0.0};
  double scale = 0.0;
  for (double c : p.coeffs) scale += std::fabs(c);
  for (int i = 0; i < points; ++i) {
    const double a = unit(gen), x = unit(gen);
    const double fast = clenshaw2d(p, a, x);
    const double ref = chebyshev_direct_sum(p, a, x);
    const double diff = std::fabs(fast - ref);
    r.max_rel_diff = std::max(r.max_rel_diff, diff / std::max(std::fabs(ref), scale));
    r.max_pointwise_rel_diff =
        std::max(r.max_pointwise_rel_diff, diff / std::max(std::fabs(ref), 1e-300));
  }
  return r;
}

struct InverseCheck {
  double max_residual = 0.0;
  double worst_delta = 0.0;
  double worst_u = 0.0;
  RegionId worst_region = RegionId::First;
  double max_residual_by_region[3] = {0.0, 0.0, 0.0};
};

// u nodes are evenly spaced in logit(u) between u_min and u_max so both
// tails are sampled; delta nodes are evenly spaced on [delta_lo, delta_hi].
inline InverseCheck inverse_check(ChiSquareSampler& s, double delta_lo, double delta_hi,
                                  int n_delta, int n_u, double u_min, double u_max) {
  InverseCheck r;
  const double l0 = std::log(u_min / (1.0 - u_min)), l1 = std::log(u_max / (1.0 - u_max));
  for (int i = 0; i < n_delta; ++i) {
    const double d =
        n_delta == 1 ? delta_lo : delta_lo + (delta_hi - delta_lo) * i / (n_delta - 1);
    const auto& ctx = s.context(d);
    for (int j = 0; j < n_u; ++j) {
      const double l = n_u == 1 ? l0 : l0 + (l1 - l0) * j / (n_u - 1);
      double u = 1.0 / (1.0 + std::exp(-l));
      if (j == 0) u = u_min;
      if (j == n_u - 1) u = u_max;
      const double w = s.inverse(d, u);
      // compare on the side where the probability is resolved
      const double res = u > 0.5 ? std::fabs(chi2_sf(d, w) - (1.0 - u)) : std::fabs(chi2_cdf(d, w) - u);
      const RegionId reg = classify(ctx, std::min(u, ctx.u_top));
      auto& slot = r.max_residual_by_region[static_cast<int>(reg)];
      slot = std::max(slot, res);
      if (res > r.max_residual) {
        r.max_residual = res;
        r.worst_delta = d;
        r.worst_u = u;
        r.worst_region = reg;
      }
    }
  }
  return r;
}

}  // namespace sqbessel
