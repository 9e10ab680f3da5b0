#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "appendix_tables.hpp"
#include "sqbessel/chebfit.hpp"
#include "sqbessel/chebyshev.hpp"
#include "sqbessel/validate.hpp"

using namespace sqbessel;

namespace {

// Exact inverse as a function of the Chebyshev variables of one region.
double exact_w(RegionId r, double c, double d, const RegionSpec& spec, double alpha, double x) {
  const double delta = 0.5 * ((d - c) * alpha + (d + c));
  const auto g = region_geometry(r, delta, spec);
  const double s = (x - g.k2) / g.k1;
  const double lgh = log_gamma(0.5 * delta);
  switch (r) {
    case RegionId::First: return chi2_inv_reference(delta, s);
    case RegionId::Middle: return chi2_isf_reference(delta, std::exp(s - lgh));
    case RegionId::Tail: return chi2_isf_reference(delta, std::exp(-std::exp(s) - lgh));
  }
  return 0.0;
}

// Discrete Chebyshev-Gauss transform on K x L nodes.
double gauss_coefficient(RegionId r, double c, double d, const RegionSpec& spec, int m, int n,
                         int K, int L) {
  double s = 0.0;
  for (int i = 0; i < K; ++i) {
    const double ti = std::numbers::pi * (i + 0.5) / K;
    for (int j = 0; j < L; ++j) {
      const double tj = std::numbers::pi * (j + 0.5) / L;
      s += exact_w(r, c, d, spec, std::cos(ti), std::cos(tj)) * std::cos(m * ti) * std::cos(n * tj);
    }
  }
  return s * (m == 0 ? 1.0 : 2.0) / K * (n == 0 ? 1.0 : 2.0) / L;
}

ChebyshevPatch random_patch(int M, int N, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  ChebyshevPatch p;
  p.delta_lo = 0.1;
  p.delta_hi = 0.2;
  p.order_delta = M;
  p.order_u = N;
  for (int i = 0; i < (M + 1) * (N + 1); ++i) p.coeffs.push_back(z(gen));
  return p;
}

}  // namespace

TEST(Xi, Oracles) {
  EXPECT_DOUBLE_EQ(xi(RegionId::First, 0.3, 0.25), 0.25);
  EXPECT_NEAR(xi(RegionId::Middle, 0.2, 0.5), 1.55956547117426065045, 1e-14);
  // 1 - 1e-8 is not exact in double; the oracle is for the exact value, and
  // the rounding of u moves xi by about 3e-10 here
  EXPECT_NEAR(xi(RegionId::Tail, 0.18, 1 - 1e-8), 2.776225728436070636, 1e-9);
  EXPECT_THROW(xi(RegionId::Middle, 0.2, 1.0), DomainError);
}

TEST(Xi, DerivativeMatchesFiniteDifference) {
  for (RegionId r : kRegions)
    for (double u : {0.3, 0.9, 0.999}) {
      if (r == RegionId::Tail && u < 0.99) continue;  // (1-u)Gamma(0.075) < 1 needed
      const double h = 1e-6 * (1 - u);
      const double fd = (xi(r, 0.15, u + h) - xi(r, 0.15, u - h)) / (2 * h);
      EXPECT_NEAR(xi_derivative(r, 0.15, u) / fd, 1.0, 1e-6) << region_name(r) << " " << u;
    }
}

TEST(Geometry, AffineMapHitsEndpoints) {
  const RegionSpec spec;
  for (RegionId r : kRegions)
    for (double delta : {0.1, 0.15, 0.2}) {
      const auto g = region_geometry(r, delta, spec);
      EXPECT_NEAR(g.k1 * g.xi_lo + g.k2, -1.0, 1e-14);
      EXPECT_NEAR(g.k1 * g.xi_hi + g.k2, 1.0, 1e-13);
      EXPECT_LT(g.u_lo, g.u_hi);
    }
  // regions tile the u axis
  const auto f = region_geometry(RegionId::First, 0.15, spec);
  const auto m = region_geometry(RegionId::Middle, 0.15, spec);
  const auto t = region_geometry(RegionId::Tail, 0.15, spec);
  EXPECT_EQ(f.u_hi, m.u_lo);
  EXPECT_EQ(m.u_hi, t.u_lo);
  // 1 - F(20) = 3.9e-7 > 1e-8 here, so the tail patch stops at w = 20
  EXPECT_EQ(t.w_hi, 20.0);
  EXPECT_EQ(t.q_hi, chi2_sf(0.15, 20.0));
}

TEST(Geometry, TailCappedForTinyDelta) {
  // 1 - F(20) = 3.1e-9 < 1e-8 at delta = 0.0015: the cap binds first
  const RegionSpec spec;
  const auto t = region_geometry(RegionId::Tail, 0.0015, spec);
  EXPECT_LT(t.w_hi, 20.0);
  EXPECT_EQ(t.u_hi, spec.tail_u_cap);
  EXPECT_EQ(t.q_hi, spec.tail_q_cap());
  EXPECT_NEAR(chi2_sf(0.0015, t.w_hi) / spec.tail_q_cap(), 1.0, 1e-11);
}

TEST(Clenshaw, MatchesDirectSum) {
  for (auto [M, N] : {std::pair{0, 0}, {0, 7}, {5, 0}, {6, 15}, {9, 38}}) {
    const auto p = random_patch(M, N, 11 + M * 100 + N);
    const auto c = clenshaw_check(p, 200, 5);
    EXPECT_LT(c.max_rel_diff, 1e-14) << M << "x" << N;
  }
}

TEST(Clenshaw, ReducedFormEqualsTwoDimensional) {
  const auto p = random_patch(4, 9, 3);
  std::vector<double> a;
  clenshaw_reduce(p, 0.37, a);
  for (double x : {-1.0, -0.2, 0.0, 0.81, 1.0}) EXPECT_EQ(clenshaw1d(a, x), clenshaw2d(p, 0.37, x));
  // T_1(x) T_2(alpha) picks out one coefficient
  ChebyshevPatch q;
  q.order_delta = 2;
  q.order_u = 1;
  q.coeffs = {0, 0, 0, 0, 0, 1};
  EXPECT_NEAR(clenshaw2d(q, 0.3, 0.7), (2 * 0.09 - 1) * 0.7, 1e-15);
}

TEST(Coefficients, MatchDiscreteChebyshevTransform) {
  const RegionSpec spec;
  // Middle and Tail coefficients decay fast, so 48 nodes per axis alias
  // only at the 1e-12 level.
  for (RegionId r : {RegionId::Middle, RegionId::Tail}) {
    const auto cm = coefficient_matrix(r, 0.1, 0.2, spec, 2, 3);
    for (int m = 0; m <= 2; ++m)
      for (int n = 0; n <= 3; ++n)
        EXPECT_NEAR(cm.at(m, n), gauss_coefficient(r, 0.1, 0.2, spec, m, n, 24, 48), 2e-10)
            << region_name(r) << " " << m << "," << n;
  }
  EXPECT_DOUBLE_EQ(coefficient(1, 2, RegionId::Middle, 0.1, 0.2, spec),
                   coefficient_matrix(RegionId::Middle, 0.1, 0.2, spec, 1, 2).at(1, 2));
}

TEST(Coefficients, FirstRegionAgainstTransform) {
  // the first region has a w ~ u^{2/delta} endpoint, so the transform
  // converges slowly; only the leading entries are compared
  const RegionSpec spec;
  const auto cm = coefficient_matrix(RegionId::First, 0.1, 0.2, spec, 1, 2);
  for (int m = 0; m <= 1; ++m)
    for (int n = 0; n <= 2; ++n)
      EXPECT_NEAR(cm.at(m, n), gauss_coefficient(RegionId::First, 0.1, 0.2, spec, m, n, 16, 400),
                  1e-7);
}

TEST(Coefficients, AppendixSpotAnchors) {
  const RegionSpec spec;
  EXPECT_NEAR(coefficient(0, 0, RegionId::First, 0.1, 0.2, spec), 0.0015173224201204, 1e-6);
  EXPECT_NEAR(coefficient(0, 0, RegionId::Middle, 0.1, 0.2, spec), 0.3875945631074440, 1e-6);
  EXPECT_NEAR(coefficient(0, 0, RegionId::Tail, 0.1, 0.2, spec), 6.8753214515317200, 1e-6);
  EXPECT_NEAR(coefficient(3, 5, RegionId::First, 0.1, 0.2, spec), appendix::kFirst[3][5], 1e-6);
}

TEST(Truncation, CutsAfterLastLargeRowAndColumn) {
  CoefficientMatrix cm;
  cm.order_delta = 4;
  cm.order_u = 5;
  cm.values.assign(30, 0.0);
  auto set = [&](int m, int n, double v) { cm.values[m * 6 + n] = v; };
  set(0, 0, 1.0);
  set(1, 3, 1e-3);
  set(2, 1, 1e-5);
  set(3, 4, 1e-9);  // below tol, omitted
  const auto t = truncation_orders(cm, 1e-8);
  EXPECT_EQ(t.order_delta, 2);
  EXPECT_EQ(t.order_u, 3);
  EXPECT_DOUBLE_EQ(t.omitted_max, 1e-9);
  set(4, 0, 1.0);  // last row large: block must grow
  EXPECT_EQ(truncation_orders(cm, 1e-8).order_delta, -1);
}

TEST(Fit, OrderCapRaisesFitError) {
  FitOptions opt;
  opt.order_cap = 10;
  EXPECT_THROW(fit_patch(RegionId::First, 0.001, 0.002, default_region_spec(0.001), 1e-8, opt),
               FitError);
  EXPECT_THROW(fit_patch(RegionId::Middle, 0.2, 0.1, RegionSpec{}, 1e-8), DomainError);
}

TEST(Fit, LooserTargetGivesLowerOrders) {
  const auto spec = default_region_spec(0.1);
  const auto lo = fit_patch(RegionId::Middle, 0.1, 0.2, spec, 1e-4);
  const auto hi = fit_patch(RegionId::Middle, 0.1, 0.2, spec, 1e-8);
  EXPECT_LT(lo.order_u, hi.order_u);
  EXPECT_LE(lo.omitted_max, 1e-4);
  EXPECT_LE(hi.omitted_max, 1e-8);
  EXPECT_NO_THROW(hi.validate());
}
