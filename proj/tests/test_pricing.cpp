#include <gtest/gtest.h>

#include <cmath>

#include "sqbessel/pricing.hpp"
#include "test_support.hpp"

using namespace sqbessel;

namespace {
const CirParams kPut = paper_put_asset();

McConfig config(std::uint64_t n, std::uint64_t seed = kDefaultSeed) {
  McConfig c;
  c.n_paths = n;
  c.seed = seed;
  c.block_size = 4096;
  return c;
}
}  // namespace

TEST(RelativeError, Arithmetic) {
  EXPECT_EQ(relative_error(1.0, 1.0), 0.0);
  EXPECT_NEAR(relative_error(0.05, 0.0495), 0.01, 1e-15);
  EXPECT_THROW(relative_error(0.0, 1.0), DomainError);
}

TEST(ExactPut, FormsAgreeAndMatchOracle) {
  const auto f = put_price_exact_forms(kPut, 0.09, 10.0);
  EXPECT_NEAR(f.density_form, f.cdf_form, 1e-12);
  EXPECT_NEAR(put_price_exact(kPut, 0.09, 10.0), 0.06931460191004884574, 1e-12);
  EXPECT_LT(put_price_exact(kPut, 1e-9, 10.0), 1e-9);
}

TEST(ExactPut, DeepInTheMoneyIsLinear) {
  // E max(X_T - 40, 0) is far below 1e-12, so E max(K - X, 0) = K - E X
  const double e = std::exp(-5.0);
  const double mean = 0.09 * e + 0.045 / -0.5 * (e - 1.0);
  EXPECT_NEAR(put_price_exact(kPut, 40.0, 10.0), 40.0 - mean, 1e-8);
  // at K = 10 the call part E max(X - 10, 0) ~ 4.5e-7 still shows
  EXPECT_GT(put_price_exact(kPut, 10.0, 10.0) - (10.0 - mean), 1e-7);
}

TEST(McPut, WithinFiveStandardErrorsOfExact) {
  const double ref = put_price_exact(kPut, 0.09, 10.0);
  const auto r = price_put_mc(kPut, 0.09, 10.0, config(200000), Scheme::exact(),
                              testsupport::shipped());
  EXPECT_NEAR(r.price, ref, 5 * r.std_error);
  EXPECT_GT(r.price, 0.0);
  EXPECT_LT(r.price, 0.09);
  EXPECT_EQ(r.n_paths, 200000u);
}

TEST(McPut, IndependentOfThreadCount) {
  auto c1 = config(50000);
  c1.threads = 1;
  auto c3 = c1;
  c3.threads = 3;
  const auto a = price_put_mc(kPut, 0.09, 10.0, c1, Scheme::exact(), testsupport::shipped());
  const auto b = price_put_mc(kPut, 0.09, 10.0, c3, Scheme::exact(), testsupport::shipped());
  EXPECT_EQ(a.price, b.price);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(McPut, StandardErrorScalesWithPaths) {
  double ratio = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto a = price_put_mc(kPut, 0.09, 10.0, config(20000, s), Scheme::exact(),
                                testsupport::shipped());
    const auto b = price_put_mc(kPut, 0.09, 10.0, config(40000, s + 100), Scheme::exact(),
                                testsupport::shipped());
    ratio += a.std_error / b.std_error / 10.0;
  }
  EXPECT_NEAR(ratio, std::sqrt(2.0), 0.2 * std::sqrt(2.0));
}

TEST(McPut, CoverageErrorPropagates) {
  const CirParams p{0.5, -0.5, 1.0, 0.09};  // delta = 2
  EXPECT_THROW(price_put_mc(p, 0.09, 1.0, config(10), Scheme::exact(), testsupport::shipped()),
               CoverageError);
  // FTE needs no patches
  EXPECT_NO_THROW(price_put_mc(p, 0.09, 1.0, config(10), Scheme::fte(0.1), nullptr));
}

TEST(Asian, SingleFixingEqualsEuropean) {
  for (Scheme sc : {Scheme::exact(), Scheme::fte(0.5)}) {
    const auto a = price_asian_mc(kPut, 0.09, 10.0, 1, config(20000), sc, testsupport::shipped());
    const auto p = price_put_mc(kPut, 0.09, 10.0, config(20000), sc, testsupport::shipped());
    EXPECT_EQ(a.price, p.price);
  }
}

TEST(Asian, PriceBounds) {
  const auto a = price_asian_mc(kPut, 0.09, 10.0, 10, config(20000), Scheme::exact(),
                                testsupport::shipped());
  EXPECT_GT(a.price, 0.0);
  EXPECT_LT(a.price, 0.09);
  EXPECT_GT(a.std_error, 0.0);
}

TEST(Basket, SingleAssetEqualsPut) {
  OptionSpec s{OptionKind::BasketPut, 0.09, 10.0, 1, {1.0}, {kPut}};
  for (Coupling c : {Coupling::CommonU, Coupling::Independent}) {
    const auto b = price_basket_mc(s, config(20000), Scheme::exact(), testsupport::shipped(), c);
    const auto p = price_put_mc(kPut, 0.09, 10.0, config(20000), Scheme::exact(),
                                testsupport::shipped());
    EXPECT_EQ(b.price, p.price);
  }
}

TEST(Basket, CouplingLeavesMarginalsUnchanged) {
  // weight on one asset only: the payoff sees a single marginal, which the
  // coupling must not change
  for (int k : {0, 2, 4}) {
    auto s = paper_basket_case(3);
    s.weights.assign(5, 0.0);
    s.weights[k] = 1.0;
    const auto a = price_basket_mc(s, config(200000), Scheme::exact(), testsupport::shipped(),
                                   Coupling::CommonU);
    const auto b = price_basket_mc(s, config(200000, 77), Scheme::exact(),
                                   testsupport::shipped(), Coupling::Independent);
    EXPECT_NEAR(a.price, b.price, 4 * std::hypot(a.std_error, b.std_error)) << k;
  }
}

TEST(Basket, CommonUniformRaisesCorrelation) {
  const auto s = paper_basket_case(1);
  const auto a = price_basket_mc(s, config(100000), Scheme::exact(), testsupport::shipped(),
                                 Coupling::CommonU);
  const auto b = price_basket_mc(s, config(100000), Scheme::exact(), testsupport::shipped(),
                                 Coupling::Independent);
  EXPECT_GT(a.price, b.price + 10 * std::hypot(a.std_error, b.std_error));
}

TEST(Basket, SpecValidation) {
  auto s = paper_basket_case(1);
  s.weights[0] = 0.3;
  EXPECT_THROW(s.validate(), DomainError);
  EXPECT_THROW(paper_basket_case(5), DomainError);
  OptionSpec put{OptionKind::Put, 0.09, 10.0, 1, {}, {kPut, kPut}};
  EXPECT_THROW(put.validate(), DomainError);
}

TEST(Moments, CentralMeanWithinStandardError) {
  const auto rows = moment_report({0.18, 0.0}, 1000000, 2, testsupport::shipped(), 1);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0].analytic, 0.18, 1e-15);
  EXPECT_LT(rows[0].rel_error, 4 * std::sqrt(2 * 0.18) / 0.18 / 1000.0);
  EXPECT_GT(rows[0].jackknife_se, 0.0);
}

TEST(Moments, ErrorsWithinJackknifeBand) {
  const auto rows = moment_report({0.001, 15.9995}, 1000000, 10, testsupport::shipped(), 2);
  for (const auto& r : rows) EXPECT_LT(r.rel_error, 5 * r.jackknife_se) << r.k;
}
