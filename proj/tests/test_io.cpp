#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "sqbessel/chebfit.hpp"
#include "sqbessel/patch_io.hpp"
#include "sqbessel/report.hpp"

using namespace sqbessel;

namespace {

const PatchSet& small_set() {
  static const PatchSet s = [] {
    PatchSet set;
    set.groups.push_back(fit_group(0.1, 0.2, default_region_spec(0.1), 1e-4));
    return set;
  }();
  return s;
}

void replace_once(std::string& s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  ASSERT_NE(pos, std::string::npos) << from;
  s.replace(pos, from.size(), to);
}

}  // namespace

TEST(PatchIo, RoundTripIsExact) {
  const auto text = patches_to_string(small_set());
  const auto back = patches_from_string(text);
  EXPECT_EQ(back, small_set());
  EXPECT_EQ(patches_to_string(back), text);
}

TEST(PatchIo, FileRoundTripAndMerge) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto a = (dir / "sqbessel_io_a.json").string();
  save_patches(small_set(), a);
  const auto merged = load_patch_files(std::vector<std::string>{a, a});
  ASSERT_EQ(merged.groups.size(), 2u);
  EXPECT_EQ(merged.groups[1], small_set().groups[0]);
  std::filesystem::remove(a);
  EXPECT_THROW(load_patches(a), std::runtime_error);
}

TEST(PatchIo, ChecksumDetectsEdits) {
  auto text = patches_to_string(small_set());
  const auto c00 = detail::fmt17(small_set().groups[0].patches[1].coeffs[0]);
  replace_once(text, c00, detail::fmt17(std::nextafter(small_set().groups[0].patches[1].coeffs[0], 1.0)));
  EXPECT_THROW(patches_from_string(text), PatchFormatError);
}

TEST(PatchIo, RejectsMalformedFiles) {
  const auto good = patches_to_string(small_set());
  EXPECT_THROW(patches_from_string("{"), PatchFormatError);
  EXPECT_THROW(patches_from_string("{}"), PatchFormatError);
  auto t = good;
  replace_once(t, "\"schema_version\": 1", "\"schema_version\": 2");
  EXPECT_THROW(patches_from_string(t), PatchFormatError);
  t = good;
  replace_once(t, "sqbessel-chebyshev-patches", "something-else");
  EXPECT_THROW(patches_from_string(t), PatchFormatError);
  t = good;
  replace_once(t, "\"region\": \"middle\"", "\"region\": \"tail\"");
  EXPECT_THROW(patches_from_string(t), PatchFormatError);
  t = good;
  replace_once(t, "\"order_u\": 5", "\"order_u\": 4");
  EXPECT_THROW(patches_from_string(t), PatchFormatError);
}

TEST(PatchSetCoverage, FindThrowsOutsideIntervals) {
  EXPECT_NO_THROW(small_set().find(0.1));
  EXPECT_NO_THROW(small_set().find(0.2));
  EXPECT_THROW(small_set().find(0.25), CoverageError);
  EXPECT_FALSE(small_set().covers(0.05));
}

TEST(Report, PriceCsvRoundTrip) {
  PriceRecord r;
  r.option = "put";
  r.scheme = "exact";
  r.n_paths = 1000000;
  r.seed = 20240531;
  r.coeffs = "1e-08";
  r.price = 0.069314601910048831;
  r.std_error = 1.0 / 3.0 * 1e-4;
  r.std_error_x1e3 = r.std_error * 1e3;
  r.reference = 0.06931460191004884;
  r.relative_error = 2.2e-4;
  r.elapsed_s = 0.1234;
  PriceRecord s = r;
  s.option = "asian";
  s.reference = std::numeric_limits<double>::quiet_NaN();
  s.relative_error = std::numeric_limits<double>::quiet_NaN();
  const auto back = from_csv<PriceRecord>(to_csv(std::vector{r, s}));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].price, r.price);
  EXPECT_EQ(back[0].std_error, r.std_error);
  EXPECT_EQ(back[0].elapsed_s, r.elapsed_s);
  EXPECT_EQ(back[0].coeffs, r.coeffs);
  EXPECT_TRUE(std::isnan(back[1].reference));
  EXPECT_EQ(to_csv(back), to_csv(std::vector{r, s}));
}

TEST(Report, OmitTimingDropsOnlyTiming) {
  PriceRecord r;
  r.elapsed_s = 9.0;
  const auto csv = to_csv(std::vector{r}, true);
  EXPECT_EQ(csv.find("elapsed"), std::string::npos);
  EXPECT_EQ(from_csv<PriceRecord>(csv)[0].elapsed_s, 0.0);
  EXPECT_FALSE(to_json(std::vector{r}, true)[0].contains("elapsed_s"));
}

TEST(Report, MomentJsonRoundTrip) {
  MomentRecord m{0.1, 0.11517, 1000000, 7, 10, 332811605.6614583881, 3.3e8, 0.01, 0.2};
  const auto j = nlohmann::json::parse(to_json(std::vector{m}).dump());
  const auto back = from_json<MomentRecord>(j);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].analytic, m.analytic);
  EXPECT_EQ(back[0].k, 10);
  EXPECT_EQ(back[0].lambda, m.lambda);
}

TEST(Report, SampleCsvRoundTripManyValues) {
  std::vector<SampleRecord> v;
  double x = 1e-300;
  for (int i = 0; i < 60; ++i, x *= 1e10) v.push_back({i, x * (1.0 + 1.0 / 7.0)});
  const auto back = from_csv<SampleRecord>(to_csv(v));
  for (int i = 0; i < 60; ++i) EXPECT_EQ(back[i].value, v[i].value);
}
