#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "smokekit/metrics.hpp"
#include "support/oracles.hpp"

using namespace smokekit;

TEST(Psnr, IdenticalIsInfinite) {
  std::mt19937_64 rng(1);
  const Image a = testutil::random_image(rng, 8, 8);
  EXPECT_TRUE(std::isinf(psnr(a, a)));
  EXPECT_GT(psnr(a, a), 0.0);
}

TEST(Psnr, UniformOffset) {
  std::mt19937_64 rng(2);
  const Image a = testutil::random_image(rng, 16, 16, 3, 0.0, 0.9);
  Image b = a;
  for (double &s : b.samples()) {
    s += 0.1;
  }
  EXPECT_NEAR(psnr(a, b), 20.0, 1e-9);
}

TEST(Psnr, MatchesDirectFormula) {
  std::mt19937_64 rng(3);
  const Image a = testutil::random_image(rng, 8, 8), b = testutil::random_image(rng, 8, 8);
  double se = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    se += (a.samples()[i] - b.samples()[i]) * (a.samples()[i] - b.samples()[i]);
  }
  EXPECT_NEAR(psnr(a, b), 10.0 * std::log10(1.0 / (se / a.size())), 1e-9);
  EXPECT_EQ(psnr(a, b), psnr(b, a));
}

TEST(Psnr, RejectsMismatch) {
  EXPECT_THROW(psnr(Image(4, 4, 3), Image(4, 5, 3)), ContractError);
  EXPECT_THROW(psnr(Image(4, 4, 3), Image(4, 4, 1)), ContractError);
}

TEST(Ssim, IdenticalIsExactlyOne) {
  std::mt19937_64 rng(4);
  const Image a = testutil::random_image(rng, 20, 17);
  EXPECT_EQ(ssim(a, a), 1.0);
}

TEST(Ssim, ConstantVersusConstantClosedForm) {
  const double v1 = 0.3, v2 = 0.7, c1 = 1e-4;
  const double expect = (2 * v1 * v2 + c1) / (v1 * v1 + v2 * v2 + c1);
  EXPECT_NEAR(ssim(Image(16, 16, 3, v1), Image(16, 16, 3, v2)), expect, 1e-9);
}

TEST(Ssim, InvertedBinaryIsNegativeAndMatchesTextbook) {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.5);
  Image a(24, 20, 1), b(24, 20, 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a.samples()[i] = coin(rng) ? 1.0 : 0.0;
    b.samples()[i] = 1.0 - a.samples()[i];
  }
  const double s = ssim(a, b);
  EXPECT_LT(s, 0.0);
  EXPECT_NEAR(s, oracle::ssim_plane(oracle::to_grid(a), oracle::to_grid(b)), 1e-9);
}

TEST(Ssim, RandomMatchesTextbookPerChannel) {
  std::mt19937_64 rng(6);
  const Image a = testutil::random_image(rng, 19, 15), b = testutil::random_image(rng, 19, 15);
  double expect = 0.0;
  for (int c = 0; c < 3; ++c) {
    expect += oracle::ssim_plane(oracle::to_grid(a, c), oracle::to_grid(b, c));
  }
  EXPECT_NEAR(ssim(a, b), expect / 3.0, 1e-9);
}

TEST(Ssim, LuminancePolicyDiffersFromPerChannel) {
  std::mt19937_64 rng(7);
  const Image a = testutil::random_image(rng, 16, 16), b = testutil::random_image(rng, 16, 16);
  SsimParams lum;
  lum.policy = SsimChannelPolicy::luminance;
  EXPECT_NE(ssim(a, b), ssim(a, b, lum));
  EXPECT_EQ(ssim(a, a, lum), 1.0);
}

TEST(Ssim, RejectsTooSmall) { EXPECT_THROW(ssim(Image(10, 20, 3), Image(10, 20, 3)), ContractError); }

TEST(SsimProperty, SymmetricAndBounded) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Image a = testutil::random_image(rng, 14, 12), b = testutil::random_image(rng, 14, 12);
    const double ab = ssim(a, b), ba = ssim(b, a);
    EXPECT_NEAR(ab, ba, 1e-9);
    EXPECT_GE(ab, -1.0);
    EXPECT_LE(ab, 1.0);
  }
}

namespace {

SceneEval scene(const std::string &name, std::vector<double> psnrs) {
  SceneEval e;
  e.scene = name;
  for (std::size_t i = 0; i < psnrs.size(); ++i) {
    e.views.push_back({std::to_string(i), psnrs[i], 0.5, std::nullopt, {}});
  }
  return e;
}

} // namespace

TEST(Aggregate, TwoScenes) {
  const auto s = aggregate({scene("a", {10.0}), scene("b", {20.0})}, "m");
  EXPECT_EQ(s.overall.psnr, 15.0);
  EXPECT_EQ(s.scenes.size(), 2u);
}

TEST(Aggregate, SingleScene) {
  const auto s = aggregate({scene("a", {11.0, 13.0})}, "m");
  EXPECT_EQ(s.overall.psnr, 12.0);
}

TEST(Aggregate, UnweightedSceneMean) {
  // Scene a has 1 view at 10 dB, scene b has 3 views at 20 dB.
  // Scene-unweighted mean = 15; view-weighted mean = 17.5.
  const auto s = aggregate({scene("a", {10.0}), scene("b", {20.0, 20.0, 20.0})}, "m");
  EXPECT_EQ(s.overall.psnr, 15.0);
  EXPECT_NE(s.overall.psnr, 17.5);
}

TEST(Aggregate, SubsetSelection) {
  std::vector<SceneEval> evals{scene("Akikaze", {5.0}), scene("Koharu", {10.0}), scene("Midori", {20.0})};
  const auto all = aggregate(evals, "m");
  const auto subset = aggregate(evals, "m", {{}, {"Akikaze"}});
  EXPECT_EQ(all.scenes.size() - subset.scenes.size(), 1u);
  EXPECT_EQ(subset.overall.psnr, 15.0);
  const auto only = aggregate(evals, "m", {{"Midori"}, {}});
  EXPECT_EQ(only.overall.psnr, 20.0);
}

TEST(Aggregate, Errors) {
  EXPECT_THROW(aggregate({}, "m"), ContractError);
  EXPECT_THROW(aggregate({scene("a", {1.0}), scene("a", {2.0})}, "m"), ContractError);
  EXPECT_THROW(aggregate({scene("a", {1.0})}, "m", {{}, {"a"}}), ContractError);
}

TEST(Aggregate, LpipsOnlyWhenEveryViewHasIt) {
  auto a = scene("a", {10.0});
  auto b = scene("b", {12.0});
  a.views[0].lpips = 0.6;
  EXPECT_FALSE(aggregate({a, b}, "m").overall.lpips.has_value());
  b.views[0].lpips = 0.4;
  EXPECT_NEAR(*aggregate({a, b}, "m").overall.lpips, 0.5, 1e-15);
}

TEST(AggregateProperty, PermutationInvariant) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(5.0, 20.0);
  std::vector<SceneEval> evals;
  for (int i = 0; i < 8; ++i) {
    evals.push_back(scene("s" + std::to_string(i), {u(rng), u(rng), u(rng)}));
  }
  const auto base = aggregate(evals, "m");
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(evals.begin(), evals.end(), rng);
    const auto s = aggregate(evals, "m");
    EXPECT_NEAR(s.overall.psnr, base.overall.psnr, 1e-12);
    EXPECT_NEAR(s.overall.ssim, base.overall.ssim, 1e-12);
  }
}

TEST(Table, MethodTableLayout) {
  BenchmarkSummary s;
  s.method = "3DGS";
  s.overall = {11.439, 0.579, 0.631};
  BenchmarkSummary t;
  t.method = "ours";
  t.overall = {15.209, 0.644, std::nullopt};
  const std::string table = format_method_table({s, t});
  EXPECT_NE(table.find("3DGS      11.439    0.579    0.631"), std::string::npos) << table;
  EXPECT_NE(table.find("ours      15.209    0.644        -"), std::string::npos) << table;
}
