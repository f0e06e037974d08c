#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "smokekit/dehaze.hpp"
#include "smokekit/fixtures.hpp"
#include "smokekit/scatter.hpp"
#include "support/oracles.hpp"

using namespace smokekit;

TEST(Recover, AirlightObservationIsFixedPoint) {
  const Airlight a(0.8, 0.7, 0.6);
  Image obs(3, 3, 3);
  for (int c = 0; c < 3; ++c) {
    for (double &s : obs.plane(c)) {
      s = a[c];
    }
  }
  EXPECT_LT(testutil::max_abs_diff(recover(obs, TransmissionMap(3, 3, 0.2), a, 0.1), obs), 1e-15);
}

TEST(Recover, ClearMediumIsIdentity) {
  std::mt19937_64 rng(1);
  const Image obs = testutil::random_image(rng, 5, 5);
  EXPECT_LT(testutil::max_abs_diff(recover(obs, TransmissionMap(5, 5, 1.0), Airlight(0.9, 0.9, 0.9), 0.1), obs),
            1e-15);
}

TEST(Recover, SinglePixelHandValue) {
  // (0.46 - 0.8) / 0.6 + 0.8 = 0.23333...
  const Image rec = recover(Image(1, 1, 3, 0.46), TransmissionMap(1, 1, 0.6), Airlight(0.8, 0.8, 0.8), 0.1);
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(rec.at(0, 0, c), 0.23333333333333328, 1e-12);
  }
}

TEST(Recover, RejectsNonPositiveFloor) {
  EXPECT_THROW(recover(Image(1, 1, 3), TransmissionMap(1, 1, 0.5), Airlight(0.5, 0.5, 0.5), -0.1), ContractError);
}

TEST(GammaEnhance, FixedPointsAndSquareRoot) {
  Image img(3, 1, 1);
  img.at(0, 0) = 0.0;
  img.at(1, 0) = 1.0;
  img.at(2, 0) = 0.25;
  const Image out = gamma_enhance(img, 0.5);
  EXPECT_EQ(out.at(0, 0), 0.0);
  EXPECT_EQ(out.at(1, 0), 1.0);
  EXPECT_EQ(out.at(2, 0), 0.5);
  EXPECT_EQ(gamma_enhance(img, 1.0), img);
}

TEST(GammaEnhance, RejectsNegativeSamples) {
  Image img(1, 1, 1, -0.01);
  EXPECT_THROW(gamma_enhance(img, 0.5), ContractError);
  EXPECT_THROW(gamma_enhance(Image(1, 1, 1, 0.5), 0.0), ContractError);
}

TEST(GammaEnhance, StrictlyIncreasing) {
  double prev = -1.0;
  for (int i = 1; i < 1000; ++i) {
    const double v = gamma_enhance(Image(1, 1, 1, i / 1000.0), 0.5).at(0, 0);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(DehazeImage, HazeFreeInputOnlyGetsGamma) {
  // One exact zero sample makes every 15x15 window of the 8x8 image dark, so
  // the coarse transmission is exactly 1 and recovery is the identity.
  std::mt19937_64 rng(2);
  Image obs = testutil::random_image(rng, 8, 8, 3, 0.2, 0.9);
  obs.at(3, 4, 2) = 0.0;
  const DehazeResult res = dehaze_image(obs, {});
  EXPECT_LT(testutil::max_abs_diff(res.pre_gamma, obs), 1e-6);
  Image expect = obs;
  for (double &s : expect.samples()) {
    s = std::sqrt(s);
  }
  EXPECT_LT(testutil::max_abs_diff(res.image, expect), 1e-6);
  EXPECT_NEAR(res.report.t_min_value, 1.0, 1e-9);
}

TEST(DehazeImage, UniformAirlightObservation) {
  const Image obs(6, 6, 3, 0.64);
  DehazeParams p;
  const DehazeResult res = dehaze_image(obs, p);
  for (double v : res.image.samples()) {
    EXPECT_NEAR(v, 0.8, 1e-12);
  }
}

TEST(DehazeImage, KnownAirlightWithoutRefinementRecoversClean) {
  fixtures::FixtureSpec spec;
  spec.seed = 5;
  spec.width = spec.height = 48;
  const Image clean = fixtures::make_clean_scene(spec);
  const Airlight a(0.85, 0.85, 0.9);
  const Image obs = composite(clean, TransmissionMap(48, 48, 0.5), a);
  DehazeParams p;
  p.airlight_override = a;
  p.gf.radius = 0;
  const DehazeResult res = dehaze_image(obs, p);
  const Image oracle_rec = invert_exact(obs, TransmissionMap(48, 48, 0.5), a, p.t_min);
  EXPECT_LT(mean_abs_error(oracle_rec, clean), 1e-12);
  EXPECT_LT(mean_abs_error(res.pre_gamma, clean), 0.1);
  EXPECT_TRUE(res.report.airlight_overridden);
  EXPECT_EQ(res.report.airlight, a);
}

TEST(DehazeImage, ReportFractionsInRange) {
  std::mt19937_64 rng(3);
  const Image obs = testutil::random_image(rng, 20, 20);
  DehazeParams p;
  p.gf.radius = 4;
  const DehazeReport r = dehaze_image(obs, p).report;
  EXPECT_FALSE(r.airlight_overridden);
  EXPECT_GE(r.fraction_t_clamped, 0.0);
  EXPECT_LE(r.fraction_t_clamped, 1.0);
  EXPECT_GE(r.fraction_output_clamped, 0.0);
  EXPECT_LE(r.fraction_output_clamped, 1.0);
  EXPECT_LE(r.t_min_value, r.t_mean_value);
  EXPECT_LE(r.t_mean_value, r.t_max_value);
}

TEST(DehazeImage, DegenerateInputs) {
  EXPECT_NO_THROW(dehaze_image(Image(1, 1, 3, 0.5), {}));
  const DehazeResult black = dehaze_image(Image(4, 4, 3, 0.0), {});
  for (double v : black.image.samples()) {
    EXPECT_EQ(v, 0.0);
  }
  EXPECT_THROW(dehaze_image(Image(4, 4, 1), {}), ContractError);
}

TEST(DehazeImage, Deterministic) {
  std::mt19937_64 rng(4);
  const Image obs = testutil::random_image(rng, 40, 30);
  EXPECT_EQ(dehaze_image(obs, {}).image, dehaze_image(obs, {}).image);
}

TEST(DehazeProperty, RedehazingStaysInRange) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const Image obs = testutil::random_image(rng, 24, 24);
    const Image once = dehaze_image(obs, {}).image;
    const Image twice = dehaze_image(once, {}).image;
    for (double v : twice.samples()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(DehazeProperty, RestorationImprovesOnSmokyInput) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    fixtures::FixtureSpec spec;
    spec.seed = seed;
    spec.width = spec.height = 40;
    spec.kind = seed % 2 ? fixtures::SceneKind::gradient : fixtures::SceneKind::textured_noise;
    const Image clean = fixtures::make_clean_scene(spec);
    const Airlight a(0.9, 0.88, 0.86);
    for (double t : {0.3, 0.5, 0.7}) {
      const Image obs = composite(clean, TransmissionMap(40, 40, t), a);
      DehazeParams p;
      p.airlight_override = a;
      const DehazeResult res = dehaze_image(obs, p);
      EXPECT_LT(mean_abs_error(res.pre_gamma, clean), mean_abs_error(obs, clean)) << seed << " t=" << t;
    }
  }
}
