#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "smokekit/color.hpp"
#include "support/oracles.hpp"

using namespace smokekit;

namespace {

Image solid(double r, double g, double b, int w = 2, int h = 2) {
  Image img(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(x, y, 0) = r;
      img.at(x, y, 1) = g;
      img.at(x, y, 2) = b;
    }
  }
  return img;
}

} // namespace

TEST(Image, LayoutIsPlanarRowMajor) {
  Image img(3, 2, 3);
  img.at(2, 1, 1) = 0.5;
  EXPECT_EQ(img.size(), 18u);
  EXPECT_EQ(img.samples()[1 * 6 + 1 * 3 + 2], 0.5);
  EXPECT_EQ(img.plane(1)[5], 0.5);
}

TEST(Image, RejectsBadChannelCount) {
  EXPECT_THROW(Image(2, 2, 2), ContractError);
  EXPECT_THROW(Image(-1, 2, 3), ContractError);
}

TEST(Image, Clamp01) {
  Image img(3, 1, 1);
  img.at(0, 0) = 1.3;
  img.at(1, 0) = -0.2;
  img.at(2, 0) = 0.5;
  const Image c = clamp01(img);
  EXPECT_EQ(c.at(0, 0), 1.0);
  EXPECT_EQ(c.at(1, 0), 0.0);
  EXPECT_EQ(c.at(2, 0), 0.5);
}

TEST(Image, Clamp01RejectsNaN) {
  Image img(1, 1, 1);
  img.at(0, 0) = std::nan("");
  EXPECT_THROW(clamp01(img), ContractError);
}

TEST(Airlight, RejectsNonPositive) {
  EXPECT_THROW(Airlight(0.0, 0.5, 0.5), ContractError);
  EXPECT_THROW(Airlight(0.5, 1.2, 0.5), ContractError);
  EXPECT_NO_THROW(Airlight(0.01, 1.0, 0.5));
}

TEST(TransmissionMap, RejectsOutOfRange) {
  Image t(2, 1, 1, 0.5);
  t.at(1, 0) = 0.0;
  EXPECT_THROW(TransmissionMap{t}, ContractError);
  EXPECT_THROW(TransmissionMap(2, 2, 1.5), ContractError);
}

TEST(Lab, WhiteAndBlack) {
  const LabImage white = rgb_to_lab(solid(1, 1, 1));
  EXPECT_NEAR(white.at(0, 0, 0), 100.0, 1e-4);
  EXPECT_NEAR(white.at(0, 0, 1), 0.0, 1e-3);
  EXPECT_NEAR(white.at(0, 0, 2), 0.0, 1e-3);
  const LabImage black = rgb_to_lab(solid(0, 0, 0));
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(black.at(0, 0, c), 0.0, 1e-12);
  }
}

TEST(Lab, MidGrayMatchesIndependentFormula) {
  // L* of sRGB 0.5 evaluated independently: linear 0.21404114048223255,
  // L = 116 * cbrt(Y) - 16.
  const LabImage gray = rgb_to_lab(solid(0.5, 0.5, 0.5));
  EXPECT_NEAR(gray.at(0, 0, 0), 53.38896474111432, 1e-4);
  EXPECT_NEAR(gray.at(0, 0, 1), 0.0, 1e-3);
  EXPECT_NEAR(gray.at(0, 0, 2), 0.0, 1e-3);
}

TEST(Lab, InverseOfWhiteAndBlack) {
  LabImage lab(1, 1);
  lab.at(0, 0, 0) = 100.0;
  const Image white = lab_to_rgb(lab);
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(white.at(0, 0, c), 1.0, 1e-4);
  }
  lab.at(0, 0, 0) = 0.0;
  const Image black = lab_to_rgb(lab);
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(black.at(0, 0, c), 0.0, 1e-12);
  }
}

TEST(Lab, OutOfGamutClamps) {
  LabImage lab(1, 1);
  lab.at(0, 0, 0) = 50.0;
  lab.at(0, 0, 1) = 120.0;
  lab.at(0, 0, 2) = -120.0;
  const Image rgb = lab_to_rgb(lab);
  for (double s : rgb.samples()) {
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(Lab, RejectsSingleChannel) { EXPECT_THROW(rgb_to_lab(Image(2, 2, 1)), ContractError); }

TEST(LabProperty, RoundTripOn8BitImages) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Image img = testutil::random_image_8bit(rng, 16, 16);
    const Image back = lab_to_rgb(rgb_to_lab(img));
    EXPECT_LT(testutil::max_abs_diff(img, back), 1e-4) << "trial " << trial;
  }
}

TEST(LabProperty, NeutralGraysHaveNoChroma) {
  for (int v = 0; v <= 255; ++v) {
    const LabImage lab = rgb_to_lab(solid(v / 255.0, v / 255.0, v / 255.0, 1, 1));
    EXPECT_LT(std::abs(lab.at(0, 0, 1)), 1e-3) << v;
    EXPECT_LT(std::abs(lab.at(0, 0, 2)), 1e-3) << v;
  }
}
