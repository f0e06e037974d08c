#ifndef SMOKEKIT_COLOR_HPP
#define SMOKEKIT_COLOR_HPP

#include <cmath>

#include "smokekit/image.hpp"

namespace smokekit {

// CIE-LAB under D65 with sRGB companding. Channel 0 is L in [0, 100],
// channels 1 and 2 are a and b (roughly [-128, 127]).
class LabImage {
public:
  LabImage() = default;
  LabImage(int width, int height) : planes_(width, height, 3) {}
  explicit LabImage(Image planes) : planes_(std::move(planes)) {
    detail::require(planes_.channels() == 3, "LabImage: needs 3 planes");
  }

  [[nodiscard]] int width() const noexcept { return planes_.width(); }
  [[nodiscard]] int height() const noexcept { return planes_.height(); }
  double &at(int x, int y, int c) noexcept { return planes_.at(x, y, c); }
  [[nodiscard]] double at(int x, int y, int c) const noexcept { return planes_.at(x, y, c); }
  std::span<double> plane(int c) noexcept { return planes_.plane(c); }
  [[nodiscard]] std::span<const double> plane(int c) const noexcept { return planes_.plane(c); }
  [[nodiscard]] const Image &planes() const noexcept { return planes_; }

private:
  Image planes_;
};

namespace color {

inline constexpr double kWhiteX = 0.95047;
inline constexpr double kWhiteY = 1.0;
inline constexpr double kWhiteZ = 1.08883;
inline constexpr double kLabEpsilon = 216.0 / 24389.0;
inline constexpr double kLabKappa = 24389.0 / 27.0;

inline double srgb_to_linear(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

inline double linear_to_srgb(double v) {
  return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

inline double lab_f(double t) {
  return t > kLabEpsilon ? std::cbrt(t) : (kLabKappa * t + 16.0) / 116.0;
}

inline double lab_f_inv(double f) {
  const double f3 = f * f * f;
  return f3 > kLabEpsilon ? f3 : (116.0 * f - 16.0) / kLabKappa;
}

struct Lab {
  double l, a, b;
};

struct Rgb {
  double r, g, b;
};

inline Lab srgb_to_lab(Rgb in) {
  const double r = srgb_to_linear(in.r);
  const double g = srgb_to_linear(in.g);
  const double b = srgb_to_linear(in.b);
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  const double fx = lab_f(x / kWhiteX);
  const double fy = lab_f(y / kWhiteY);
  const double fz = lab_f(z / kWhiteZ);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

// Unclamped: out-of-gamut LAB values map to RGB outside [0, 1].
inline Rgb lab_to_srgb(Lab in) {
  const double fy = (in.l + 16.0) / 116.0;
  const double fx = fy + in.a / 500.0;
  const double fz = fy - in.b / 200.0;
  const double x = kWhiteX * lab_f_inv(fx);
  const double y = kWhiteY * lab_f_inv(fy);
  const double z = kWhiteZ * lab_f_inv(fz);
  // Exact inverse of the forward matrix above.
  const double r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
  const double g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
  const double b = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
  auto encode = [](double v) { return v < 0.0 ? -linear_to_srgb(-v) : linear_to_srgb(v); };
  return {encode(r), encode(g), encode(b)};
}

} // namespace color

inline LabImage rgb_to_lab(const Image &img) {
  detail::require(img.channels() == 3, "rgb_to_lab: needs a 3-channel image");
  LabImage out(img.width(), img.height());
  auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  auto l = out.plane(0), a = out.plane(1), bb = out.plane(2);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto lab = color::srgb_to_lab({r[i], g[i], b[i]});
    l[i] = lab.l;
    a[i] = lab.a;
    bb[i] = lab.b;
  }
  return out;
}

/// Inverse of rgb_to_lab; out-of-gamut results are clamped per channel.
inline Image lab_to_rgb(const LabImage &lab) {
  Image out(lab.width(), lab.height(), 3);
  auto l = lab.plane(0), a = lab.plane(1), b = lab.plane(2);
  auto r = out.plane(0), g = out.plane(1), bb = out.plane(2);
  for (std::size_t i = 0; i < l.size(); ++i) {
    const auto rgb = color::lab_to_srgb({l[i], a[i], b[i]});
    r[i] = std::clamp(rgb.r, 0.0, 1.0);
    g[i] = std::clamp(rgb.g, 0.0, 1.0);
    bb[i] = std::clamp(rgb.b, 0.0, 1.0);
  }
  return out;
}

/// Luminance of an sRGB image computed on linearized values.
inline Image linear_luminance(const Image &srgb) {
  detail::require(srgb.channels() == 3, "linear_luminance: needs 3 channels");
  Image lin(srgb.width(), srgb.height(), 3);
  auto src = srgb.samples();
  auto dst = lin.samples();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = color::srgb_to_linear(src[i]);
  }
  return weighted_luminance(lin);
}

} // namespace smokekit

#endif // SMOKEKIT_COLOR_HPP
