#ifndef SMOKEKIT_IMAGE_HPP
#define SMOKEKIT_IMAGE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "smokekit/error.hpp"

namespace smokekit {

/// Floating-point raster with 1 or 3 channels.
///
/// Storage is channel-planar and row-major: sample (x, y, c) lives at
/// `c * width * height + y * width + x`. Samples are nominally in [0, 1];
/// operations that promise clamping say so.
class Image {
public:
  Image() = default;

  Image(int width, int height, int channels, double fill = 0.0)
      : width_(width), height_(height), channels_(channels) {
    detail::require(width >= 0 && height >= 0, "Image: negative dimensions");
    detail::require(channels == 1 || channels == 3, "Image: channels must be 1 or 3");
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] int channels() const noexcept { return channels_; }
  [[nodiscard]] std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  double &at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
  [[nodiscard]] double at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

  std::span<double> plane(int c) noexcept {
    return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
  }
  [[nodiscard]] std::span<const double> plane(int c) const noexcept {
    return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
  }

  std::span<double> samples() noexcept { return data_; }
  [[nodiscard]] std::span<const double> samples() const noexcept { return data_; }

  [[nodiscard]] bool same_shape(const Image &o) const noexcept {
    return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
  }
  [[nodiscard]] bool same_extent(const Image &o) const noexcept {
    return width_ == o.width_ && height_ == o.height_;
  }

  friend bool operator==(const Image &, const Image &) = default;

private:
  [[nodiscard]] std::size_t index(int x, int y, int c) const noexcept {
    return static_cast<std::size_t>(c) * pixel_count() + static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// Global airlight A; every component strictly positive.
class Airlight {
public:
  Airlight() = default;
  explicit Airlight(std::array<double, 3> a) : a_(a) {
    for (double v : a_) {
      detail::require(std::isfinite(v) && v > 0.0 && v <= 1.0,
                      "Airlight: components must lie in (0, 1]");
    }
  }
  Airlight(double r, double g, double b) : Airlight(std::array<double, 3>{r, g, b}) {}

  [[nodiscard]] double operator[](int c) const noexcept { return a_[static_cast<std::size_t>(c)]; }
  [[nodiscard]] const std::array<double, 3> &values() const noexcept { return a_; }

  friend bool operator==(const Airlight &, const Airlight &) = default;

private:
  std::array<double, 3> a_{1.0, 1.0, 1.0};
};

/// Per-pixel transmission t(x); every sample in (0, 1].
class TransmissionMap {
public:
  TransmissionMap() = default;
  TransmissionMap(int width, int height, double fill) : plane_(width, height, 1, fill) {
    detail::require(fill > 0.0 && fill <= 1.0, "TransmissionMap: value must lie in (0, 1]");
  }
  /// Adopts a single-channel image; throws if any sample leaves (0, 1].
  explicit TransmissionMap(Image plane) : plane_(std::move(plane)) {
    detail::require(plane_.channels() == 1, "TransmissionMap: needs a single-channel image");
    for (double v : plane_.samples()) {
      detail::require(v > 0.0 && v <= 1.0, "TransmissionMap: samples must lie in (0, 1]");
    }
  }

  [[nodiscard]] int width() const noexcept { return plane_.width(); }
  [[nodiscard]] int height() const noexcept { return plane_.height(); }
  [[nodiscard]] double at(int x, int y) const noexcept { return plane_.at(x, y); }
  [[nodiscard]] const Image &image() const noexcept { return plane_; }
  [[nodiscard]] std::span<const double> samples() const noexcept { return plane_.samples(); }

private:
  Image plane_;
};

/// Per-sample min(max(s, 0), 1). NaN samples are rejected rather than clamped.
inline Image clamp01(Image img) {
  for (double &s : img.samples()) {
    if (std::isnan(s)) {
      throw ContractError("clamp01: NaN sample");
    }
    s = std::clamp(s, 0.0, 1.0);
  }
  return img;
}

/// Rec. 709 luminance weights applied to whatever values the image holds.
inline Image weighted_luminance(const Image &rgb) {
  detail::require(rgb.channels() == 3, "weighted_luminance: needs 3 channels");
  Image out(rgb.width(), rgb.height(), 1);
  auto r = rgb.plane(0), g = rgb.plane(1), b = rgb.plane(2);
  auto y = out.plane(0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = 0.2126 * r[i] + 0.7152 * g[i] + 0.0722 * b[i];
  }
  return out;
}

inline double mean_abs_error(const Image &a, const Image &b) {
  detail::require(a.same_shape(b), "mean_abs_error: shape mismatch");
  if (a.empty()) {
    return 0.0;
  }
  double acc = 0.0;
  auto sa = a.samples(), sb = b.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) {
    acc += std::abs(sa[i] - sb[i]);
  }
  return acc / static_cast<double>(sa.size());
}

} // namespace smokekit

#endif // SMOKEKIT_IMAGE_HPP
