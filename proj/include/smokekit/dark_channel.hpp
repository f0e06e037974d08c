#ifndef SMOKEKIT_DARK_CHANNEL_HPP
#define SMOKEKIT_DARK_CHANNEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <numeric>
#include <span>
#include <vector>

#include "smokekit/image.hpp"

namespace smokekit {

struct DcpParams {
  int patch_size = 15;
  double omega = 0.95;
  double airlight_percentile = 0.001;

  void validate() const {
    detail::require(patch_size >= 1 && patch_size % 2 == 1, "DcpParams: patch_size must be odd and >= 1");
    detail::require(omega > 0.0 && omega <= 1.0, "DcpParams: omega must lie in (0, 1]");
    detail::require(airlight_percentile > 0.0 && airlight_percentile <= 1.0,
                    "DcpParams: airlight_percentile must lie in (0, 1]");
  }
};

namespace detail {

// Sliding-window minimum over a strided line; the window is truncated at the
// ends. Monotonic deque, amortized O(1) per sample.
template <typename T>
void sliding_min_line(const T *in, T *out, int n, std::ptrdiff_t stride, int radius) {
  std::deque<int> window;
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int hi = std::min(n - 1, i + radius);
    for (; next <= hi; ++next) {
      const T v = in[next * stride];
      while (!window.empty() && in[window.back() * stride] >= v) {
        window.pop_back();
      }
      window.push_back(next);
    }
    while (window.front() < i - radius) {
      window.pop_front();
    }
    out[i * stride] = in[window.front() * stride];
  }
}

} // namespace detail

/// Truncated-window erosion of a single plane: two separable 1-D passes.
inline Image min_filter(const Image &plane, int radius) {
  detail::require(plane.channels() == 1, "min_filter: needs a single-channel image");
  detail::require(radius >= 0, "min_filter: negative radius");
  const int w = plane.width(), h = plane.height();
  Image rows(w, h, 1), out(w, h, 1);
  const double *src = plane.samples().data();
  double *tmp = rows.samples().data();
  double *dst = out.samples().data();
  for (int y = 0; y < h; ++y) {
    detail::sliding_min_line(src + static_cast<std::ptrdiff_t>(y) * w, tmp + static_cast<std::ptrdiff_t>(y) * w, w, 1,
                             radius);
  }
  for (int x = 0; x < w; ++x) {
    detail::sliding_min_line(tmp + x, dst + x, h, w, radius);
  }
  return out;
}

/// Per-pixel minimum over channels.
inline Image channel_min(const Image &img) {
  Image out(img.width(), img.height(), 1);
  auto dst = out.plane(0);
  std::copy(img.plane(0).begin(), img.plane(0).end(), dst.begin());
  for (int c = 1; c < img.channels(); ++c) {
    auto src = img.plane(c);
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = std::min(dst[i], src[i]);
    }
  }
  return out;
}

/// Minimum over channels and over the patch_size x patch_size window
/// centered at each pixel; windows are truncated at the image border.
inline Image dark_channel(const Image &img, int patch_size) {
  detail::require(img.channels() == 3, "dark_channel: needs a 3-channel image");
  detail::require(patch_size >= 1 && patch_size % 2 == 1, "dark_channel: patch_size must be odd and >= 1");
  return min_filter(channel_min(img), patch_size / 2);
}

/// Picks the brightest (max R+G+B) pixel among the top `percentile`
/// fraction of pixels ranked by dark-channel value.
///
/// The selection holds ceil(N * percentile) pixels (at least one). Ranking
/// ties and brightness ties both resolve to the lowest row-major index.
/// Every component is floored at 0.01.
inline Airlight estimate_airlight(const Image &img, const Image &dark, double percentile) {
  detail::require(img.channels() == 3, "estimate_airlight: needs a 3-channel image");
  detail::require(dark.channels() == 1 && dark.same_extent(img), "estimate_airlight: dark channel size mismatch");
  detail::require(percentile > 0.0 && percentile <= 1.0, "estimate_airlight: percentile must lie in (0, 1]");
  const std::size_t n = img.pixel_count();
  if (n == 0) {
    throw ContractError("estimate_airlight: empty image, nothing to select");
  }
  const auto count = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(static_cast<double>(n) * percentile)), 1, n);

  auto dk = dark.plane(0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto brighter_dark = [&](std::size_t i, std::size_t j) {
    return dk[i] > dk[j] || (dk[i] == dk[j] && i < j);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(), brighter_dark);

  auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  std::size_t best = order[0];
  double best_sum = r[best] + g[best] + b[best];
  for (std::size_t k = 1; k < count; ++k) {
    const std::size_t i = order[k];
    const double s = r[i] + g[i] + b[i];
    if (s > best_sum || (s == best_sum && i < best)) {
      best = i;
      best_sum = s;
    }
  }
  return Airlight(std::max(r[best], 0.01), std::max(g[best], 0.01), std::max(b[best], 0.01));
}

inline constexpr double kTransmissionFloor = 1e-4;

/// Initial transmission: 1 - omega * (windowed min over channels of img/A),
/// clamped to [1e-4, 1].
inline TransmissionMap estimate_transmission(const Image &img, const Airlight &a, const DcpParams &params) {
  params.validate();
  detail::require(img.channels() == 3, "estimate_transmission: needs a 3-channel image");
  Image normalized(img.width(), img.height(), 3);
  for (int c = 0; c < 3; ++c) {
    auto src = img.plane(c);
    auto dst = normalized.plane(c);
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = src[i] / a[c];
    }
  }
  Image t = dark_channel(normalized, params.patch_size);
  for (double &v : t.samples()) {
    v = std::clamp(1.0 - params.omega * v, kTransmissionFloor, 1.0);
  }
  return TransmissionMap(std::move(t));
}

} // namespace smokekit

#endif // SMOKEKIT_DARK_CHANNEL_HPP
