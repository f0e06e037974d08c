#ifndef SMOKEKIT_HARMONIZE_HPP
#define SMOKEKIT_HARMONIZE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "smokekit/color.hpp"
#include "smokekit/image.hpp"

namespace smokekit {

enum class ChromaSubsampling { s444, s422, s420 };

struct HarmonizeParams {
  double floor_epsilon = 1e-6;
  double blur_sigma = 0.35;
  int jpeg_quality = 95;
  ChromaSubsampling chroma_subsampling = ChromaSubsampling::s420;

  void validate() const {
    detail::require(floor_epsilon > 0.0, "HarmonizeParams: floor_epsilon must be > 0");
    detail::require(blur_sigma >= 0.0 && std::isfinite(blur_sigma), "HarmonizeParams: blur_sigma must be >= 0");
    detail::require(jpeg_quality >= 1 && jpeg_quality <= 100, "HarmonizeParams: jpeg_quality must lie in [1, 100]");
  }
};

struct ChannelStats {
  double mean = 0.0;
  double stddev = 0.0;
};

using LabStats = std::array<ChannelStats, 3>;

/// Per-pixel exp(mean(log(max(I_k, eps)))).
///
/// The K log values of each sample are sorted before summation, so the
/// result is bit-identical under any reordering of `renders`. The output is
/// clamped to the range of the floored inputs, which it occupies
/// mathematically anyway.
inline Image geometric_mean_reference(std::span<const Image> renders, double floor_epsilon) {
  detail::require(!renders.empty(), "geometric_mean_reference: no renders");
  detail::require(floor_epsilon > 0.0, "geometric_mean_reference: epsilon must be > 0");
  const Image &first = renders.front();
  for (const Image &r : renders) {
    detail::require(r.same_shape(first), "geometric_mean_reference: render shapes differ");
  }
  const std::size_t k = renders.size();
  Image out(first.width(), first.height(), first.channels());
  std::vector<double> logs(k);
  auto dst = out.samples();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double v = std::max(renders[j].samples()[i], floor_epsilon);
      lo = j == 0 ? v : std::min(lo, v);
      hi = j == 0 ? v : std::max(hi, v);
      logs[j] = std::log(v);
    }
    std::sort(logs.begin(), logs.end());
    double sum = 0.0;
    for (double l : logs) {
      sum += l;
    }
    dst[i] = std::clamp(std::exp(sum / static_cast<double>(k)), lo, hi);
  }
  return out;
}

inline Image geometric_mean_reference(const std::vector<Image> &renders, double floor_epsilon) {
  return geometric_mean_reference(std::span<const Image>(renders), floor_epsilon);
}

inline ChannelStats channel_stats(std::span<const double> values) {
  detail::require(!values.empty(), "channel_stats: empty channel");
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) {
    sq += (v - mean) * (v - mean);
  }
  return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

/// Population mean and standard deviation of L, a and b.
inline LabStats lab_stats(const LabImage &img) {
  return {channel_stats(img.plane(0)), channel_stats(img.plane(1)), channel_stats(img.plane(2))};
}

inline constexpr double kDegenerateStddev = 1e-8;

/// Reinhard transfer on LAB planes, without gamut handling:
/// z' = (sd_ref / sd_src) * (z - mean_src) + mean_ref, with the scale forced
/// to 1 when sd_src < 1e-8.
inline LabImage reinhard_transfer_lab(const LabImage &src, const LabImage &ref) {
  const LabStats s = lab_stats(src);
  const LabStats r = lab_stats(ref);
  LabImage out(src.width(), src.height());
  for (int c = 0; c < 3; ++c) {
    const auto &sc = s[static_cast<std::size_t>(c)];
    const auto &rc = r[static_cast<std::size_t>(c)];
    const double scale = sc.stddev < kDegenerateStddev ? 1.0 : rc.stddev / sc.stddev;
    auto in = src.plane(c);
    auto dst = out.plane(c);
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = scale * (in[i] - sc.mean) + rc.mean;
    }
  }
  return out;
}

/// Matches the LAB mean and standard deviation of `src` to those of `ref`.
/// The two images may differ in size. Result is gamut-clamped RGB.
inline Image reinhard_transfer(const Image &src, const Image &ref) {
  detail::require(src.channels() == 3 && ref.channels() == 3, "reinhard_transfer: needs 3-channel images");
  detail::require(!src.empty() && !ref.empty(), "reinhard_transfer: empty image");
  return lab_to_rgb(reinhard_transfer_lab(rgb_to_lab(src), rgb_to_lab(ref)));
}

/// Normalized 1-D Gaussian taps, radius max(1, ceil(3 sigma)).
inline std::vector<double> gaussian_kernel(double sigma) {
  detail::require(sigma > 0.0, "gaussian_kernel: sigma must be > 0");
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (double &v : k) {
    v /= sum;
  }
  return k;
}

/// Separable Gaussian blur with edge replication. sigma == 0 returns the
/// input unchanged.
inline Image gaussian_blur(const Image &img, double sigma) {
  detail::require(sigma >= 0.0 && std::isfinite(sigma), "gaussian_blur: sigma must be >= 0");
  if (sigma == 0.0) {
    return img;
  }
  const auto k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int w = img.width(), h = img.height();
  Image tmp(w, h, img.channels()), out(w, h, img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          acc += k[static_cast<std::size_t>(i + radius)] * img.at(std::clamp(x + i, 0, w - 1), y, c);
        }
        tmp.at(x, y, c) = acc;
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          acc += k[static_cast<std::size_t>(i + radius)] * tmp.at(x, std::clamp(y + i, 0, h - 1), c);
        }
        out.at(x, y, c) = acc;
      }
    }
  }
  return out;
}

/// Geometric-mean reference over {src} + donors, LAB Reinhard transfer of
/// src onto it, then light Gaussian smoothing. Output clamped to [0, 1].
inline Image harmonize_pipeline(const Image &src, std::span<const Image> donors, const HarmonizeParams &params) {
  params.validate();
  detail::require(src.channels() == 3, "harmonize_pipeline: source needs 3 channels");
  detail::require(!donors.empty(), "harmonize_pipeline: at least one donor required");
  std::vector<Image> stack;
  stack.reserve(donors.size() + 1);
  stack.push_back(src);
  for (const Image &d : donors) {
    detail::require(d.same_shape(src), "harmonize_pipeline: donor shape differs from source");
    stack.push_back(d);
  }
  const Image reference = geometric_mean_reference(stack, params.floor_epsilon);
  return clamp01(gaussian_blur(reinhard_transfer(src, reference), params.blur_sigma));
}

inline Image harmonize_pipeline(const Image &src, const std::vector<Image> &donors, const HarmonizeParams &params) {
  return harmonize_pipeline(src, std::span<const Image>(donors), params);
}

} // namespace smokekit

#endif // SMOKEKIT_HARMONIZE_HPP
