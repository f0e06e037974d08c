#ifndef SMOKEKIT_GUIDED_FILTER_HPP
#define SMOKEKIT_GUIDED_FILTER_HPP

#include <algorithm>
#include <vector>

#include "smokekit/color.hpp"
#include "smokekit/dark_channel.hpp"
#include "smokekit/image.hpp"

namespace smokekit {

/// radius 0 degenerates to the identity (single-pixel windows give a = 0,
/// b = input), which the dehaze pipeline uses to skip refinement.
struct GuidedFilterParams {
  int radius = 61;
  double epsilon = 1e-3;

  void validate() const {
    detail::require(radius >= 0, "GuidedFilterParams: radius must be >= 0");
    detail::require(epsilon > 0.0, "GuidedFilterParams: epsilon must be > 0");
  }
};

/// Windowed mean over the (2r+1)^2 box clipped to the image, normalized by
/// the number of pixels actually inside. Summed-area table in double.
inline Image box_filter(const Image &plane, int radius) {
  detail::require(plane.channels() == 1, "box_filter: needs a single-channel image");
  detail::require(radius >= 0, "box_filter: negative radius");
  if (radius == 0) {
    return plane;
  }
  const int w = plane.width(), h = plane.height();
  const std::size_t stride = static_cast<std::size_t>(w) + 1;
  std::vector<double> sat(stride * (static_cast<std::size_t>(h) + 1), 0.0);
  for (int y = 0; y < h; ++y) {
    double row = 0.0;
    for (int x = 0; x < w; ++x) {
      row += plane.at(x, y);
      sat[(y + 1) * stride + x + 1] = sat[y * stride + x + 1] + row;
    }
  }
  Image out(w, h, 1);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - radius), y1 = std::min(h - 1, y + radius) + 1;
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - radius), x1 = std::min(w - 1, x + radius) + 1;
      const double sum = sat[y1 * stride + x1] - sat[y0 * stride + x1] - sat[y1 * stride + x0] + sat[y0 * stride + x0];
      out.at(x, y) = sum / static_cast<double>((y1 - y0) * (x1 - x0));
    }
  }
  return out;
}

/// Gray-guide guided filter: q = mean(a) * I + mean(b) with
/// a = cov(I, p) / (var(I) + eps) and b = mean(p) - a * mean(I).
inline Image guided_filter(const Image &guide, const Image &input, const GuidedFilterParams &params) {
  params.validate();
  detail::require(guide.channels() == 1 && input.channels() == 1, "guided_filter: needs single-channel planes");
  detail::require(guide.same_extent(input), "guided_filter: guide and input sizes differ");
  if (params.radius == 0) {
    return input;
  }
  const int r = params.radius;
  const std::size_t n = guide.pixel_count();
  auto gi = guide.plane(0), pi = input.plane(0);

  Image gp(guide.width(), guide.height(), 1), gg(guide.width(), guide.height(), 1);
  for (std::size_t i = 0; i < n; ++i) {
    gp.samples()[i] = gi[i] * pi[i];
    gg.samples()[i] = gi[i] * gi[i];
  }
  const Image mean_g = box_filter(guide, r);
  const Image mean_p = box_filter(input, r);
  const Image mean_gp = box_filter(gp, r);
  const Image mean_gg = box_filter(gg, r);

  Image a(guide.width(), guide.height(), 1), b(guide.width(), guide.height(), 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double mg = mean_g.samples()[i];
    const double mp = mean_p.samples()[i];
    const double cov = mean_gp.samples()[i] - mg * mp;
    const double var = mean_gg.samples()[i] - mg * mg;
    const double ai = cov / (var + params.epsilon);
    a.samples()[i] = ai;
    b.samples()[i] = mp - ai * mg;
  }
  const Image mean_a = box_filter(a, r);
  const Image mean_b = box_filter(b, r);

  Image q(guide.width(), guide.height(), 1);
  for (std::size_t i = 0; i < n; ++i) {
    q.samples()[i] = mean_a.samples()[i] * gi[i] + mean_b.samples()[i];
  }
  return q;
}

/// Refines a coarse transmission estimate using the linear-light luminance
/// of the observation as guide; output clamped to [1e-4, 1].
inline TransmissionMap refine_transmission(const Image &guide_rgb, const TransmissionMap &t_hat,
                                           const GuidedFilterParams &params) {
  detail::require(guide_rgb.channels() == 3, "refine_transmission: guide needs 3 channels");
  detail::require(guide_rgb.width() == t_hat.width() && guide_rgb.height() == t_hat.height(),
                  "refine_transmission: guide and transmission sizes differ");
  Image q = guided_filter(linear_luminance(guide_rgb), t_hat.image(), params);
  for (double &v : q.samples()) {
    v = std::clamp(v, kTransmissionFloor, 1.0);
  }
  return TransmissionMap(std::move(q));
}

} // namespace smokekit

#endif // SMOKEKIT_GUIDED_FILTER_HPP
