#ifndef SMOKEKIT_DEHAZE_HPP
#define SMOKEKIT_DEHAZE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "smokekit/dark_channel.hpp"
#include "smokekit/guided_filter.hpp"
#include "smokekit/image.hpp"

namespace smokekit {

struct DehazeParams {
  DcpParams dcp;
  GuidedFilterParams gf;
  double t_min = 0.1;
  double gamma = 0.5;
  std::optional<Airlight> airlight_override;

  void validate() const {
    dcp.validate();
    gf.validate();
    detail::require(t_min > 0.0 && t_min <= 1.0, "DehazeParams: t_min must lie in (0, 1]");
    detail::require(gamma > 0.0 && std::isfinite(gamma), "DehazeParams: gamma must be > 0");
  }
};

struct DehazeReport {
  Airlight airlight;
  bool airlight_overridden = false;
  double t_min_value = 0.0;  ///< smallest refined transmission
  double t_mean_value = 0.0;
  double t_max_value = 0.0;
  double fraction_t_clamped = 0.0;      ///< pixels whose refined t fell below t_min
  double fraction_output_clamped = 0.0; ///< samples pushed back into [0, 1] after recovery
};

namespace detail {

struct RecoverResult {
  Image image;
  std::size_t clamped_samples = 0;
};

inline RecoverResult recover_counting(const Image &obs, const TransmissionMap &t, const Airlight &a, double t_min) {
  require(t_min > 0.0, "recover: t_min must be > 0");
  require(obs.channels() == 3, "recover: observation needs 3 channels");
  require(obs.width() == t.width() && obs.height() == t.height(), "recover: transmission size differs from image");
  RecoverResult res{Image(obs.width(), obs.height(), 3)};
  auto ts = t.samples();
  for (int c = 0; c < 3; ++c) {
    auto src = obs.plane(c);
    auto dst = res.image.plane(c);
    const double ac = a[c];
    for (std::size_t i = 0; i < dst.size(); ++i) {
      const double v = (src[i] - ac) / std::max(ts[i], t_min) + ac;
      const double clamped = std::clamp(v, 0.0, 1.0);
      res.clamped_samples += clamped != v ? 1 : 0;
      dst[i] = clamped;
    }
  }
  return res;
}

} // namespace detail

/// Scene radiance recovery (obs - A) / max(t, t_min) + A, clamped to [0, 1].
inline Image recover(const Image &obs, const TransmissionMap &t, const Airlight &a, double t_min) {
  return detail::recover_counting(obs, t, a, t_min).image;
}

/// Per-sample power law. Samples must already be non-negative.
inline Image gamma_enhance(Image img, double gamma) {
  detail::require(gamma > 0.0, "gamma_enhance: gamma must be > 0");
  for (double &s : img.samples()) {
    if (!(s >= 0.0)) {
      throw ContractError("gamma_enhance: negative or NaN sample; clamp first");
    }
    s = std::pow(s, gamma);
  }
  return img;
}

/// Output of dehaze_image. `pre_gamma` is the clamped recovery before the
/// power law; `image` is the final pseudo-clean target.
struct DehazeResult {
  Image image;
  Image pre_gamma;
  TransmissionMap transmission;
  DehazeReport report;
};

/// Dark channel -> airlight (unless overridden) -> coarse transmission ->
/// guided refinement -> recovery -> gamma.
inline DehazeResult dehaze_image(const Image &obs, const DehazeParams &params) {
  params.validate();
  detail::require(obs.channels() == 3, "dehaze_image: observation needs 3 channels");
  detail::require(!obs.empty(), "dehaze_image: empty image");

  DehazeReport report;
  if (params.airlight_override) {
    report.airlight = *params.airlight_override;
    report.airlight_overridden = true;
  } else {
    const Image dark = dark_channel(obs, params.dcp.patch_size);
    report.airlight = estimate_airlight(obs, dark, params.dcp.airlight_percentile);
  }

  const TransmissionMap coarse = estimate_transmission(obs, report.airlight, params.dcp);
  TransmissionMap refined = refine_transmission(obs, coarse, params.gf);

  auto ts = refined.samples();
  const auto [lo, hi] = std::minmax_element(ts.begin(), ts.end());
  report.t_min_value = *lo;
  report.t_max_value = *hi;
  double sum = 0.0;
  std::size_t below = 0;
  for (double v : ts) {
    sum += v;
    below += v < params.t_min ? 1 : 0;
  }
  report.t_mean_value = sum / static_cast<double>(ts.size());
  report.fraction_t_clamped = static_cast<double>(below) / static_cast<double>(ts.size());

  auto recovered = detail::recover_counting(obs, refined, report.airlight, params.t_min);
  report.fraction_output_clamped =
      static_cast<double>(recovered.clamped_samples) / static_cast<double>(recovered.image.size());

  Image enhanced = gamma_enhance(recovered.image, params.gamma);
  return {std::move(enhanced), std::move(recovered.image), std::move(refined), report};
}

} // namespace smokekit

#endif // SMOKEKIT_DEHAZE_HPP
