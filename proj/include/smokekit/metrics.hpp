#ifndef SMOKEKIT_METRICS_HPP
#define SMOKEKIT_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "smokekit/color.hpp"
#include "smokekit/image.hpp"

namespace smokekit {

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// 10 log10(peak^2 / MSE) over every sample. Identical images give +inf.
inline double psnr(const Image &a, const Image &b, double peak = 1.0) {
  detail::require(a.same_shape(b), "psnr: images differ in size or channel count");
  detail::require(!a.empty(), "psnr: empty images");
  double acc = 0.0;
  auto sa = a.samples(), sb = b.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const double d = sa[i] - sb[i];
    acc += d * d;
  }
  if (acc == 0.0) {
    return kInfinitePsnr;
  }
  const double mse = acc / static_cast<double>(sa.size());
  return 10.0 * std::log10(peak * peak / mse);
}

/// How multi-channel images are reduced to one SSIM score.
enum class SsimChannelPolicy {
  per_channel_mean, ///< score R, G, B separately and average
  luminance,        ///< score the linear-light luminance plane only
};

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
  SsimChannelPolicy policy = SsimChannelPolicy::per_channel_mean;
};

namespace detail {

// Valid-region separable filtering: output is (w - n + 1) x (h - n + 1).
inline std::vector<double> filter_valid(std::span<const double> in, int w, int h, const std::vector<double> &k) {
  const int n = static_cast<int>(k.size());
  const int ow = w - n + 1, oh = h - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += k[static_cast<std::size_t>(i)] * in[static_cast<std::size_t>(y) * w + x + i];
      }
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += k[static_cast<std::size_t>(i)] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      }
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

inline double ssim_plane(std::span<const double> a, std::span<const double> b, int w, int h, const SsimParams &p) {
  std::vector<double> k(static_cast<std::size_t>(p.window));
  const int half = p.window / 2;
  double ksum = 0.0;
  for (int i = 0; i < p.window; ++i) {
    const double d = i - half;
    k[static_cast<std::size_t>(i)] = std::exp(-0.5 * d * d / (p.sigma * p.sigma));
    ksum += k[static_cast<std::size_t>(i)];
  }
  for (double &v : k) {
    v /= ksum;
  }
  const std::size_t n = a.size();
  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = filter_valid(a, w, h, k);
  const auto mu_b = filter_valid(b, w, h, k);
  const auto e_aa = filter_valid(aa, w, h, k);
  const auto e_bb = filter_valid(bb, w, h, k);
  const auto e_ab = filter_valid(ab, w, h, k);
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i], mb = mu_b[i];
    const double va = e_aa[i] - ma * ma;
    const double vb = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return total / static_cast<double>(mu_a.size());
}

} // namespace detail

/// Mean local SSIM with a Gaussian window over the valid (unpadded) region.
/// Images smaller than the window are rejected.
inline double ssim(const Image &a, const Image &b, const SsimParams &params = {}) {
  detail::require(a.same_shape(b), "ssim: images differ in size or channel count");
  detail::require(params.window >= 1 && params.window % 2 == 1, "ssim: window must be odd");
  if (a.width() < params.window || a.height() < params.window) {
    throw ContractError("ssim: image smaller than the " + std::to_string(params.window) + "x" +
                        std::to_string(params.window) + " window");
  }
  if (params.policy == SsimChannelPolicy::luminance && a.channels() == 3) {
    const Image la = linear_luminance(a), lb = linear_luminance(b);
    return detail::ssim_plane(la.plane(0), lb.plane(0), a.width(), a.height(), params);
  }
  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    total += detail::ssim_plane(a.plane(c), b.plane(c), a.width(), a.height(), params);
  }
  return total / a.channels();
}

struct ViewScore {
  std::string view_id;
  double psnr = 0.0; ///< +inf for identical images
  double ssim = 0.0;
  std::optional<double> lpips; ///< ingested only, never computed
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  friend bool operator==(const ViewScore &, const ViewScore &) = default;
};

struct MetricAverages {
  double psnr = 0.0;
  double ssim = 0.0;
  std::optional<double> lpips;
};

struct SceneEval {
  std::string scene;
  std::vector<ViewScore> views;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  /// Arithmetic means over views; LPIPS only when every view carries it.
  [[nodiscard]] MetricAverages averages() const {
    detail::require(!views.empty(), "SceneEval: no views");
    MetricAverages m;
    double lp = 0.0;
    bool all_lpips = true;
    for (const auto &v : views) {
      m.psnr += v.psnr;
      m.ssim += v.ssim;
      if (v.lpips) {
        lp += *v.lpips;
      } else {
        all_lpips = false;
      }
    }
    const auto n = static_cast<double>(views.size());
    m.psnr /= n;
    m.ssim /= n;
    if (all_lpips) {
      m.lpips = lp / n;
    }
    return m;
  }

  friend bool operator==(const SceneEval &, const SceneEval &) = default;
};

struct SceneSummary {
  std::string scene;
  std::size_t view_count = 0;
  MetricAverages metrics;
};

struct BenchmarkSummary {
  std::string method;
  std::vector<SceneSummary> scenes;
  MetricAverages overall;
};

/// Which scenes enter an aggregate. An empty include list means all.
struct SceneSelection {
  std::vector<std::string> include;
  std::vector<std::string> exclude;

  [[nodiscard]] bool admits(const std::string &scene) const {
    if (!include.empty() && std::find(include.begin(), include.end(), scene) == include.end()) {
      return false;
    }
    return std::find(exclude.begin(), exclude.end(), scene) == exclude.end();
  }
};

/// Overall metrics are the unweighted mean of per-scene averages. Scenes
/// are reported sorted by name, and the overall sums run in that order so
/// the result does not depend on input order.
inline BenchmarkSummary aggregate(const std::vector<SceneEval> &evals, const std::string &method,
                                  const SceneSelection &selection = {}) {
  detail::require(!evals.empty(), "aggregate: no scenes");
  std::set<std::string> seen;
  for (const auto &e : evals) {
    if (!seen.insert(e.scene).second) {
      throw ContractError("aggregate: duplicate scene '" + e.scene + "'");
    }
  }
  BenchmarkSummary out;
  out.method = method;
  for (const auto &e : evals) {
    if (selection.admits(e.scene)) {
      out.scenes.push_back({e.scene, e.views.size(), e.averages()});
    }
  }
  if (out.scenes.empty()) {
    throw ContractError("aggregate: scene selection is empty");
  }
  std::sort(out.scenes.begin(), out.scenes.end(),
            [](const SceneSummary &a, const SceneSummary &b) { return a.scene < b.scene; });
  double lp = 0.0;
  bool all_lpips = true;
  for (const auto &s : out.scenes) {
    out.overall.psnr += s.metrics.psnr;
    out.overall.ssim += s.metrics.ssim;
    if (s.metrics.lpips) {
      lp += *s.metrics.lpips;
    } else {
      all_lpips = false;
    }
  }
  const auto n = static_cast<double>(out.scenes.size());
  out.overall.psnr /= n;
  out.overall.ssim /= n;
  if (all_lpips) {
    out.overall.lpips = lp / n;
  }
  return out;
}

namespace detail {

inline std::string fixed3(double v) {
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string pad_left(const std::string &s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

inline std::string pad_right(const std::string &s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

inline std::string table(const std::string &first_header, const std::vector<std::string> &names,
                         const std::vector<MetricAverages> &rows) {
  std::size_t name_w = first_header.size();
  for (const auto &n : names) {
    name_w = std::max(name_w, n.size());
  }
  std::string out = pad_right(first_header, name_w) + "  " + pad_left("PSNR", 8) + "  " + pad_left("SSIM", 7) +
                    "  " + pad_left("LPIPS", 7) + "\n";
  out += std::string(name_w + 2 + 8 + 2 + 7 + 2 + 7, '-') + "\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto &m = rows[i];
    out += pad_right(names[i], name_w) + "  " + pad_left(fixed3(m.psnr), 8) + "  " + pad_left(fixed3(m.ssim), 7) +
           "  " + pad_left(m.lpips ? fixed3(*m.lpips) : "-", 7) + "\n";
  }
  return out;
}

} // namespace detail

/// Method x PSNR/SSIM/LPIPS table, three decimals, "-" for absent LPIPS.
inline std::string format_method_table(const std::vector<BenchmarkSummary> &summaries) {
  std::vector<std::string> names;
  std::vector<MetricAverages> rows;
  for (const auto &s : summaries) {
    names.push_back(s.method);
    rows.push_back(s.overall);
  }
  return detail::table("Method", names, rows);
}

/// Per-scene rows of one summary followed by its overall row.
inline std::string format_scene_table(const BenchmarkSummary &summary) {
  std::vector<std::string> names;
  std::vector<MetricAverages> rows;
  for (const auto &s : summary.scenes) {
    names.push_back(s.scene);
    rows.push_back(s.metrics);
  }
  names.push_back("average");
  rows.push_back(summary.overall);
  return detail::table("Scene", names, rows);
}

/// Per-view rows of one scene followed by its average row.
inline std::string format_view_table(const SceneEval &eval) {
  std::vector<std::string> names;
  std::vector<MetricAverages> rows;
  for (const auto &v : eval.views) {
    names.push_back(v.view_id);
    rows.push_back({v.psnr, v.ssim, v.lpips});
  }
  names.push_back("average");
  rows.push_back(eval.averages());
  return detail::table("View", names, rows);
}

} // namespace smokekit

#endif // SMOKEKIT_METRICS_HPP
