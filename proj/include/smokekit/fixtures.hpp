#ifndef SMOKEKIT_FIXTURES_HPP
#define SMOKEKIT_FIXTURES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <random>
#include <string>

#include "smokekit/image.hpp"
#include "smokekit/metrics.hpp"

namespace smokekit::fixtures {

/// `natural` is a smooth, band-limited color field for encoder checks. It
/// carries no dark-pixel lattice.
enum class SceneKind { gradient, checker, textured_noise, natural };

struct FixtureSpec {
  std::uint64_t seed = 0;
  int width = 64;
  int height = 64;
  SceneKind kind = SceneKind::textured_noise;
  int checker_period = 2;
};

/// Pixels at (7i, 7j) carry a near-zero channel, so every window of at least
/// 8x8 (a 15x15 window truncated at a corner) holds a dark pixel.
inline constexpr int kDarkDotSpacing = 7;

/// Portable uniform doubles in [0, 1) from a 64-bit Mersenne twister.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int index(int n) { return static_cast<int>(uniform() * n); }

private:
  std::mt19937_64 engine_;
};

/// Deterministic clean scene. Gradient and textured-noise scenes embed the
/// dark-dot lattice; the checker is pure 0/1 blocks and satisfies the
/// dark-pixel property on its own for periods up to 7.
inline Image make_clean_scene(const FixtureSpec &spec) {
  detail::require(spec.width > 0 && spec.height > 0, "make_clean_scene: empty extent");
  detail::require(spec.checker_period >= 1, "make_clean_scene: checker period must be >= 1");
  Image img(spec.width, spec.height, 3);
  Rng rng(spec.seed);
  const int w = spec.width, h = spec.height;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      switch (spec.kind) {
      case SceneKind::checker: {
        const double v = ((x / spec.checker_period + y / spec.checker_period) % 2) == 0 ? 0.0 : 1.0;
        for (int c = 0; c < 3; ++c) {
          img.at(x, y, c) = v;
        }
        break;
      }
      case SceneKind::gradient: {
        const double u = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
        const double v = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
        img.at(x, y, 0) = 0.15 + 0.8 * u;
        img.at(x, y, 1) = 0.15 + 0.8 * v;
        img.at(x, y, 2) = 0.15 + 0.4 * (u + v);
        break;
      }
      case SceneKind::textured_noise:
      case SceneKind::natural:
        break;
      }
    }
  }
  if (spec.kind == SceneKind::textured_noise) {
    // Per-fixture tint plus per-pixel grain.
    const std::array<double, 3> tint{rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)};
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 3; ++c) {
          img.at(x, y, c) = std::clamp(tint[static_cast<std::size_t>(c)] + rng.uniform(-0.25, 0.25), 0.0, 1.0);
        }
      }
    }
  }
  if (spec.kind == SceneKind::natural) {
    // Four low-frequency plane waves per channel around a mid-tone base.
    std::array<std::array<double, 4>, 12> waves{};
    for (auto &wv : waves) {
      wv = {rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0), rng.uniform(0.0, 6.283185307179586), rng.uniform(0.03, 0.1)};
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double u = static_cast<double>(x) / w, v = static_cast<double>(y) / h;
        for (int c = 0; c < 3; ++c) {
          double s = 0.5;
          for (int k = 0; k < 4; ++k) {
            const auto &wv = waves[static_cast<std::size_t>(c * 4 + k)];
            s += wv[3] * std::sin(6.283185307179586 * (wv[0] * u + wv[1] * v) + wv[2]);
          }
          img.at(x, y, c) = std::clamp(s, 0.0, 1.0);
        }
      }
    }
    return img;
  }
  if (spec.kind != SceneKind::checker) {
    for (int y = 0; y < h; y += kDarkDotSpacing) {
      for (int x = 0; x < w; x += kDarkDotSpacing) {
        img.at(x, y, rng.index(3)) = rng.uniform(0.0, 0.04);
      }
    }
  }
  return img;
}

struct DonorVariant {
  Image image;
  double clamped_fraction = 0.0; ///< samples that left [0, 1] before clamping
};

/// Color-cast simulant: clamp01(src * gains + offset) per channel.
inline DonorVariant make_donor_variant(const Image &src, const std::array<double, 3> &gains,
                                       const std::array<double, 3> &offset) {
  detail::require(src.channels() == 3, "make_donor_variant: needs 3 channels");
  for (double g : gains) {
    detail::require(g > 0.0, "make_donor_variant: gains must be > 0");
  }
  DonorVariant out{Image(src.width(), src.height(), 3)};
  std::size_t clamped = 0;
  for (int c = 0; c < 3; ++c) {
    auto in = src.plane(c);
    auto dst = out.image.plane(c);
    const auto k = static_cast<std::size_t>(c);
    for (std::size_t i = 0; i < dst.size(); ++i) {
      const double v = in[i] * gains[k] + offset[k];
      const double cv = std::clamp(v, 0.0, 1.0);
      clamped += cv != v ? 1 : 0;
      dst[i] = cv;
    }
  }
  out.clamped_fraction = src.empty() ? 0.0 : static_cast<double>(clamped) / static_cast<double>(src.size());
  return out;
}

/// Eval record shaped like a released per-scene file, including pass-through
/// fields the parser must preserve.
inline SceneEval make_eval_fixture(const std::string &scene, int views, std::uint64_t seed) {
  detail::require(views > 0, "make_eval_fixture: needs at least one view");
  Rng rng(seed);
  SceneEval e;
  e.scene = scene;
  for (int i = 0; i < views; ++i) {
    ViewScore v;
    char id[16];
    std::snprintf(id, sizeof id, "%05d", i);
    v.view_id = id;
    v.psnr = rng.uniform(7.0, 16.0);
    v.ssim = rng.uniform(0.25, 0.7);
    v.lpips = rng.uniform(0.5, 0.8);
    v.extra["resolution"] = {1008, 756};
    e.views.push_back(std::move(v));
  }
  e.extra["split"] = "test";
  e.extra["method"] = "fixture";
  return e;
}

} // namespace smokekit::fixtures

#endif // SMOKEKIT_FIXTURES_HPP
