#ifndef SMOKEKIT_SCATTER_HPP
#define SMOKEKIT_SCATTER_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include "smokekit/image.hpp"

namespace smokekit {

/// Atmospheric scattering forward model: out = clean * t + A * (1 - t).
inline Image composite(const Image &clean, const TransmissionMap &t, const Airlight &a) {
  detail::require(clean.channels() == 3, "composite: clean image needs 3 channels");
  detail::require(clean.width() == t.width() && clean.height() == t.height(),
                  "composite: transmission size differs from image");
  Image out(clean.width(), clean.height(), 3);
  auto ts = t.samples();
  for (int c = 0; c < 3; ++c) {
    auto src = clean.plane(c);
    auto dst = out.plane(c);
    const double ac = a[c];
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = src[i] * ts[i] + ac * (1.0 - ts[i]);
    }
  }
  return out;
}

/// Algebraic inverse of composite with the transmission floored at t_min,
/// clamped to [0, 1].
inline Image invert_exact(const Image &obs, const TransmissionMap &t, const Airlight &a, double t_min) {
  detail::require(t_min > 0.0 && t_min <= 1.0, "invert_exact: t_min must lie in (0, 1]");
  detail::require(obs.channels() == 3, "invert_exact: observation needs 3 channels");
  detail::require(obs.width() == t.width() && obs.height() == t.height(),
                  "invert_exact: transmission size differs from image");
  Image out(obs.width(), obs.height(), 3);
  auto ts = t.samples();
  for (int c = 0; c < 3; ++c) {
    auto src = obs.plane(c);
    auto dst = out.plane(c);
    const double ac = a[c];
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = std::clamp((src[i] - ac) / std::max(ts[i], t_min) + ac, 0.0, 1.0);
    }
  }
  return out;
}

enum class FieldKind { constant, horizontal_ramp, radial };

/// Shape parameters for synth_field. `first` is the constant value, the
/// ramp's left value, or the radial center value; `second` is the ramp's
/// right value or the radial corner value.
struct FieldSpec {
  FieldKind kind = FieldKind::constant;
  double first = 1.0;
  double second = 1.0;
};

/// Parses "constant:V", "ramp:L:R" or "radial:C:E".
inline FieldSpec parse_field_spec(const std::string &text) {
  FieldSpec spec;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? std::string{} : text.substr(colon + 1);
  auto number = [&](const std::string &s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception &) {
      throw ContractError("field spec '" + text + "': bad number '" + s + "'");
    }
    if (used != s.size()) {
      throw ContractError("field spec '" + text + "': bad number '" + s + "'");
    }
    return v;
  };
  if (kind == "constant") {
    spec.kind = FieldKind::constant;
    spec.first = spec.second = number(rest);
  } else if (kind == "ramp" || kind == "radial") {
    const auto sep = rest.find(':');
    if (sep == std::string::npos) {
      throw ContractError("field spec '" + text + "': expected two values");
    }
    spec.kind = kind == "ramp" ? FieldKind::horizontal_ramp : FieldKind::radial;
    spec.first = number(rest.substr(0, sep));
    spec.second = number(rest.substr(sep + 1));
  } else {
    throw ContractError("field spec '" + text + "': unknown kind '" + kind + "'");
  }
  for (double v : {spec.first, spec.second}) {
    detail::require(v > 0.0 && v <= 1.0, "field spec '" + text + "': values must lie in (0, 1]");
  }
  return spec;
}

/// Deterministic transmission field. The ramp interpolates linearly from
/// the left column to the right column; the radial field interpolates on
/// distance from the image center normalized so the corners reach `second`.
inline TransmissionMap synth_field(int width, int height, const FieldSpec &spec) {
  detail::require(width > 0 && height > 0, "synth_field: empty extent");
  for (double v : {spec.first, spec.second}) {
    detail::require(v > 0.0 && v <= 1.0, "synth_field: values must lie in (0, 1]");
  }
  Image t(width, height, 1);
  const double cx = 0.5 * (width - 1);
  const double cy = 0.5 * (height - 1);
  const double rmax = std::hypot(cx, cy);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = spec.first;
      switch (spec.kind) {
      case FieldKind::constant:
        break;
      case FieldKind::horizontal_ramp: {
        const double u = width > 1 ? static_cast<double>(x) / (width - 1) : 0.0;
        v = spec.first + (spec.second - spec.first) * u;
        break;
      }
      case FieldKind::radial: {
        const double u = rmax > 0.0 ? std::hypot(x - cx, y - cy) / rmax : 0.0;
        v = spec.first + (spec.second - spec.first) * u;
        break;
      }
      }
      t.at(x, y) = v;
    }
  }
  return TransmissionMap(std::move(t));
}

} // namespace smokekit

#endif // SMOKEKIT_SCATTER_HPP
