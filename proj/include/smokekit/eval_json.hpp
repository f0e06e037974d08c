#ifndef SMOKEKIT_EVAL_JSON_HPP
#define SMOKEKIT_EVAL_JSON_HPP

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "smokekit/error.hpp"
#include "smokekit/metrics.hpp"

namespace smokekit {

// Per-scene eval JSON:
//
//   {
//     "scene": "Koharu",
//     "views": [ {"view_id": "00000", "psnr": 15.1, "ssim": 0.64, "lpips": 0.55}, ... ],
//     "average": {"psnr": ..., "ssim": ..., "lpips": ...}
//   }
//
// "scene", "views" (non-empty), and per view "view_id", "psnr", "ssim" are
// required. "lpips" is optional. PSNR may be the string "inf". "average" is
// derived from the views: it is skipped on input and recomputed on output.
// Any other key, top-level or per view, is carried through unchanged.

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline const ordered_json &require_field(const ordered_json &obj, const char *key, const std::string &path) {
  if (!obj.is_object()) {
    throw SchemaError(path + ": expected an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(path + ": missing required field '" + key + "'");
  }
  return *it;
}

inline double metric_value(const ordered_json &v, const std::string &path, bool allow_inf) {
  if (v.is_number()) {
    return v.get<double>();
  }
  if (v.is_string()) {
    const auto &s = v.get_ref<const std::string &>();
    if (allow_inf && s == "inf") {
      return kInfinitePsnr;
    }
    throw ParseError(path + ": malformed number '" + s + "'");
  }
  throw ParseError(path + ": expected a number");
}

inline ordered_json metric_json(double v) {
  if (std::isinf(v) && v > 0) {
    return "inf";
  }
  if (!std::isfinite(v)) {
    throw ContractError("eval json: cannot serialize non-finite metric");
  }
  return v;
}

} // namespace detail

/// `origin` prefixes error paths (normally the file name).
inline SceneEval eval_from_json(const ordered_json &doc, const std::string &origin = "$") {
  SceneEval out;
  const auto &scene = detail::require_field(doc, "scene", origin);
  if (!scene.is_string()) {
    throw SchemaError(origin + ".scene: expected a string");
  }
  out.scene = scene.get<std::string>();
  const auto &views = detail::require_field(doc, "views", origin);
  if (!views.is_array()) {
    throw SchemaError(origin + ".views: expected an array");
  }
  if (views.empty()) {
    throw SchemaError(origin + ".views: empty views array");
  }
  for (std::size_t i = 0; i < views.size(); ++i) {
    const std::string path = origin + ".views[" + std::to_string(i) + "]";
    const auto &v = views[i];
    ViewScore vs;
    const auto &id = detail::require_field(v, "view_id", path);
    if (!id.is_string()) {
      throw SchemaError(path + ".view_id: expected a string");
    }
    vs.view_id = id.get<std::string>();
    vs.psnr = detail::metric_value(detail::require_field(v, "psnr", path), path + ".psnr", true);
    vs.ssim = detail::metric_value(detail::require_field(v, "ssim", path), path + ".ssim", false);
    if (auto it = v.find("lpips"); it != v.end()) {
      vs.lpips = detail::metric_value(*it, path + ".lpips", false);
    }
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (it.key() != "view_id" && it.key() != "psnr" && it.key() != "ssim" && it.key() != "lpips") {
        vs.extra[it.key()] = it.value();
      }
    }
    out.views.push_back(std::move(vs));
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() != "scene" && it.key() != "views" && it.key() != "average") {
      out.extra[it.key()] = it.value();
    }
  }
  return out;
}

inline ordered_json eval_to_json(const SceneEval &eval) {
  ordered_json doc = ordered_json::object();
  doc["scene"] = eval.scene;
  ordered_json views = ordered_json::array();
  for (const auto &v : eval.views) {
    ordered_json jv = ordered_json::object();
    jv["view_id"] = v.view_id;
    jv["psnr"] = detail::metric_json(v.psnr);
    jv["ssim"] = detail::metric_json(v.ssim);
    if (v.lpips) {
      jv["lpips"] = detail::metric_json(*v.lpips);
    }
    for (auto it = v.extra.begin(); it != v.extra.end(); ++it) {
      jv[it.key()] = it.value();
    }
    views.push_back(std::move(jv));
  }
  doc["views"] = std::move(views);
  const auto avg = eval.averages();
  ordered_json javg = ordered_json::object();
  javg["psnr"] = detail::metric_json(avg.psnr);
  javg["ssim"] = detail::metric_json(avg.ssim);
  if (avg.lpips) {
    javg["lpips"] = detail::metric_json(*avg.lpips);
  }
  doc["average"] = std::move(javg);
  for (auto it = eval.extra.begin(); it != eval.extra.end(); ++it) {
    doc[it.key()] = it.value();
  }
  return doc;
}

inline SceneEval parse_eval_json_text(const std::string &text, const std::string &origin = "$") {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(origin + ": " + e.what());
  }
  return eval_from_json(doc, origin);
}

inline SceneEval parse_eval_json(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open eval json '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_eval_json_text(ss.str(), path);
}

/// Two-space indented, trailing newline.
inline std::string emit_eval_json(const SceneEval &eval) { return eval_to_json(eval).dump(2) + "\n"; }

inline ordered_json summary_to_json(const BenchmarkSummary &s) {
  auto metrics = [](const MetricAverages &m) {
    ordered_json j = ordered_json::object();
    j["psnr"] = detail::metric_json(m.psnr);
    j["ssim"] = detail::metric_json(m.ssim);
    if (m.lpips) {
      j["lpips"] = detail::metric_json(*m.lpips);
    }
    return j;
  };
  ordered_json doc = ordered_json::object();
  doc["method"] = s.method;
  ordered_json scenes = ordered_json::array();
  for (const auto &sc : s.scenes) {
    ordered_json j = ordered_json::object();
    j["scene"] = sc.scene;
    j["view_count"] = sc.view_count;
    j["average"] = metrics(sc.metrics);
    scenes.push_back(std::move(j));
  }
  doc["scenes"] = std::move(scenes);
  doc["overall"] = metrics(s.overall);
  return doc;
}

} // namespace smokekit

#endif // SMOKEKIT_EVAL_JSON_HPP
