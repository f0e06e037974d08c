#ifndef SMOKEKIT_SCORE_HPP
#define SMOKEKIT_SCORE_HPP

#include <exception>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "smokekit/io.hpp"
#include "smokekit/metrics.hpp"
#include "smokekit/parallel.hpp"

namespace smokekit {

namespace fs = std::filesystem;

/// A view id mapped to its file in each of two or more directories.
struct ViewPairing {
  std::vector<std::string> view_ids;
  std::vector<std::vector<fs::path>> files; ///< files[dir][view]
};

/// Pairs images across directories by filename stem (extensions may differ).
/// Throws ContractError listing every id that is absent from some directory,
/// or that appears twice within one.
inline ViewPairing pair_views(const std::vector<fs::path> &dirs) {
  detail::require(!dirs.empty(), "pair_views: no directories");
  std::vector<std::map<std::string, fs::path>> by_stem(dirs.size());
  std::map<std::string, std::vector<std::size_t>> present;
  std::string problems;
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    for (const auto &p : io::list_images(dirs[d])) {
      const std::string stem = p.stem().string();
      if (!by_stem[d].emplace(stem, p).second) {
        problems += "\n  '" + stem + "' appears more than once in " + dirs[d].string();
      }
      present[stem].push_back(d);
    }
  }
  for (const auto &[stem, where] : present) {
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      if (!by_stem[d].contains(stem)) {
        problems += "\n  '" + stem + "' missing from " + dirs[d].string();
      }
    }
  }
  if (!problems.empty()) {
    throw ContractError("view sets differ across directories:" + problems);
  }
  if (present.empty()) {
    throw ContractError("no images found in " + dirs.front().string());
  }
  ViewPairing out;
  out.files.resize(dirs.size());
  for (const auto &[stem, where] : present) {
    out.view_ids.push_back(stem);
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      out.files[d].push_back(by_stem[d].at(stem));
    }
  }
  return out;
}

/// Scores every result image against the reference with the same stem.
/// Views are reported in stem order; scoring may run on `jobs` threads.
inline SceneEval score_result_package(const fs::path &result_dir, const fs::path &reference_dir,
                                      const std::string &scene = {}, const SsimParams &ssim_params = {},
                                      unsigned jobs = 1) {
  const ViewPairing pairing = pair_views({result_dir, reference_dir});
  const std::size_t n = pairing.view_ids.size();
  SceneEval eval;
  eval.scene = scene.empty() ? fs::absolute(reference_dir).lexically_normal().filename().string() : scene;
  if (eval.scene.empty()) {
    eval.scene = fs::absolute(reference_dir).lexically_normal().parent_path().filename().string();
  }
  eval.views.resize(n);
  std::vector<std::exception_ptr> errors(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    try {
      const Image result = io::read_image(pairing.files[0][i]);
      const Image reference = io::read_image(pairing.files[1][i]);
      if (!result.same_extent(reference)) {
        throw ContractError("view '" + pairing.view_ids[i] + "': resolution mismatch " +
                            std::to_string(result.width()) + "x" + std::to_string(result.height()) + " vs " +
                            std::to_string(reference.width()) + "x" + std::to_string(reference.height()));
      }
      eval.views[i].view_id = pairing.view_ids[i];
      eval.views[i].psnr = psnr(result, reference);
      eval.views[i].ssim = ssim(result, reference, ssim_params);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto &e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return eval;
}

} // namespace smokekit

#endif // SMOKEKIT_SCORE_HPP
