// smokekit: batch front end for smoke synthesis, DCP pseudo-clean recovery,
// multi-reference harmonization and PSNR/SSIM evaluation.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "smokekit/smokekit.hpp"

namespace fs = std::filesystem;
using namespace smokekit;

namespace {

enum class Verbosity { quiet, normal, verbose };

struct Logger {
  Verbosity level = Verbosity::normal;
  std::mutex mu;

  void info(const std::string &msg) {
    if (level != Verbosity::quiet) {
      std::lock_guard lock(mu);
      std::cerr << msg << '\n';
    }
  }
  void debug(const std::string &msg) {
    if (level == Verbosity::verbose) {
      std::lock_guard lock(mu);
      std::cerr << msg << '\n';
    }
  }
  void error(const std::string &msg) {
    std::lock_guard lock(mu);
    std::cerr << "error: " << msg << '\n';
  }
};

Logger g_log;

std::string num(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

Airlight parse_airlight(const std::string &text) {
  std::array<double, 3> a{};
  std::stringstream ss(text);
  std::string part;
  int n = 0;
  while (std::getline(ss, part, ',')) {
    if (n == 3) {
      throw ContractError("airlight '" + text + "': expected three components");
    }
    std::size_t used = 0;
    try {
      a[static_cast<std::size_t>(n)] = std::stod(part, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != part.size()) {
      throw ContractError("airlight '" + text + "': bad number '" + part + "'");
    }
    ++n;
  }
  if (n != 3) {
    throw ContractError("airlight '" + text + "': expected three components");
  }
  return Airlight(a);
}

std::string validate_airlight(const std::string &text) {
  try {
    parse_airlight(text);
    return {};
  } catch (const std::exception &e) {
    return e.what();
  }
}

std::string validate_field(const std::string &text) {
  try {
    parse_field_spec(text);
    return {};
  } catch (const std::exception &e) {
    return e.what();
  }
}

std::string airlight_text(const Airlight &a) { return num(a[0]) + "," + num(a[1]) + "," + num(a[2]); }

/// Runs `work` for every item on the worker pool, logging failures without
/// stopping the batch. Returns the number of failed items.
template <typename Work>
std::size_t run_batch(const std::vector<std::string> &names, unsigned jobs, Work &&work) {
  std::vector<std::string> failures(names.size());
  parallel_for(names.size(), jobs, [&](std::size_t i) {
    try {
      work(i);
      g_log.debug("ok: " + names[i]);
    } catch (const std::exception &e) {
      failures[i] = e.what();
    }
  });
  std::size_t failed = 0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!failures[i].empty()) {
      g_log.error(names[i] + ": " + failures[i]);
      ++failed;
    }
  }
  return failed;
}

std::vector<fs::path> require_images(const fs::path &dir) {
  auto files = io::list_images(dir);
  if (files.empty()) {
    throw IoError("no PNG or JPEG images in '" + dir.string() + "'");
  }
  return files;
}

std::vector<std::string> names_of(const std::vector<fs::path> &files) {
  std::vector<std::string> out;
  for (const auto &f : files) {
    out.push_back(f.filename().string());
  }
  return out;
}

// ---------------------------------------------------------------- synth

struct SynthConfig {
  std::string input;
  std::string output;
  std::string field = "constant:0.6";
  std::string airlight = "0.8,0.8,0.8";
};

int cmd_synth(const SynthConfig &cfg, unsigned jobs) {
  const FieldSpec field = parse_field_spec(cfg.field);
  const Airlight a = parse_airlight(cfg.airlight);
  g_log.info("synth: t=" + cfg.field + " airlight=" + airlight_text(a) + " jobs=" + std::to_string(jobs));
  const auto files = require_images(cfg.input);
  const fs::path out(cfg.output);
  fs::create_directories(out / "meta");
  const std::size_t failed = run_batch(names_of(files), jobs, [&](std::size_t i) {
    const Image clean = io::read_image(files[i]);
    const TransmissionMap t = synth_field(clean.width(), clean.height(), field);
    const std::string stem = files[i].stem().string();
    io::write_png(out / (stem + ".png"), composite(clean, t, a));
    io::write_png(out / "meta" / (stem + ".transmission.png"), t.image(), true);
    nlohmann::ordered_json meta;
    meta["source"] = files[i].filename().string();
    meta["transmission"] = cfg.field;
    meta["airlight"] = a.values();
    io::write_text_atomic(out / "meta" / (stem + ".json"), meta.dump(2) + "\n");
  });
  g_log.info("synth: " + std::to_string(files.size() - failed) + "/" + std::to_string(files.size()) + " written");
  return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------- dehaze

struct DehazeConfig {
  std::string input;
  std::string output;
  int patch = 15;
  double omega = 0.95;
  double percentile = 0.001;
  int radius = 61;
  double epsilon = 1e-3;
  double t_min = 0.1;
  double gamma = 0.5;
  std::string airlight;
  bool report = false;
};

nlohmann::ordered_json report_json(const DehazeReport &r) {
  nlohmann::ordered_json j;
  j["airlight"] = r.airlight.values();
  j["airlight_source"] = r.airlight_overridden ? "override" : "estimated";
  j["transmission"] = {{"min", r.t_min_value}, {"mean", r.t_mean_value}, {"max", r.t_max_value}};
  j["fraction_t_below_t_min"] = r.fraction_t_clamped;
  j["fraction_output_clamped"] = r.fraction_output_clamped;
  return j;
}

int cmd_dehaze(const DehazeConfig &cfg, unsigned jobs) {
  DehazeParams params;
  params.dcp.patch_size = cfg.patch;
  params.dcp.omega = cfg.omega;
  params.dcp.airlight_percentile = cfg.percentile;
  params.gf.radius = cfg.radius;
  params.gf.epsilon = cfg.epsilon;
  params.t_min = cfg.t_min;
  params.gamma = cfg.gamma;
  if (!cfg.airlight.empty()) {
    params.airlight_override = parse_airlight(cfg.airlight);
  }
  params.validate();
  g_log.info("dehaze: omega=" + num(params.dcp.omega) + " patch=" + std::to_string(params.dcp.patch_size) +
             " radius=" + std::to_string(params.gf.radius) + " epsilon=" + num(params.gf.epsilon) +
             " t_min=" + num(params.t_min) + " gamma=" + num(params.gamma) + " airlight=" +
             (params.airlight_override ? "override(" + airlight_text(*params.airlight_override) + ")"
                                       : "estimated(percentile=" + num(params.dcp.airlight_percentile) + ")") +
             " jobs=" + std::to_string(jobs));
  const auto files = require_images(cfg.input);
  const fs::path out(cfg.output);
  fs::create_directories(out);
  if (cfg.report) {
    fs::create_directories(out / "reports");
  }
  const std::size_t failed = run_batch(names_of(files), jobs, [&](std::size_t i) {
    const Image obs = io::read_image(files[i]);
    const DehazeResult res = dehaze_image(obs, params);
    const std::string stem = files[i].stem().string();
    io::write_png(out / (stem + ".png"), res.image);
    if (cfg.report) {
      io::write_text_atomic(out / "reports" / (stem + ".json"), report_json(res.report).dump(2) + "\n");
    }
    g_log.debug(stem + ": airlight=" + airlight_text(res.report.airlight) + " t_mean=" + num(res.report.t_mean_value));
  });
  g_log.info("dehaze: " + std::to_string(files.size() - failed) + "/" + std::to_string(files.size()) + " written");
  return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------- harmonize

struct HarmonizeConfig {
  std::string source;
  std::vector<std::string> donors;
  std::string output;
  double sigma = 0.35;
  double epsilon = 1e-6;
  int quality = 95;
  std::string subsampling = "420";
};

ChromaSubsampling parse_subsampling(const std::string &s) {
  if (s == "420") {
    return ChromaSubsampling::s420;
  }
  if (s == "422") {
    return ChromaSubsampling::s422;
  }
  if (s == "444") {
    return ChromaSubsampling::s444;
  }
  throw ContractError("subsampling must be 420, 422 or 444");
}

int cmd_harmonize(const HarmonizeConfig &cfg, unsigned jobs) {
  HarmonizeParams params;
  params.blur_sigma = cfg.sigma;
  params.floor_epsilon = cfg.epsilon;
  params.jpeg_quality = cfg.quality;
  params.chroma_subsampling = parse_subsampling(cfg.subsampling);
  params.validate();
  g_log.info("harmonize: donors=" + std::to_string(cfg.donors.size()) + " K=" + std::to_string(cfg.donors.size() + 1) +
             " sigma=" + num(params.blur_sigma) + " epsilon=" + num(params.floor_epsilon) +
             " jpeg_quality=" + std::to_string(params.jpeg_quality) + " subsampling=" + cfg.subsampling +
             " jobs=" + std::to_string(jobs));
  std::vector<fs::path> dirs{cfg.source};
  for (const auto &d : cfg.donors) {
    dirs.emplace_back(d);
  }
  const ViewPairing pairing = pair_views(dirs);
  const fs::path out(cfg.output);
  fs::create_directories(out);
  const io::JpegOptions jpeg{params.jpeg_quality, params.chroma_subsampling};
  const std::size_t failed = run_batch(pairing.view_ids, jobs, [&](std::size_t i) {
    const Image src = io::read_image(pairing.files[0][i]);
    std::vector<Image> donors;
    for (std::size_t d = 1; d < dirs.size(); ++d) {
      donors.push_back(io::read_image(pairing.files[d][i]));
    }
    io::write_jpeg(out / (pairing.view_ids[i] + ".jpg"), harmonize_pipeline(src, donors, params), jpeg);
  });
  g_log.info("harmonize: " + std::to_string(pairing.view_ids.size() - failed) + "/" +
             std::to_string(pairing.view_ids.size()) + " written");
  return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------- eval

struct EvalConfig {
  std::string result;
  std::string reference;
  std::string scene;
  std::string json;
  std::string ssim_channels = "per-channel";
};

int cmd_eval(const EvalConfig &cfg, unsigned jobs) {
  SsimParams sp;
  sp.policy = cfg.ssim_channels == "luminance" ? SsimChannelPolicy::luminance : SsimChannelPolicy::per_channel_mean;
  g_log.info("eval: ssim_channels=" + cfg.ssim_channels + " jobs=" + std::to_string(jobs));
  const SceneEval eval = score_result_package(cfg.result, cfg.reference, cfg.scene, sp, jobs);
  if (!cfg.json.empty()) {
    const fs::path p(cfg.json);
    if (p.has_parent_path()) {
      fs::create_directories(p.parent_path());
    }
    io::write_text_atomic(p, emit_eval_json(eval));
  }
  std::cout << "scene: " << eval.scene << "\n" << format_view_table(eval);
  return 0;
}

// ---------------------------------------------------------------- aggregate

struct AggregateConfig {
  std::vector<std::string> files;
  std::string method = "method";
  std::vector<std::string> include;
  std::vector<std::string> exclude;
  std::string json;
};

int cmd_aggregate(const AggregateConfig &cfg) {
  std::vector<SceneEval> evals;
  for (const auto &f : cfg.files) {
    evals.push_back(parse_eval_json(f));
  }
  const BenchmarkSummary summary = aggregate(evals, cfg.method, {cfg.include, cfg.exclude});
  g_log.info("aggregate: method=" + cfg.method + " scenes=" + std::to_string(summary.scenes.size()) + "/" +
             std::to_string(evals.size()));
  if (!cfg.json.empty()) {
    io::write_text_atomic(cfg.json, summary_to_json(summary).dump(2) + "\n");
  }
  std::cout << format_scene_table(summary) << "\n" << format_method_table({summary});
  return 0;
}

// ---------------------------------------------------------------- fixtures

struct FixturesConfig {
  std::string output = "fixtures";
  std::uint64_t seed = 1;
  int size = 64;
  int views = 10;
  int donors = 4;
  int scenes = 8;
};

int cmd_fixtures(const FixturesConfig &cfg) {
  detail::require(cfg.size > 0 && cfg.views > 0 && cfg.donors >= 0 && cfg.scenes >= 0,
                  "fixtures: counts must be positive");
  const fs::path out(cfg.output);
  fs::create_directories(out / "clean");
  fs::create_directories(out / "eval");
  const std::array<std::array<double, 3>, 4> gains{{{1.15, 1.0, 0.85}, {0.9, 1.05, 1.1}, {1.0, 0.9, 1.0}, {1.1, 1.1, 0.95}}};
  const std::array<std::array<double, 3>, 4> offsets{{{0.03, 0.0, -0.02}, {0.0, 0.02, 0.04}, {-0.03, 0.0, 0.02}, {0.05, 0.05, 0.05}}};
  for (int d = 0; d < cfg.donors; ++d) {
    fs::create_directories(out / "donors" / ("donor" + std::to_string(d)));
  }
  for (int v = 0; v < cfg.views; ++v) {
    char id[16];
    std::snprintf(id, sizeof id, "%05d", v);
    fixtures::FixtureSpec spec;
    spec.seed = cfg.seed * 1000 + static_cast<std::uint64_t>(v);
    spec.width = spec.height = cfg.size;
    spec.kind = v % 3 == 2 ? fixtures::SceneKind::gradient : fixtures::SceneKind::textured_noise;
    const Image clean = fixtures::make_clean_scene(spec);
    io::write_png(out / "clean" / (std::string(id) + ".png"), clean);
    for (int d = 0; d < cfg.donors; ++d) {
      const auto k = static_cast<std::size_t>(d % 4);
      io::write_png(out / "donors" / ("donor" + std::to_string(d)) / (std::string(id) + ".png"),
                    fixtures::make_donor_variant(clean, gains[k], offsets[k]).image);
    }
  }
  static const std::array<const char *, 8> names{"SceneA", "SceneB", "SceneC", "SceneD",
                                                 "SceneE", "SceneF", "SceneG", "SceneH"};
  for (int s = 0; s < cfg.scenes; ++s) {
    const std::string name = s < 8 ? names[static_cast<std::size_t>(s)] : "Scene" + std::to_string(s);
    const auto e = fixtures::make_eval_fixture(name, 4, cfg.seed * 7919 + static_cast<std::uint64_t>(s));
    io::write_text_atomic(out / "eval" / (name + ".json"), emit_eval_json(e));
  }
  g_log.info("fixtures: " + std::to_string(cfg.views) + " views, " + std::to_string(cfg.donors) + " donors, " +
             std::to_string(cfg.scenes) + " eval scenes under " + out.string());
  return 0;
}

unsigned default_jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"smokekit: smoke synthesis, DCP dehazing, LAB harmonization and PSNR/SSIM evaluation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; sections named after subcommands");
  unsigned jobs = default_jobs();
  app.add_option("-j,--jobs", jobs, "Worker threads")->envname("SMOKEKIT_JOBS")->check(CLI::PositiveNumber);
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "Per-file progress");
  app.add_flag("-q,--quiet", quiet, "Errors only");

  SynthConfig synth;
  auto *s = app.add_subcommand("synth", "Composite clean images through the scattering model");
  s->add_option("-i,--input", synth.input, "Clean image directory")->required()->check(CLI::ExistingDirectory);
  s->add_option("-o,--output", synth.output, "Output directory")->required();
  s->add_option("--t", synth.field, "Transmission field: constant:V | ramp:L:R | radial:C:E")
      ->capture_default_str()
      ->check(CLI::Validator(validate_field, "FIELD"));
  s->add_option("--airlight", synth.airlight, "Airlight R,G,B in (0,1]")
      ->capture_default_str()
      ->check(CLI::Validator(validate_airlight, "R,G,B"));

  DehazeConfig dehaze;
  auto *d = app.add_subcommand("dehaze", "Dark-channel-prior pseudo-clean recovery");
  d->add_option("-i,--input", dehaze.input, "Smoky image directory")->required()->check(CLI::ExistingDirectory);
  d->add_option("-o,--output", dehaze.output, "Output directory")->required();
  d->add_option("--patch", dehaze.patch, "Dark channel patch size (odd)")->capture_default_str();
  d->add_option("--omega", dehaze.omega, "Haze retention factor")->capture_default_str();
  d->add_option("--percentile", dehaze.percentile, "Airlight candidate fraction")->capture_default_str();
  d->add_option("--radius", dehaze.radius, "Guided filter radius (0 skips refinement)")->capture_default_str();
  d->add_option("--eps", dehaze.epsilon, "Guided filter regularization")->capture_default_str();
  d->add_option("--t-min", dehaze.t_min, "Transmission floor for recovery")->capture_default_str();
  d->add_option("--gamma", dehaze.gamma, "Gamma enhancement exponent")->capture_default_str();
  d->add_option("--airlight", dehaze.airlight, "Manual airlight R,G,B (skips estimation)")
      ->check(CLI::Validator(validate_airlight, "R,G,B"));
  d->add_flag("--report", dehaze.report, "Write per-image JSON reports under <output>/reports");

  HarmonizeConfig harm;
  auto *h = app.add_subcommand("harmonize", "Geometric-mean LAB harmonization of source renders");
  h->add_option("--source", harm.source, "Source render directory")->required()->check(CLI::ExistingDirectory);
  h->add_option("--donor", harm.donors, "Donor render directory (repeatable)")
      ->required()
      ->check(CLI::ExistingDirectory);
  h->add_option("-o,--output", harm.output, "Output directory")->required();
  h->add_option("--sigma", harm.sigma, "Gaussian smoothing sigma (0 disables)")->capture_default_str();
  h->add_option("--epsilon", harm.epsilon, "Log floor for the geometric mean")->capture_default_str();
  h->add_option("--quality", harm.quality, "JPEG quality")->capture_default_str()->check(CLI::Range(1, 100));
  h->add_option("--subsampling", harm.subsampling, "Chroma subsampling")
      ->capture_default_str()
      ->check(CLI::IsMember({"420", "422", "444"}));

  EvalConfig ev;
  auto *e = app.add_subcommand("eval", "Score a result directory against references");
  e->add_option("--result", ev.result, "Result image directory")->required()->check(CLI::ExistingDirectory);
  e->add_option("--reference", ev.reference, "Reference image directory")->required()->check(CLI::ExistingDirectory);
  e->add_option("--scene", ev.scene, "Scene name (defaults to the reference directory name)");
  e->add_option("--json", ev.json, "Write the scene eval JSON here");
  e->add_option("--ssim-channels", ev.ssim_channels, "SSIM channel policy")
      ->capture_default_str()
      ->check(CLI::IsMember({"per-channel", "luminance"}));

  AggregateConfig agg;
  auto *a = app.add_subcommand("aggregate", "Average per-scene eval JSON files");
  a->add_option("files", agg.files, "Scene eval JSON files")->required()->check(CLI::ExistingFile);
  a->add_option("--method", agg.method, "Method name for the table")->capture_default_str();
  a->add_option("--include", agg.include, "Only these scenes");
  a->add_option("--exclude", agg.exclude, "Drop these scenes");
  a->add_option("--json", agg.json, "Write the summary JSON here");

  FixturesConfig fx;
  auto *f = app.add_subcommand("fixtures", "Write the deterministic fixture corpus");
  f->add_option("-o,--output", fx.output, "Output directory")->capture_default_str();
  f->add_option("--seed", fx.seed, "Base seed")->capture_default_str();
  f->add_option("--size", fx.size, "Square image size")->capture_default_str();
  f->add_option("--views", fx.views, "Number of views")->capture_default_str();
  f->add_option("--donors", fx.donors, "Number of donor branches")->capture_default_str();
  f->add_option("--scenes", fx.scenes, "Number of eval JSON scenes")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  g_log.level = quiet ? Verbosity::quiet : verbose ? Verbosity::verbose : Verbosity::normal;

  try {
    if (s->parsed()) {
      return cmd_synth(synth, jobs);
    }
    if (d->parsed()) {
      return cmd_dehaze(dehaze, jobs);
    }
    if (h->parsed()) {
      return cmd_harmonize(harm, jobs);
    }
    if (e->parsed()) {
      return cmd_eval(ev, jobs);
    }
    if (a->parsed()) {
      return cmd_aggregate(agg);
    }
    if (f->parsed()) {
      return cmd_fixtures(fx);
    }
  } catch (const std::exception &ex) {
    g_log.error(ex.what());
    return 1;
  }
  return 2;
}
