// sphere-stereo: command-line front end for rendering, matching, scoring and
// exporting top-bottom spherical stereo pairs.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sphstereo/config.hpp"
#include "sphstereo/costvol.hpp"
#include "sphstereo/error.hpp"
#include "sphstereo/eval.hpp"
#include "sphstereo/geom.hpp"
#include "sphstereo/imageio.hpp"
#include "sphstereo/matcher.hpp"
#include "sphstereo/parallel.hpp"
#include "sphstereo/render.hpp"

namespace fs = std::filesystem;
using namespace sphstereo;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kBadArgs = 2, kParse = 3, kIo = 4, kDomain = 5 };

// Flags shared by every subcommand that builds a RunConfig. Unset optionals
// leave the lower-precedence value alone.
struct Overrides {
  std::string config_path;
  std::optional<int> width, height, num_levels, window_radius;
  std::optional<double> baseline, p1, p2, crop;
  std::optional<std::string> step, metric;
  std::vector<std::string> sets;

  void add_to(CLI::App* cmd, bool matching) {
    cmd->add_option("--config", config_path, "key = value config file");
    cmd->add_option("--baseline", baseline, "rig baseline in meters");
    cmd->add_option("--crop", crop, "pole crop fraction");
    if (matching) {
      cmd->add_option("--step-deg", step, "disparity step in degrees (accepts a/b)");
      cmd->add_option("--num-levels", num_levels, "number of disparity levels");
      cmd->add_option("--metric", metric, "sad, zncc or census");
      cmd->add_option("--window-radius", window_radius, "matching window radius");
      cmd->add_option("--p1", p1, "SGM small-jump penalty");
      cmd->add_option("--p2", p2, "SGM large-jump penalty");
    }
    cmd->add_option("--width", width, "panorama width");
    cmd->add_option("--height", height, "panorama height");
    cmd->add_option("--set", sets, "extra key=value overrides");
  }

  // defaults < extra (scene settings) < --config < individual flags
  RunConfig resolve(const std::vector<KeyValue>& extra = {}) const {
    RunConfig cfg;
    apply_config_entries(cfg, extra);
    if (!config_path.empty()) {
      const Bytes bytes = read_file_bytes(config_path);
      apply_config_entries(cfg, parse_key_values(std::string(bytes.begin(), bytes.end())));
    }
    if (width) cfg.width = *width;
    if (height) cfg.height = *height;
    if (num_levels) cfg.num_levels = *num_levels;
    if (window_radius) cfg.window_radius = *window_radius;
    if (baseline) cfg.baseline_m = *baseline;
    if (p1) cfg.sgm_p1 = *p1;
    if (p2) cfg.sgm_p2 = *p2;
    if (crop) cfg.crop_fraction = *crop;
    if (step) cfg.step_deg = parse_real("step_deg", *step);
    if (metric) cfg.cost_metric = parse_metric(*metric);
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError(kv, "--set expects key=value");
      apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
  }
};

void log(const std::string& msg) { std::cerr << "sphere-stereo: " << msg << "\n"; }

std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", s);
  return buf;
}

int run_render(const std::string& scene_path, const std::string& out_dir, const Overrides& ov) {
  const SceneFile sf = load_scene(scene_path);
  const RunConfig cfg = ov.resolve(sf.settings);
  const EquirectGrid grid{cfg.width, cfg.height};
  const CameraRig rig(cfg.baseline_m);
  const StereoPair pair = render_pair(sf.scene, rig, grid);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory " + out_dir + ": " + ec.message());
  const fs::path dir(out_dir);
  write_image(pair.top_rgb, (dir / "top.ppm").string());
  write_image(pair.bottom_rgb, (dir / "bottom.ppm").string());
  write_floatmap(pair.top_depth, (dir / "depth_gt.pfm").string());
  // The disparity mask is the unoccluded-correspondence mask, so eval picks
  // it up without a separate --gt-valid.
  DisparityMap disp = pair.gt_disparity;
  for (std::size_t p = 0; p < disp.values.size(); ++p)
    if (!pair.gt_valid.values[p]) disp.values[p] = DisparityMap::invalid();
  write_floatmap(disp, (dir / "disp_gt.pfm").string());
  log("rendered " + std::to_string(grid.width) + "x" + std::to_string(grid.height) + " into " +
      out_dir);
  return kOk;
}

struct MatchFlags {
  std::string top, bottom, out, dump;
  bool no_sgm = false, no_subpixel = false, lr_check = false;
  int median = 0;
};

int run_match(const MatchFlags& f, const Overrides& ov) {
  const RunConfig cfg = ov.resolve();
  const EquirectImage top = read_image(f.top);
  const EquirectImage bottom = read_image(f.bottom);
  if (!(top.grid == bottom.grid) || top.channels != bottom.channels)
    throw DomainError("top and bottom images differ in size or channel count");

  RunConfig grid_cfg = cfg;
  grid_cfg.width = top.grid.width;
  grid_cfg.height = top.grid.height;
  PipelineOptions opts = PipelineOptions::from_run_config(grid_cfg);
  opts.use_sgm = !f.no_sgm;
  opts.subpixel = !f.no_subpixel;
  opts.lr_check = f.lr_check;
  opts.median_radius = f.median;

  const auto t0 = std::chrono::steady_clock::now();
  CostVolume raw;
  const DisparityMap disp = match_pair(top, bottom, opts, f.dump.empty() ? nullptr : &raw);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_floatmap(disp, f.out);
  if (!f.dump.empty()) write_cost_volume(raw, cfg.step_deg, f.dump);
  std::cout << "seconds " << format_seconds(seconds) << "\n";
  log("wrote " + f.out + " (" + std::to_string(disp.valid_count()) + " valid pixels)");
  return kOk;
}

int run_eval(const std::string& pred_path, const std::string& gt_path,
             const std::string& valid_path, const std::string& report_path,
             const Overrides& ov) {
  const RunConfig cfg = ov.resolve();
  const DisparityMap pred = read_floatmap<DisparityTag>(pred_path);
  const DisparityMap gt = read_floatmap<DisparityTag>(gt_path);
  Mask valid;
  if (!valid_path.empty()) {
    valid = read_mask(valid_path);
  } else {
    valid = Mask(gt.grid, 1);
  }
  const EvalReport report =
      compute_metrics(pred, gt, valid, CameraRig(cfg.baseline_m), cfg.crop_fraction);
  report.check();
  std::cout << format_report_table(report);
  if (!report_path.empty()) {
    const std::string kv = format_report_kv(report);
    write_file_bytes(report_path, {reinterpret_cast<const std::uint8_t*>(kv.data()), kv.size()});
  }
  return kOk;
}

int run_pcl(const std::string& depth_path, const std::string& rgb_path, const std::string& out,
            bool binary) {
  const DepthMap depth = read_floatmap<DepthTag>(depth_path);
  const EquirectImage rgb = read_image(rgb_path);
  const PointCloud cloud = depth_to_pointcloud(depth.grid, depth, &rgb);
  write_ply(cloud, out, binary);
  log("wrote " + std::to_string(cloud.positions.size()) + " points to " + out);
  return kOk;
}

std::vector<double> parse_steps(const std::string& list) {
  std::vector<double> steps;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) steps.push_back(parse_real("steps", item));
  if (steps.empty()) throw ConfigError("steps", "empty step list");
  return steps;
}

int run_ablate(const std::string& scene_dir, const std::string& steps_text,
               const std::string& csv_path, Overrides ov) {
  if (!fs::is_directory(scene_dir)) throw IoError("not a directory: " + scene_dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(scene_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".scene") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no .scene files in " + scene_dir);

  // A suite.cfg next to the scenes acts as the default --config.
  const fs::path suite = fs::path(scene_dir) / "suite.cfg";
  if (ov.config_path.empty() && fs::exists(suite)) ov.config_path = suite.string();
  const RunConfig cfg = ov.resolve();

  std::vector<Scene> scenes;
  for (const fs::path& p : files) {
    scenes.push_back(load_scene(p.string()).scene);
    log("scene " + p.filename().string());
  }
  const std::vector<double> steps =
      steps_text.empty() ? default_ablation_steps() : parse_steps(steps_text);
  const std::string csv = format_ablation_csv(ablate_step_size(scenes, steps, cfg));
  std::cout << csv;
  if (!csv_path.empty())
    write_file_bytes(csv_path, {reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()});
  return kOk;
}

int run_angles(int height, int width) {
  const EquirectGrid grid{width, height};
  grid.validate();
  const std::vector<double> polar = polar_angle_map(grid);
  for (int j = 0; j < height; ++j) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", polar[j] * 180.0 / kPi);
    std::cout << buf << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Top-bottom spherical stereo: render, match, evaluate, export, ablate"};
  app.require_subcommand(1, 1);
  int threads = 0;
  app.add_option("--threads", threads, "worker cap (default: SPHERE_STEREO_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  std::string scene, out_dir;
  Overrides render_ov;
  CLI::App* render = app.add_subcommand("render", "render a synthetic stereo pair with ground truth");
  render->add_option("--scene", scene, "scene file")->required();
  render->add_option("--out", out_dir, "output directory")->required();
  render_ov.add_to(render, false);

  MatchFlags mf;
  Overrides match_ov;
  CLI::App* match = app.add_subcommand("match", "estimate top-referenced angular disparity");
  match->add_option("--top", mf.top, "top image")->required();
  match->add_option("--bottom", mf.bottom, "bottom image")->required();
  match->add_option("--out", mf.out, "output disparity PFM")->required();
  match->add_flag("--no-sgm", mf.no_sgm, "plain window costs, no path aggregation");
  match->add_flag("--no-subpixel", mf.no_subpixel, "integer levels only");
  match->add_option("--dump-costvol", mf.dump, "write the raw cost volume");
  match->add_flag("--lr-check", mf.lr_check, "top/bottom consistency check");
  match->add_option("--median", mf.median, "median filter radius")->check(CLI::NonNegativeNumber);
  match_ov.add_to(match, true);

  std::string pred, gt, gt_valid, report;
  Overrides eval_ov;
  CLI::App* eval = app.add_subcommand("eval", "score a disparity map against ground truth");
  eval->add_option("--pred", pred, "predicted disparity PFM")->required();
  eval->add_option("--gt", gt, "ground-truth disparity PFM")->required();
  eval->add_option("--gt-valid", gt_valid, "ground-truth validity mask (PGM)");
  eval->add_option("--report", report, "write key=value report");
  eval_ov.add_to(eval, false);

  std::string depth, rgb, ply;
  bool binary = false;
  CLI::App* pcl = app.add_subcommand("pcl", "export a depth map as a colored point cloud");
  pcl->add_option("--depth", depth, "depth PFM")->required();
  pcl->add_option("--rgb", rgb, "color image")->required();
  pcl->add_option("--out", ply, "output PLY")->required();
  pcl->add_flag("--binary", binary, "binary little-endian PLY");

  std::string scenes_dir, steps, csv;
  Overrides ablate_ov;
  CLI::App* ablate = app.add_subcommand("ablate", "depth error versus disparity step size");
  ablate->add_option("--scenes", scenes_dir, "directory of .scene files")->required();
  ablate->add_option("--steps", steps, "comma-separated steps in degrees (a/b allowed)");
  ablate->add_option("--csv", csv, "also write the CSV here");
  ablate_ov.add_to(ablate, true);

  int angle_height = 0, angle_width = 2;
  CLI::App* angles = app.add_subcommand("angles", "print the polar angle of every row");
  angles->add_option("--height", angle_height, "panorama height")->required();
  angles->add_option("--width", angle_width, "panorama width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n";
    const auto chosen = app.get_subcommands();
    std::cerr << (chosen.empty() ? app.help() : chosen.front()->help());
    return kBadArgs;
  }

  try {
    set_num_threads(threads);
    if (*render) return run_render(scene, out_dir, render_ov);
    if (*match) return run_match(mf, match_ov);
    if (*eval) return run_eval(pred, gt, gt_valid, report, eval_ov);
    if (*pcl) return run_pcl(depth, rgb, ply, binary);
    if (*ablate) return run_ablate(scenes_dir, steps, csv, ablate_ov);
    if (*angles) return run_angles(angle_height, angle_width);
  } catch (const ParseError& e) {
    log(std::string("parse error: ") + e.what());
    return kParse;
  } catch (const ConfigError& e) {
    log(std::string("config error: ") + e.what());
    return kParse;
  } catch (const IoError& e) {
    log(std::string("I/O error: ") + e.what());
    return kIo;
  } catch (const DomainError& e) {
    log(std::string("error: ") + e.what());
    return kDomain;
  } catch (const EvalError& e) {
    log(std::string("evaluation error: ") + e.what());
    return kDomain;
  } catch (const std::exception& e) {
    log(std::string("internal error: ") + e.what());
    return kInternal;
  }
  return kBadArgs;
}
