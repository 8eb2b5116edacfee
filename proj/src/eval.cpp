#include "sphstereo/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sphstereo/costvol.hpp"
#include "sphstereo/error.hpp"
#include "sphstereo/parallel.hpp"

namespace sphstereo {
namespace {

constexpr double kRadToDeg = 180.0 / kPi;

std::optional<double> finite_depth(const CameraRig& rig, double polar, double d) {
  if (!(d > 0.0) || d >= kPi - polar) return std::nullopt;
  return disparity_to_depth(rig, polar, d);
}

struct Partial {
  double disp_abs = 0, disp_sq = 0, depth_abs = 0, depth_sq = 0;
  std::size_t valid = 0, depth = 0, infinite = 0;
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

}  // namespace

RowRange crop_rows(const EquirectGrid& grid, double fraction) {
  if (!(fraction >= 0.0 && fraction < 0.5))
    throw DomainError("crop fraction must lie in [0, 0.5)");
  const int r0 = static_cast<int>(std::lround(fraction * grid.height));
  return {r0, grid.height - r0};
}

Mask texture_mask(const EquirectImage& image, int radius, double threshold) {
  image.validate();
  if (radius < 1) throw DomainError("texture radius must be >= 1");
  const EquirectGrid& g = image.grid;
  const EquirectImage luma = to_luma(image);
  Mask out(g, 0);
  parallel_for(0, g.height, [&](std::ptrdiff_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < g.width; ++i) {
      double sum = 0.0;
      int n = 0;
      for (int dy = -radius; dy < radius; ++dy) {
        const int r = std::clamp(j + dy, 0, g.height - 2);
        for (int dx = -radius; dx <= radius; ++dx) {
          const int c = ((i + dx) % g.width + g.width) % g.width;
          sum += std::abs(luma.at(r + 1, c) - luma.at(r, c));
          ++n;
        }
      }
      out.at(j, i) = sum / n >= threshold ? 1 : 0;
    }
  });
  return out;
}

void EvalReport::check() const {
  const auto ok = [](double mae, double rmse) { return mae <= rmse * (1.0 + 1e-12) + 1e-300; };
  if (!ok(disp_mae, disp_rmse) || !ok(depth_mae, depth_rmse))
    throw EvalError("report violates MAE <= RMSE");
}

EvalReport compute_metrics(const DisparityMap& pred, const DisparityMap& gt, const Mask& gt_valid,
                           const CameraRig& rig, double fraction) {
  if (!(pred.grid == gt.grid) || !(gt.grid == gt_valid.grid))
    throw DomainError("prediction, ground truth and mask grids differ");
  const EquirectGrid& g = gt.grid;
  const RowRange rows = crop_rows(g, fraction);
  const std::vector<double> polar = polar_angle_map(g);

  std::vector<Partial> partial(g.height);
  parallel_for(rows.begin, rows.end, [&](std::ptrdiff_t jj) {
    const int j = static_cast<int>(jj);
    Partial& acc = partial[j];
    for (int i = 0; i < g.width; ++i) {
      const double dp = pred.at(j, i);
      const double dg = gt.at(j, i);
      if (!gt_valid.at(j, i) || !DisparityMap::is_valid(dp) || !DisparityMap::is_valid(dg))
        continue;
      const double e = dp - dg;
      acc.disp_abs += std::abs(e);
      acc.disp_sq += e * e;
      ++acc.valid;
      const auto zp = finite_depth(rig, polar[j], dp);
      if (!zp) {
        ++acc.infinite;
        continue;
      }
      const auto zg = finite_depth(rig, polar[j], dg);
      if (!zg) continue;
      const double ez = *zp - *zg;
      acc.depth_abs += std::abs(ez);
      acc.depth_sq += ez * ez;
      ++acc.depth;
    }
  });

  Partial total;
  for (const Partial& p : partial) {
    total.disp_abs += p.disp_abs;
    total.disp_sq += p.disp_sq;
    total.depth_abs += p.depth_abs;
    total.depth_sq += p.depth_sq;
    total.valid += p.valid;
    total.depth += p.depth;
    total.infinite += p.infinite;
  }
  if (total.valid == 0) throw EvalError("no valid pixels to evaluate");

  EvalReport r;
  r.crop_fraction = fraction;
  r.valid_pixel_count = total.valid;
  r.depth_pixel_count = total.depth;
  r.infinite_pred_count = total.infinite;
  const double n = static_cast<double>(total.valid);
  r.disp_mae = total.disp_abs / n;
  r.disp_rmse = std::sqrt(total.disp_sq / n);
  if (total.depth > 0) {
    const double nz = static_cast<double>(total.depth);
    r.depth_mae = total.depth_abs / nz;
    r.depth_rmse = std::sqrt(total.depth_sq / nz);
  }
  r.check();
  return r;
}

std::string format_report_table(const EvalReport& r) {
  std::string s;
  s += "metric              MAE          RMSE\n";
  s += "disparity [deg]  " + fmt("%12.6f", r.disp_mae * kRadToDeg) + " " +
       fmt("%12.6f", r.disp_rmse * kRadToDeg) + "\n";
  s += "depth [m]        " + fmt("%12.6f", r.depth_mae) + " " + fmt("%12.6f", r.depth_rmse) + "\n";
  s += "valid pixels     " + std::to_string(r.valid_pixel_count) + "\n";
  s += "depth pixels     " + std::to_string(r.depth_pixel_count) + "\n";
  s += "infinite preds   " + std::to_string(r.infinite_pred_count) + "\n";
  s += "crop fraction    " + fmt("%.4f", r.crop_fraction) + "\n";
  return s;
}

std::string format_report_kv(const EvalReport& r) {
  std::string s;
  s += "disp_mae = " + fmt("%.17g", r.disp_mae) + "\n";
  s += "disp_rmse = " + fmt("%.17g", r.disp_rmse) + "\n";
  s += "depth_mae = " + fmt("%.17g", r.depth_mae) + "\n";
  s += "depth_rmse = " + fmt("%.17g", r.depth_rmse) + "\n";
  s += "valid_pixel_count = " + std::to_string(r.valid_pixel_count) + "\n";
  s += "depth_pixel_count = " + std::to_string(r.depth_pixel_count) + "\n";
  s += "infinite_pred_count = " + std::to_string(r.infinite_pred_count) + "\n";
  s += "crop_fraction = " + fmt("%.17g", r.crop_fraction) + "\n";
  return s;
}

std::vector<double> default_ablation_steps() { return {1.0, 0.5, 1.0 / 3.0, 0.25}; }

std::vector<AblationRow> ablate_step_size(const std::vector<Scene>& scenes,
                                          const std::vector<double>& steps_deg,
                                          const RunConfig& base) {
  base.validate();
  if (scenes.empty()) throw DomainError("ablation needs at least one scene");
  const EquirectGrid grid{base.width, base.height};
  const CameraRig rig(base.baseline_m);
  const double range_deg = base.step_deg * base.num_levels;

  // Every step is checked before any rendering starts.
  std::vector<RunConfig> configs;
  for (double step : steps_deg) {
    if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("step_deg", "must be positive");
    RunConfig cfg = base;
    cfg.step_deg = step;
    cfg.num_levels = static_cast<int>(std::lround(range_deg / step));
    if (cfg.num_levels < 2)
      throw ConfigError("step_deg", "step leaves fewer than two levels in the disparity range");
    cfg.validate();
    configs.push_back(cfg);
  }

  std::vector<StereoPair> pairs;
  pairs.reserve(scenes.size());
  for (const Scene& s : scenes) pairs.push_back(render_pair(s, rig, grid));

  std::vector<AblationRow> rows;
  for (const RunConfig& cfg : configs) {
    const PipelineOptions opts = PipelineOptions::from_run_config(cfg);

    double depth_sq = 0.0, disp_sq = 0.0;
    std::size_t depth_n = 0, disp_n = 0;
    for (const StereoPair& pair : pairs) {
      const DisparityMap pred = match_pair(pair.top_rgb, pair.bottom_rgb, opts);
      const EvalReport r = compute_metrics(pred, pair.gt_disparity, pair.gt_valid, rig,
                                           cfg.crop_fraction);
      depth_sq += r.depth_rmse * r.depth_rmse * static_cast<double>(r.depth_pixel_count);
      disp_sq += r.disp_rmse * r.disp_rmse * static_cast<double>(r.valid_pixel_count);
      depth_n += r.depth_pixel_count;
      disp_n += r.valid_pixel_count;
    }
    AblationRow row;
    row.step_deg = cfg.step_deg;
    row.depth_rmse = depth_n ? std::sqrt(depth_sq / static_cast<double>(depth_n)) : 0.0;
    row.disp_rmse = std::sqrt(disp_sq / static_cast<double>(disp_n));
    row.pixels = depth_n;
    rows.push_back(row);
  }
  return rows;
}

std::string format_ablation_csv(const std::vector<AblationRow>& rows) {
  std::string s = "step_deg,depth_rmse,disp_rmse\n";
  for (const auto& r : rows)
    s += fmt("%.6g", r.step_deg) + "," + fmt("%.9g", r.depth_rmse) + "," + fmt("%.9g", r.disp_rmse) + "\n";
  return s;
}

}  // namespace sphstereo
