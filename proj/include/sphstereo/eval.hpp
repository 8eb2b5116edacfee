#pragma once

#include <string>
#include <vector>

#include "sphstereo/config.hpp"
#include "sphstereo/geom.hpp"
#include "sphstereo/matcher.hpp"
#include "sphstereo/render.hpp"
#include "sphstereo/types.hpp"

namespace sphstereo {

struct RowRange {
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
};

// Rows kept after dropping round(fraction * H) rows at each pole
// (half away from zero).
RowRange crop_rows(const EquirectGrid& grid, double fraction);

// Pixels whose window (rows j-r .. j+r-1, columns wrapping) has mean absolute
// vertical luma difference >= threshold. Vertical gradients are what the
// polar-angle search can lock onto.
Mask texture_mask(const EquirectImage& image, int radius, double threshold = 0.01);

struct EvalReport {
  double disp_mae = 0.0;   // radians
  double disp_rmse = 0.0;  // radians
  double depth_mae = 0.0;  // meters
  double depth_rmse = 0.0;
  std::size_t valid_pixel_count = 0;
  // Pixels that also have finite depth on both sides.
  std::size_t depth_pixel_count = 0;
  // Valid pixels whose prediction has no finite depth (d <= 0 or beyond the
  // admissible range for its polar angle).
  std::size_t infinite_pred_count = 0;
  double crop_fraction = 0.05;

  // MAE <= RMSE up to 1e-12 relative rounding; throws EvalError otherwise.
  void check() const;
};

// Scores pixels inside the crop rows that are gt-valid and have valid
// predictions. Depth errors compare both disparities converted through the
// same polar angle.
EvalReport compute_metrics(const DisparityMap& pred, const DisparityMap& gt, const Mask& gt_valid,
                           const CameraRig& rig, double fraction);

std::string format_report_table(const EvalReport& report);
std::string format_report_kv(const EvalReport& report);

struct AblationRow {
  double step_deg = 0.0;
  double depth_rmse = 0.0;  // pooled over every scene's scored pixels
  double disp_rmse = 0.0;
  std::size_t pixels = 0;
};

std::vector<double> default_ablation_steps();

// For every step, renders each scene with base's grid and rig, matches it with
// num_levels rescaled so step * num_levels stays at base's angular range, and
// pools the metrics.
std::vector<AblationRow> ablate_step_size(const std::vector<Scene>& scenes,
                                          const std::vector<double>& steps_deg,
                                          const RunConfig& base);

std::string format_ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace sphstereo
