#pragma once

#include <cstdint>

#include "sphstereo/config.hpp"
#include "sphstereo/costvol.hpp"
#include "sphstereo/types.hpp"

namespace sphstereo {

// Aggregation directions, named by the direction the scan travels.
enum SgmPath : std::uint32_t {
  kPathLeftToRight = 1u << 0,
  kPathRightToLeft = 1u << 1,
  kPathTopToBottom = 1u << 2,
  kPathBottomToTop = 1u << 3,
  kPathDownRight = 1u << 4,
  kPathDownLeft = 1u << 5,
  kPathUpRight = 1u << 6,
  kPathUpLeft = 1u << 7,
};
inline constexpr std::uint32_t kAllPaths = 0xFFu;
inline constexpr int kMaxRingLaps = 8;

struct SgmParams {
  double p1 = 0.02;
  double p2 = 0.25;
  std::uint32_t paths = kAllPaths;

  void validate() const;
  int path_count() const;
};

// Row/column step of a path (dy = +1 scans toward larger row indices).
struct PathStep {
  int dy;
  int dx;
};
PathStep path_step(SgmPath path);

// Sum over the selected paths of the SGM recurrence
//   L(p, d) = C(p, d) + (min(L(q, d), L(q, d +- 1) + p1, min L(q) + p2) - min L(q))
// with q the previous pixel on the path. Rows are rings: horizontal scans run
// laps around the row until the state at the seam repeats (at most
// kMaxRingLaps laps, the first lap starting fresh). Scans with a vertical
// component start fresh on the first row they visit and wrap horizontally.
CostVolume aggregate_sgm(const CostVolume& vol, const SgmParams& params);

// Per-pixel argmin (lowest index wins ties), optionally refined by a parabola
// through the neighboring levels with the offset clamped to [-0.5, 0.5].
DisparityMap wta_disparity(const CostVolume& vol, bool subpixel = true);

// Invalidates reference pixels whose disparity disagrees with the
// bottom-referenced map sampled at theta + d by more than tol_levels steps.
DisparityMap consistency_check(const DisparityMap& disp_ref, const DisparityMap& disp_other,
                               double tol_levels, double step_rad);

// Exhaustive per-pixel window matching over all levels, integer levels only.
// Equal bit for bit to wta_disparity(build_cost_volume(...), false).
DisparityMap match_bruteforce(const EquirectImage& top, const EquirectImage& bottom,
                              const MatchConfig& cfg);

// Median over valid neighbors in a (2r+1)^2 window, longitude wrapping. On an
// even count the lower middle value is taken.
DisparityMap median_filter(const DisparityMap& disp, int radius);

struct PipelineOptions {
  MatchConfig match;
  SgmParams sgm;
  bool use_sgm = true;
  bool subpixel = true;
  bool lr_check = false;
  double lr_tol_levels = 1.0;
  int median_radius = 0;

  static PipelineOptions from_run_config(const RunConfig& cfg);
};

// Full top-referenced pipeline. When raw_volume is given, it receives the
// unaggregated cost volume.
DisparityMap match_pair(const EquirectImage& top, const EquirectImage& bottom,
                        const PipelineOptions& opts, CostVolume* raw_volume = nullptr);

}  // namespace sphstereo
