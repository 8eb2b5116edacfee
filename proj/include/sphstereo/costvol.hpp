#pragma once

#include <string>
#include <vector>

#include "sphstereo/config.hpp"
#include "sphstereo/interp.hpp"
#include "sphstereo/types.hpp"

namespace sphstereo {

struct MatchConfig {
  double step_deg = 1.0 / 3.0;
  int num_levels = 192;
  CostMetric metric = CostMetric::CENSUS;
  int window_radius = 3;
  bool polar_adaptive = true;
  int taps = 7;

  void validate() const;
  double step_rad() const;
  // Angular disparity of level k; the single expression every stage uses.
  double level_angle(int k) const { return k * step_rad(); }

  static MatchConfig from_run_config(const RunConfig& cfg);
};

// Matching costs indexed [level][row][col]; lower is better.
struct CostVolume {
  EquirectGrid grid;
  std::vector<double> levels;  // radians, levels[0] == 0
  std::vector<float> costs;

  CostVolume() = default;
  CostVolume(EquirectGrid g, std::vector<double> lv)
      : grid(g), levels(std::move(lv)), costs(levels.size() * g.pixel_count(), 0.0f) {}

  int num_levels() const { return static_cast<int>(levels.size()); }
  double step_rad() const { return levels.size() > 1 ? levels[1] - levels[0] : 0.0; }

  float* slice(int k) { return costs.data() + static_cast<std::size_t>(k) * grid.pixel_count(); }
  const float* slice(int k) const {
    return costs.data() + static_cast<std::size_t>(k) * grid.pixel_count();
  }
  float& at(int k, int row, int col) {
    return slice(k)[static_cast<std::size_t>(row) * grid.width + col];
  }
  float at(int k, int row, int col) const {
    return slice(k)[static_cast<std::size_t>(row) * grid.width + col];
  }

  void validate() const;
};

// Output row angle theta samples the input at theta + delta_polar along the
// same column, per channel, with edge rows replicated.
EquirectImage shift_vertical(const EquirectImage& image, double delta_polar,
                             const InterpKernel& kernel = InterpKernel::lanczos(7));

// Row shift (in rows, positive = content moves down) for a polar offset.
double polar_shift_rows(const EquirectGrid& grid, double delta_polar);

enum class ReferenceView { Top, Bottom };

// Top reference: level k compares top with bottom sampled at theta + d_k.
// Bottom reference: level k compares bottom with top sampled at theta - d_k.
CostVolume build_cost_volume(const EquirectImage& top, const EquirectImage& bottom,
                             const MatchConfig& cfg, ReferenceView ref = ReferenceView::Top);

// Horizontal window half-width at a row. With polar_adaptive the window widens
// toward the poles: min(ceil(r / max(sin theta, sin theta_min)), 4r).
int window_half_width(const EquirectGrid& grid, int row, int radius, bool polar_adaptive);

inline constexpr double kAdaptivePolarMin = 0.05 * kPi;
inline constexpr int kCensusRadius = 2;
inline constexpr int kCensusBits = 24;

// 0.299 R + 0.587 G + 0.114 B; single-channel input is returned unchanged.
EquirectImage to_luma(const EquirectImage& image);

// "CVOL1 W H D step_deg\n" followed by little-endian float32 costs, level-major.
void write_cost_volume(const CostVolume& vol, double step_deg, const std::string& path);

namespace detail {

// Final cost formulas shared by the volume builder and the brute-force matcher.
inline float census_cost(long hamming_sum, int window_pixels) {
  return static_cast<float>(static_cast<double>(hamming_sum) /
                            (static_cast<double>(kCensusBits) * window_pixels));
}
inline float sad_cost(double sum, int window_pixels) {
  return static_cast<float>(sum / window_pixels);
}
float zncc_cost(double n, double sx, double sy, double sxx, double syy, double sxy);

}  // namespace detail

}  // namespace sphstereo
