#include "sphstereo/matcher.hpp"

#include <algorithm>
#include <cmath>

#include "sphstereo/error.hpp"
#include "sphstereo/parallel.hpp"

namespace sphstereo {

PipelineOptions PipelineOptions::from_run_config(const RunConfig& cfg) {
  PipelineOptions opts;
  opts.match = MatchConfig::from_run_config(cfg);
  opts.sgm.p1 = cfg.sgm_p1;
  opts.sgm.p2 = cfg.sgm_p2;
  return opts;
}

DisparityMap wta_disparity(const CostVolume& vol, bool subpixel) {
  const EquirectGrid& g = vol.grid;
  const int levels = vol.num_levels();
  const std::size_t plane = g.pixel_count();
  const double step = vol.step_rad();
  DisparityMap out(g);
  parallel_for(0, g.height, [&](std::ptrdiff_t jj) {
    for (int i = 0; i < g.width; ++i) {
      const std::size_t p = static_cast<std::size_t>(jj) * g.width + i;
      int best = 0;
      float best_cost = vol.costs[p];
      for (int k = 1; k < levels; ++k) {
        const float c = vol.costs[k * plane + p];
        if (c < best_cost) {
          best_cost = c;
          best = k;
        }
      }
      double d = vol.levels[best];
      if (subpixel && best > 0 && best + 1 < levels) {
        const double cm = vol.costs[(best - 1) * plane + p];
        const double c0 = best_cost;
        const double cp = vol.costs[(best + 1) * plane + p];
        const double denom = 2.0 * (cm - 2.0 * c0 + cp);
        if (denom > 0.0) {
          const double offset = std::clamp((cm - cp) / denom, -0.5, 0.5);
          d += offset * step;
        }
      }
      out.values[p] = d;
    }
  });
  return out;
}

DisparityMap consistency_check(const DisparityMap& disp_ref, const DisparityMap& disp_other,
                               double tol_levels, double step_rad) {
  if (!(disp_ref.grid == disp_other.grid)) throw DomainError("disparity map grids differ");
  const EquirectGrid& g = disp_ref.grid;
  const double limit = tol_levels * step_rad;
  DisparityMap out = disp_ref;
  for (int j = 0; j < g.height; ++j) {
    for (int i = 0; i < g.width; ++i) {
      const double d = disp_ref.at(j, i);
      if (!DisparityMap::is_valid(d)) continue;
      const double y = std::clamp(j - d * g.height / kPi, 0.0, g.height - 1.0);
      const int y0 = static_cast<int>(std::floor(y));
      const double f = y - y0;
      const double a = disp_other.at(y0, i);
      double other = a;
      bool ok = DisparityMap::is_valid(a);
      if (ok && f > 0.0) {
        const double b = disp_other.at(std::min(y0 + 1, g.height - 1), i);
        ok = DisparityMap::is_valid(b);
        other = (1.0 - f) * a + f * b;
      }
      if (!ok || std::abs(d - other) > limit) out.at(j, i) = DisparityMap::invalid();
    }
  }
  return out;
}

DisparityMap median_filter(const DisparityMap& disp, int radius) {
  if (radius < 0) throw DomainError("median radius must be >= 0");
  const EquirectGrid& g = disp.grid;
  DisparityMap out = disp;
  parallel_for(0, g.height, [&](std::ptrdiff_t jj) {
    const int j = static_cast<int>(jj);
    std::vector<double> window;
    for (int i = 0; i < g.width; ++i) {
      if (!disp.valid(j, i)) continue;
      window.clear();
      for (int dy = -radius; dy <= radius; ++dy) {
        const int r = j + dy;
        if (r < 0 || r >= g.height) continue;
        for (int dx = -radius; dx <= radius; ++dx) {
          const int c = ((i + dx) % g.width + g.width) % g.width;
          if (disp.valid(r, c)) window.push_back(disp.at(r, c));
        }
      }
      const auto mid = window.begin() + (window.size() - 1) / 2;
      std::nth_element(window.begin(), mid, window.end());
      out.at(j, i) = *mid;
    }
  });
  return out;
}

DisparityMap match_pair(const EquirectImage& top, const EquirectImage& bottom,
                        const PipelineOptions& opts, CostVolume* raw_volume) {
  CostVolume vol = build_cost_volume(top, bottom, opts.match, ReferenceView::Top);
  if (raw_volume) *raw_volume = vol;
  if (opts.use_sgm) vol = aggregate_sgm(vol, opts.sgm);
  DisparityMap disp = wta_disparity(vol, opts.subpixel);
  if (opts.lr_check) {
    CostVolume other = build_cost_volume(top, bottom, opts.match, ReferenceView::Bottom);
    if (opts.use_sgm) other = aggregate_sgm(other, opts.sgm);
    disp = consistency_check(disp, wta_disparity(other, opts.subpixel), opts.lr_tol_levels,
                             opts.match.step_rad());
  }
  if (opts.median_radius > 0) disp = median_filter(disp, opts.median_radius);
  return disp;
}

}  // namespace sphstereo
