// Reference matcher: computes every (pixel, level) window cost straight from
// the definitions, without the slice-wise machinery of build_cost_volume.

#include <algorithm>
#include <bit>
#include <cmath>

#include "sphstereo/error.hpp"
#include "sphstereo/matcher.hpp"

namespace sphstereo {
namespace {

int ring(int i, int w) { return ((i % w) + w) % w; }
int clamp_row(int j, int h) { return std::min(std::max(j, 0), h - 1); }

// Target resampled at polar offset `delta`, evaluated tap by tap.
std::vector<float> resample_target(const EquirectImage& tgt, double delta, int taps) {
  const EquirectGrid& g = tgt.grid;
  const TapWeights tw = tap_weights(InterpKernel::lanczos(taps), -delta * g.height / kPi);
  const int ch = tgt.channels;
  std::vector<float> out(tgt.samples.size());
  for (int j = 0; j < g.height; ++j)
    for (int i = 0; i < g.width; ++i)
      for (int c = 0; c < ch; ++c) {
        if (tw.weights.size() == 1) {
          out[(static_cast<std::size_t>(j) * g.width + i) * ch + c] =
              tgt.at(clamp_row(j + tw.first, g.height), i, c);
          continue;
        }
        double acc = 0.0;
        for (std::size_t k = 0; k < tw.weights.size(); ++k)
          acc += tw.weights[k] * tgt.at(clamp_row(j + tw.first + static_cast<int>(k), g.height), i, c);
        out[(static_cast<std::size_t>(j) * g.width + i) * ch + c] = static_cast<float>(acc);
      }
  return out;
}

// Census signature as a 24-entry comparison vector packed low bit first.
std::uint32_t census_at(const float* img, const EquirectGrid& g, int j, int i) {
  const float center = img[static_cast<std::size_t>(j) * g.width + i];
  std::uint32_t bits = 0;
  int bit = 0;
  for (int dy = -kCensusRadius; dy <= kCensusRadius; ++dy)
    for (int dx = -kCensusRadius; dx <= kCensusRadius; ++dx) {
      if (dy == 0 && dx == 0) continue;
      const float v = img[static_cast<std::size_t>(clamp_row(j + dy, g.height)) * g.width +
                          ring(i + dx, g.width)];
      if (v < center) bits |= 1u << bit;
      ++bit;
    }
  return bits;
}

}  // namespace

DisparityMap match_bruteforce(const EquirectImage& top, const EquirectImage& bottom,
                              const MatchConfig& cfg) {
  cfg.validate();
  top.validate();
  bottom.validate();
  if (!(top.grid == bottom.grid)) throw DomainError("top and bottom grids differ");
  if (top.channels != bottom.channels) throw DomainError("top and bottom channel counts differ");
  const EquirectGrid& g = top.grid;
  const bool luma = cfg.metric != CostMetric::SAD;
  const EquirectImage ref = luma ? to_luma(top) : top;
  const EquirectImage tgt = luma ? to_luma(bottom) : bottom;
  const int ch = ref.channels;
  const int r = cfg.window_radius;

  std::vector<float> best_cost(g.pixel_count(), 0.0f);
  std::vector<int> best_level(g.pixel_count(), 0);
  std::vector<std::uint32_t> ref_census;
  std::vector<std::uint32_t> tgt_census(g.pixel_count());
  if (cfg.metric == CostMetric::CENSUS) {
    ref_census.resize(g.pixel_count());
    for (int j = 0; j < g.height; ++j)
      for (int i = 0; i < g.width; ++i)
        ref_census[static_cast<std::size_t>(j) * g.width + i] = census_at(ref.samples.data(), g, j, i);
  }

  for (int k = 0; k < cfg.num_levels; ++k) {
    const std::vector<float> shifted = resample_target(tgt, cfg.level_angle(k), cfg.taps);
    if (cfg.metric == CostMetric::CENSUS)
      for (int j = 0; j < g.height; ++j)
        for (int i = 0; i < g.width; ++i)
          tgt_census[static_cast<std::size_t>(j) * g.width + i] = census_at(shifted.data(), g, j, i);

    for (int j = 0; j < g.height; ++j) {
      const int hw = window_half_width(g, j, r, cfg.polar_adaptive);
      const int n = (2 * r + 1) * (2 * hw + 1);
      for (int i = 0; i < g.width; ++i) {
        double sad = 0.0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        long hamming = 0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -hw; dx <= hw; ++dx) {
            const std::size_t q =
                static_cast<std::size_t>(clamp_row(j + dy, g.height)) * g.width + ring(i + dx, g.width);
            switch (cfg.metric) {
              case CostMetric::CENSUS:
                hamming += std::popcount(ref_census[q] ^ tgt_census[q]);
                break;
              case CostMetric::SAD: {
                double s = 0.0;
                for (int c = 0; c < ch; ++c)
                  s += std::abs(static_cast<double>(ref.samples[q * ch + c]) -
                                static_cast<double>(shifted[q * ch + c]));
                sad += s / ch;
                break;
              }
              case CostMetric::ZNCC: {
                const double x = ref.samples[q];
                const double y = shifted[q];
                sx += x;
                sy += y;
                sxx += x * x;
                syy += y * y;
                sxy += x * y;
                break;
              }
            }
          }
        }
        float cost = 0.0f;
        switch (cfg.metric) {
          case CostMetric::CENSUS: cost = detail::census_cost(hamming, n); break;
          case CostMetric::SAD: cost = detail::sad_cost(sad, n); break;
          case CostMetric::ZNCC: cost = detail::zncc_cost(n, sx, sy, sxx, syy, sxy); break;
        }
        const std::size_t p = static_cast<std::size_t>(j) * g.width + i;
        if (k == 0 || cost < best_cost[p]) {
          best_cost[p] = cost;
          best_level[p] = k;
        }
      }
    }
  }

  DisparityMap out(g);
  for (std::size_t p = 0; p < g.pixel_count(); ++p) out.values[p] = cfg.level_angle(best_level[p]);
  return out;
}

}  // namespace sphstereo
