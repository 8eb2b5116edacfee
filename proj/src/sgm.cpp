#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>

#include "sphstereo/error.hpp"
#include "sphstereo/matcher.hpp"
#include "sphstereo/parallel.hpp"

namespace sphstereo {

void SgmParams::validate() const {
  if (!(p1 >= 0.0) || !(p2 >= p1)) throw DomainError("SGM penalties need p2 >= p1 >= 0");
}

int SgmParams::path_count() const { return std::popcount(paths & kAllPaths); }

PathStep path_step(SgmPath path) {
  switch (path) {
    case kPathLeftToRight: return {0, 1};
    case kPathRightToLeft: return {0, -1};
    case kPathTopToBottom: return {1, 0};
    case kPathBottomToTop: return {-1, 0};
    case kPathDownRight: return {1, 1};
    case kPathDownLeft: return {1, -1};
    case kPathUpRight: return {-1, 1};
    case kPathUpLeft: return {-1, -1};
  }
  throw DomainError("unknown SGM path");
}

namespace {

// One recurrence step: out = cost + (best transition - min(prev)).
inline void sgm_step(const float* cost, const float* prev, float* out, int levels, float p1,
                     float p2) {
  float m = prev[0];
  for (int d = 1; d < levels; ++d) m = std::min(m, prev[d]);
  const float jump = m + p2;
  for (int d = 0; d < levels; ++d) {
    float best = prev[d];
    if (d > 0) best = std::min(best, prev[d - 1] + p1);
    if (d + 1 < levels) best = std::min(best, prev[d + 1] + p1);
    best = std::min(best, jump);
    out[d] = cost[d] + (best - m);
  }
}

inline int wrap(int i, int w) {
  i %= w;
  return i < 0 ? i + w : i;
}

// Pixel-major copy of a volume: [row][col][level].
struct PixelMajor {
  int width, height, levels;
  std::vector<float> data;
  float* at(int row, int col) {
    return data.data() + (static_cast<std::size_t>(row) * width + col) * levels;
  }
  const float* at(int row, int col) const {
    return data.data() + (static_cast<std::size_t>(row) * width + col) * levels;
  }
};

PixelMajor to_pixel_major(const CostVolume& vol) {
  PixelMajor pm{vol.grid.width, vol.grid.height, vol.num_levels(),
                std::vector<float>(vol.costs.size())};
  const std::size_t plane = vol.grid.pixel_count();
  for (int d = 0; d < pm.levels; ++d)
    for (std::size_t p = 0; p < plane; ++p) pm.data[p * pm.levels + d] = vol.costs[d * plane + p];
  return pm;
}

inline void add_into(float* sum, const float* l, int levels) {
  for (int d = 0; d < levels; ++d) sum[d] += l[d];
}

void ring_path(const PixelMajor& vol, PixelMajor& sum, int dx, float p1, float p2) {
  const int w = vol.width;
  const int levels = vol.levels;
  parallel_for(0, vol.height, [&](std::ptrdiff_t jj) {
    const int row = static_cast<int>(jj);
    std::vector<float> lap(static_cast<std::size_t>(w) * levels);
    std::vector<float> seam(levels);
    const int first = dx > 0 ? 0 : w - 1;
    for (int n = 0; n < kMaxRingLaps; ++n) {
      for (int t = 0; t < w; ++t) {
        const int col = first + dx * t;
        float* out = lap.data() + static_cast<std::size_t>(col) * levels;
        const float* c = vol.at(row, col);
        if (n == 0 && t == 0) {
          std::copy(c, c + levels, out);
        } else if (t == 0) {
          sgm_step(c, seam.data(), out, levels, p1, p2);
        } else {
          sgm_step(c, lap.data() + static_cast<std::size_t>(col - dx) * levels, out, levels, p1, p2);
        }
      }
      const float* last = lap.data() + static_cast<std::size_t>(first + dx * (w - 1)) * levels;
      if (n > 0 && std::equal(last, last + levels, seam.begin())) break;
      std::copy(last, last + levels, seam.begin());
    }
    for (int i = 0; i < w; ++i)
      add_into(sum.at(row, i), lap.data() + static_cast<std::size_t>(i) * levels, levels);
  });
}

void sweep_path(const PixelMajor& vol, PixelMajor& sum, PathStep step, float p1, float p2) {
  const int w = vol.width;
  const int h = vol.height;
  const int levels = vol.levels;
  const std::size_t row_len = static_cast<std::size_t>(w) * levels;
  std::vector<float> prev(row_len), cur(row_len);
  const int first = step.dy > 0 ? 0 : h - 1;
  for (int t = 0; t < h; ++t) {
    const int row = first + step.dy * t;
    parallel_for(0, w, [&](std::ptrdiff_t ii) {
      const int col = static_cast<int>(ii);
      float* out = cur.data() + static_cast<std::size_t>(col) * levels;
      const float* c = vol.at(row, col);
      if (t == 0) {
        std::copy(c, c + levels, out);
      } else {
        const float* p = prev.data() + static_cast<std::size_t>(wrap(col - step.dx, w)) * levels;
        sgm_step(c, p, out, levels, p1, p2);
      }
      add_into(sum.at(row, col), out, levels);
    });
    std::swap(prev, cur);
  }
}

}  // namespace

CostVolume aggregate_sgm(const CostVolume& vol, const SgmParams& params) {
  params.validate();
  const PixelMajor costs = to_pixel_major(vol);
  PixelMajor sum{costs.width, costs.height, costs.levels, std::vector<float>(costs.data.size(), 0.0f)};
  const float p1 = static_cast<float>(params.p1);
  const float p2 = static_cast<float>(params.p2);
  // Fixed path order keeps the per-cell summation order schedule-independent.
  for (std::uint32_t bit = 1; bit <= kPathUpLeft; bit <<= 1) {
    if (!(params.paths & bit)) continue;
    const PathStep step = path_step(static_cast<SgmPath>(bit));
    if (step.dy == 0) ring_path(costs, sum, step.dx, p1, p2);
    else sweep_path(costs, sum, step, p1, p2);
  }
  CostVolume out(vol.grid, vol.levels);
  const std::size_t plane = vol.grid.pixel_count();
  for (std::size_t p = 0; p < plane; ++p)
    for (int d = 0; d < sum.levels; ++d) out.costs[d * plane + p] = sum.data[p * sum.levels + d];
  return out;
}

}  // namespace sphstereo
