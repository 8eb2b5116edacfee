#include "sphstereo/costvol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "sphstereo/error.hpp"
#include "sphstereo/geom.hpp"
#include "sphstereo/imageio.hpp"
#include "sphstereo/parallel.hpp"

namespace sphstereo {

void MatchConfig::validate() const {
  if (!(step_deg > 0.0) || !std::isfinite(step_deg))
    throw ConfigError("step_deg", "must be positive");
  if (num_levels < 1) throw ConfigError("num_levels", "must be at least 1");
  if (step_deg * num_levels >= 180.0)
    throw ConfigError("num_levels", "step_deg * num_levels must stay below 180 degrees");
  if (window_radius < 1) throw ConfigError("window_radius", "must be at least 1");
  if (taps < 1 || taps % 2 == 0) throw ConfigError("taps", "must be odd");
}

double MatchConfig::step_rad() const { return step_deg * kPi / 180.0; }

MatchConfig MatchConfig::from_run_config(const RunConfig& cfg) {
  MatchConfig m;
  m.step_deg = cfg.step_deg;
  m.num_levels = cfg.num_levels;
  m.metric = cfg.cost_metric;
  m.window_radius = cfg.window_radius;
  m.polar_adaptive = cfg.polar_adaptive;
  return m;
}

void CostVolume::validate() const {
  grid.validate();
  if (levels.empty() || levels[0] != 0.0) throw DomainError("cost volume must start at level 0");
  for (std::size_t k = 1; k < levels.size(); ++k)
    if (!(levels[k] > levels[k - 1])) throw DomainError("levels must be strictly increasing");
  if (costs.size() != levels.size() * grid.pixel_count())
    throw DomainError("cost array size does not match volume shape");
  for (float c : costs)
    if (!std::isfinite(c) || c < 0.0f) throw DomainError("costs must be finite and >= 0");
}

double polar_shift_rows(const EquirectGrid& grid, double delta_polar) {
  return delta_polar * grid.height / kPi;
}

EquirectImage shift_vertical(const EquirectImage& image, double delta_polar,
                             const InterpKernel& kernel) {
  if (!std::isfinite(delta_polar) || std::abs(delta_polar) >= kPi)
    throw DomainError("vertical shift must satisfy |delta| < pi");
  if (kernel.kind == InterpKernel::Kind::Lanczos && kernel.taps % 2 == 0)
    throw DomainError("shift filter needs an odd tap count");
  const EquirectGrid& g = image.grid;
  const TapWeights taps = tap_weights(kernel, -polar_shift_rows(g, delta_polar));
  const std::size_t row_len = static_cast<std::size_t>(g.width) * image.channels;
  EquirectImage out(g, image.channels);
  for (int j = 0; j < g.height; ++j) {
    float* dst = out.samples.data() + j * row_len;
    if (taps.weights.size() == 1) {
      const int src = std::clamp(j + taps.first, 0, g.height - 1);
      std::memcpy(dst, image.samples.data() + src * row_len, row_len * sizeof(float));
      continue;
    }
    for (std::size_t x = 0; x < row_len; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < taps.weights.size(); ++k) {
        const int src = std::clamp(j + taps.first + static_cast<int>(k), 0, g.height - 1);
        acc += taps.weights[k] * image.samples[src * row_len + x];
      }
      dst[x] = static_cast<float>(acc);
    }
  }
  return out;
}

int window_half_width(const EquirectGrid& grid, int row, int radius, bool polar_adaptive) {
  if (!polar_adaptive) return radius;
  const double polar = kPi * (1.0 - (row + 0.5) / grid.height);
  const double s = std::max(std::sin(polar), std::sin(kAdaptivePolarMin));
  const int widened = static_cast<int>(std::ceil(radius / s));
  return std::min(widened, 4 * radius);
}

EquirectImage to_luma(const EquirectImage& image) {
  if (image.channels == 1) return image;
  if (image.channels < 3) throw DomainError("luma conversion needs 1 or 3+ channels");
  EquirectImage out(image.grid, 1);
  for (std::size_t p = 0; p < image.grid.pixel_count(); ++p) {
    const float* px = image.samples.data() + p * image.channels;
    out.samples[p] = 0.299f * px[0] + 0.587f * px[1] + 0.114f * px[2];
  }
  return out;
}

namespace detail {

float zncc_cost(double n, double sx, double sy, double sxx, double syy, double sxy) {
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double eps = 1e-12 * n;
  if (vx <= eps || vy <= eps) return 1.0f;
  const double zncc = (sxy - sx * sy / n) / std::sqrt(vx * vy);
  return static_cast<float>(std::max(0.0, 1.0 - zncc));
}

}  // namespace detail

namespace {

inline int wrap(int i, int w) {
  i %= w;
  return i < 0 ? i + w : i;
}

std::vector<std::uint32_t> census_transform(const EquirectImage& luma) {
  const EquirectGrid& g = luma.grid;
  std::vector<std::uint32_t> out(g.pixel_count());
  for (int j = 0; j < g.height; ++j) {
    for (int i = 0; i < g.width; ++i) {
      const float center = luma.at(j, i);
      std::uint32_t bits = 0;
      for (int dy = -kCensusRadius; dy <= kCensusRadius; ++dy) {
        const int r = std::clamp(j + dy, 0, g.height - 1);
        for (int dx = -kCensusRadius; dx <= kCensusRadius; ++dx) {
          if (dy == 0 && dx == 0) continue;
          bits = (bits << 1) | (luma.at(r, wrap(i + dx, g.width)) < center ? 1u : 0u);
        }
      }
      out[static_cast<std::size_t>(j) * g.width + i] = bits;
    }
  }
  return out;
}

// Sum of row[(start + t) mod W] for t in [0, len), from an inclusive prefix
// table of length W + 1.
long ring_sum(const std::vector<long>& prefix, int w, int start, int len) {
  const long total = prefix[w];
  long sum = static_cast<long>(len / w) * total;
  len %= w;
  const int a = wrap(start, w);
  const int b = a + len;
  if (b <= w) return sum + prefix[b] - prefix[a];
  return sum + (total - prefix[a]) + prefix[b - w];
}

void census_level(const std::vector<std::uint32_t>& ref_census,
                  const std::vector<std::uint32_t>& tgt_census, const EquirectGrid& g,
                  const std::vector<int>& half_widths, int radius, float* slice) {
  const int w = g.width;
  std::vector<std::vector<long>> prefix(g.height, std::vector<long>(w + 1, 0));
  for (int j = 0; j < g.height; ++j) {
    const std::size_t base = static_cast<std::size_t>(j) * w;
    for (int i = 0; i < w; ++i)
      prefix[j][i + 1] = prefix[j][i] + std::popcount(ref_census[base + i] ^ tgt_census[base + i]);
  }
  for (int j = 0; j < g.height; ++j) {
    const int hw = half_widths[j];
    const int n = (2 * radius + 1) * (2 * hw + 1);
    for (int i = 0; i < w; ++i) {
      long sum = 0;
      for (int dy = -radius; dy <= radius; ++dy) {
        const int r = std::clamp(j + dy, 0, g.height - 1);
        sum += ring_sum(prefix[r], w, i - hw, 2 * hw + 1);
      }
      slice[static_cast<std::size_t>(j) * w + i] = detail::census_cost(sum, n);
    }
  }
}

void sad_level(const EquirectImage& ref, const EquirectImage& tgt,
               const std::vector<int>& half_widths, int radius, float* slice) {
  const EquirectGrid& g = ref.grid;
  const int w = g.width;
  const int ch = ref.channels;
  std::vector<double> pixel(g.pixel_count());
  for (std::size_t p = 0; p < g.pixel_count(); ++p) {
    double s = 0.0;
    for (int c = 0; c < ch; ++c)
      s += std::abs(static_cast<double>(ref.samples[p * ch + c]) -
                    static_cast<double>(tgt.samples[p * ch + c]));
    pixel[p] = s / ch;
  }
  for (int j = 0; j < g.height; ++j) {
    const int hw = half_widths[j];
    const int n = (2 * radius + 1) * (2 * hw + 1);
    for (int i = 0; i < w; ++i) {
      double sum = 0.0;
      for (int dy = -radius; dy <= radius; ++dy) {
        const double* row = pixel.data() + static_cast<std::size_t>(std::clamp(j + dy, 0, g.height - 1)) * w;
        for (int dx = -hw; dx <= hw; ++dx) sum += row[wrap(i + dx, w)];
      }
      slice[static_cast<std::size_t>(j) * w + i] = detail::sad_cost(sum, n);
    }
  }
}

void zncc_level(const EquirectImage& ref, const EquirectImage& tgt,
                const std::vector<int>& half_widths, int radius, float* slice) {
  const EquirectGrid& g = ref.grid;
  const int w = g.width;
  for (int j = 0; j < g.height; ++j) {
    const int hw = half_widths[j];
    const double n = (2.0 * radius + 1) * (2.0 * hw + 1);
    for (int i = 0; i < w; ++i) {
      double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      for (int dy = -radius; dy <= radius; ++dy) {
        const int r = std::clamp(j + dy, 0, g.height - 1);
        for (int dx = -hw; dx <= hw; ++dx) {
          const int c = wrap(i + dx, w);
          const double x = ref.at(r, c);
          const double y = tgt.at(r, c);
          sx += x;
          sy += y;
          sxx += x * x;
          syy += y * y;
          sxy += x * y;
        }
      }
      slice[static_cast<std::size_t>(j) * w + i] = detail::zncc_cost(n, sx, sy, sxx, syy, sxy);
    }
  }
}

}  // namespace

CostVolume build_cost_volume(const EquirectImage& top, const EquirectImage& bottom,
                             const MatchConfig& cfg, ReferenceView ref_view) {
  cfg.validate();
  top.validate();
  bottom.validate();
  if (!(top.grid == bottom.grid)) throw DomainError("top and bottom grids differ");
  if (top.channels != bottom.channels) throw DomainError("top and bottom channel counts differ");

  const EquirectGrid& g = top.grid;
  const bool use_luma = cfg.metric != CostMetric::SAD;
  const EquirectImage& ref_raw = ref_view == ReferenceView::Top ? top : bottom;
  const EquirectImage& tgt_raw = ref_view == ReferenceView::Top ? bottom : top;
  const double sign = ref_view == ReferenceView::Top ? 1.0 : -1.0;
  const EquirectImage ref = use_luma ? to_luma(ref_raw) : ref_raw;
  const EquirectImage tgt = use_luma ? to_luma(tgt_raw) : tgt_raw;

  std::vector<double> levels(cfg.num_levels);
  for (int k = 0; k < cfg.num_levels; ++k) levels[k] = cfg.level_angle(k);
  CostVolume vol(g, levels);

  std::vector<int> half_widths(g.height);
  for (int j = 0; j < g.height; ++j)
    half_widths[j] = window_half_width(g, j, cfg.window_radius, cfg.polar_adaptive);

  std::vector<std::uint32_t> ref_census;
  if (cfg.metric == CostMetric::CENSUS) ref_census = census_transform(ref);

  const InterpKernel kernel = InterpKernel::lanczos(cfg.taps);
  parallel_for(0, cfg.num_levels, [&](std::ptrdiff_t kk) {
    const int k = static_cast<int>(kk);
    const EquirectImage shifted = shift_vertical(tgt, sign * levels[k], kernel);
    float* slice = vol.slice(k);
    switch (cfg.metric) {
      case CostMetric::CENSUS:
        census_level(ref_census, census_transform(shifted), g, half_widths, cfg.window_radius,
                     slice);
        break;
      case CostMetric::SAD:
        sad_level(ref, shifted, half_widths, cfg.window_radius, slice);
        break;
      case CostMetric::ZNCC:
        zncc_level(ref, shifted, half_widths, cfg.window_radius, slice);
        break;
    }
  });
  return vol;
}

void write_cost_volume(const CostVolume& vol, double step_deg, const std::string& path) {
  char header[128];
  std::snprintf(header, sizeof(header), "CVOL1 %d %d %d %.17g\n", vol.grid.width,
                vol.grid.height, vol.num_levels(), step_deg);
  const std::size_t hlen = std::strlen(header);
  Bytes out(hlen + vol.costs.size() * 4);
  std::memcpy(out.data(), header, hlen);
  for (std::size_t k = 0; k < vol.costs.size(); ++k) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(vol.costs[k]);
    for (int b = 0; b < 4; ++b) out[hlen + 4 * k + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  write_file_bytes(path, out);
}

}  // namespace sphstereo
