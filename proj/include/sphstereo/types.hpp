#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "sphstereo/error.hpp"

namespace sphstereo {

inline constexpr double kPi = 3.14159265358979323846;

// Raster dimensions of an equirectangular image. Columns span longitude,
// rows span polar angle (row 0 at the north pole edge).
struct EquirectGrid {
  int width = 1024;
  int height = 512;

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  void validate() const {
    if (width < 2 || height < 2)
      throw DomainError("equirect grid must be at least 2x2, got " +
                        std::to_string(width) + "x" + std::to_string(height));
  }
  friend bool operator==(const EquirectGrid&, const EquirectGrid&) = default;
};

// Row-major interleaved raster, samples nominally in [0, 1].
struct EquirectImage {
  EquirectGrid grid;
  int channels = 1;
  std::vector<float> samples;

  EquirectImage() = default;
  EquirectImage(EquirectGrid g, int c, float fill = 0.0f)
      : grid(g), channels(c), samples(g.pixel_count() * c, fill) {}

  float& at(int row, int col, int ch = 0) {
    return samples[(static_cast<std::size_t>(row) * grid.width + col) * channels + ch];
  }
  float at(int row, int col, int ch = 0) const {
    return samples[(static_cast<std::size_t>(row) * grid.width + col) * channels + ch];
  }

  void validate() const {
    grid.validate();
    if (channels < 1) throw DomainError("image must have at least one channel");
    if (samples.size() != grid.pixel_count() * channels)
      throw DomainError("image sample count does not match grid");
    for (float s : samples)
      if (!std::isfinite(s)) throw DomainError("image contains non-finite samples");
  }
};

// Per-pixel scalar field with NaN as the invalid sentinel. The tag keeps
// depth (meters) and disparity (radians) maps from being mixed up.
template <class Tag>
struct FieldMap {
  EquirectGrid grid;
  std::vector<double> values;

  FieldMap() = default;
  explicit FieldMap(EquirectGrid g, double fill = invalid())
      : grid(g), values(g.pixel_count(), fill) {}

  static constexpr double invalid() { return std::numeric_limits<double>::quiet_NaN(); }
  static bool is_valid(double v) { return !std::isnan(v); }

  double& at(int row, int col) {
    return values[static_cast<std::size_t>(row) * grid.width + col];
  }
  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * grid.width + col];
  }
  bool valid(int row, int col) const { return is_valid(at(row, col)); }
  std::size_t valid_count() const {
    std::size_t n = 0;
    for (double v : values) n += is_valid(v) ? 1 : 0;
    return n;
  }
};

struct DepthTag {};
struct DisparityTag {};
using DepthMap = FieldMap<DepthTag>;
using DisparityMap = FieldMap<DisparityTag>;

// Boolean per-pixel mask (1 = set).
struct Mask {
  EquirectGrid grid;
  std::vector<std::uint8_t> values;

  Mask() = default;
  explicit Mask(EquirectGrid g, std::uint8_t fill = 0)
      : grid(g), values(g.pixel_count(), fill) {}

  std::uint8_t& at(int row, int col) {
    return values[static_cast<std::size_t>(row) * grid.width + col];
  }
  std::uint8_t at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * grid.width + col];
  }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto v : values) n += v ? 1 : 0;
    return n;
  }
};

}  // namespace sphstereo
