#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "sphstereo/interp.hpp"
#include "sphstereo/types.hpp"

namespace sphstereo {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Vertically stacked rig. The top camera is the reference view and sits at
// the origin; the bottom camera sits at (0, 0, -baseline_m).
struct CameraRig {
  enum class Reference { Top };

  double baseline_m = 0.2;
  Reference reference = Reference::Top;

  explicit CameraRig(double baseline = 0.2) : baseline_m(baseline) { validate(); }
  void validate() const;
  Vec3 top_center() const { return {0.0, 0.0, 0.0}; }
  Vec3 bottom_center() const { return {0.0, 0.0, -baseline_m}; }
};

// Viewing direction. polar_rad is measured from the south pole (-z):
// 0 looks straight down, pi straight up.
struct SphericalDirection {
  double longitude_rad = 0.0;
  double polar_rad = 0.0;

  void validate() const;
};

struct PixelCoord {
  double u = 0.0;  // continuous column
  double v = 0.0;  // continuous row
};

// Continuous raster coordinate to direction. Integer pixel (i, j) has its
// center at (i + 0.5, j + 0.5). v == height is accepted as the south-pole edge.
SphericalDirection pixel_to_direction(const EquirectGrid& grid, double u, double v);
PixelCoord direction_to_pixel(const EquirectGrid& grid, const SphericalDirection& dir);

// Direction of pixel center (col, row).
SphericalDirection pixel_center_direction(const EquirectGrid& grid, int col, int row);

// Unit vector in the rig frame: +z up, longitude 0 along +x.
Vec3 direction_to_vector(const SphericalDirection& dir);
SphericalDirection vector_to_direction(const Vec3& v);

// Depth |r_t| seen from the top camera for angular disparity d at top polar
// angle polar_t. Returns nullopt for d <= 0 (point at infinity). Throws
// DomainError when polar_t is not inside (0, pi) or d >= pi - polar_t.
std::optional<double> disparity_to_depth(const CameraRig& rig, double polar_t, double d);

// Inverse of disparity_to_depth. Throws DomainError on the pole axis or for
// non-positive depth.
double depth_to_disparity(const CameraRig& rig, double polar_t, double depth);

// Polar angle of every row center, strictly decreasing with row index.
std::vector<double> polar_angle_map(const EquirectGrid& grid);

// Pull-resamples the image so that output direction w shows input direction
// R^T w. Longitude wraps; taps beyond a pole continue on the far meridian.
EquirectImage rotate_equirect(const EquirectImage& image, const Mat3& rotation,
                              const InterpKernel& kernel = InterpKernel::lanczos());

struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<std::array<std::uint8_t, 3>> colors;  // empty when uncolored

  bool has_color() const { return !colors.empty(); }
  std::size_t size() const { return positions.size(); }
};

PointCloud depth_to_pointcloud(const EquirectGrid& grid, const DepthMap& depth,
                               const EquirectImage* color = nullptr);

std::uint8_t quantize_unit(float value);

}  // namespace sphstereo
