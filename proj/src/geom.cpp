#include "sphstereo/geom.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <string>

#include "sphstereo/error.hpp"
#include "sphstereo/parallel.hpp"

namespace sphstereo {

void CameraRig::validate() const {
  if (!(baseline_m > 0.0) || !std::isfinite(baseline_m))
    throw DomainError("baseline must be positive and finite");
}

void SphericalDirection::validate() const {
  if (!std::isfinite(longitude_rad) || !std::isfinite(polar_rad) ||
      longitude_rad < -kPi || longitude_rad >= kPi || polar_rad < 0.0 || polar_rad > kPi)
    throw DomainError("spherical direction out of range");
}

SphericalDirection pixel_to_direction(const EquirectGrid& grid, double u, double v) {
  grid.validate();
  if (!std::isfinite(u) || !std::isfinite(v) || u < 0.0 || u >= grid.width ||
      v < 0.0 || v > grid.height)
    throw DomainError("pixel coordinate (" + std::to_string(u) + ", " +
                      std::to_string(v) + ") outside the raster");
  SphericalDirection dir;
  dir.longitude_rad = 2.0 * kPi * u / grid.width - kPi;
  dir.polar_rad = kPi * (1.0 - v / grid.height);
  return dir;
}

PixelCoord direction_to_pixel(const EquirectGrid& grid, const SphericalDirection& dir) {
  PixelCoord p;
  double u = (dir.longitude_rad + kPi) / (2.0 * kPi) * grid.width;
  u = std::fmod(u, static_cast<double>(grid.width));
  if (u < 0.0) u += grid.width;
  if (u >= grid.width) u -= grid.width;
  p.u = u;
  p.v = grid.height * (1.0 - dir.polar_rad / kPi);
  return p;
}

SphericalDirection pixel_center_direction(const EquirectGrid& grid, int col, int row) {
  return pixel_to_direction(grid, col + 0.5, row + 0.5);
}

Vec3 direction_to_vector(const SphericalDirection& dir) {
  const double s = std::sin(dir.polar_rad);
  return {s * std::cos(dir.longitude_rad), s * std::sin(dir.longitude_rad),
          -std::cos(dir.polar_rad)};
}

SphericalDirection vector_to_direction(const Vec3& v) {
  SphericalDirection dir;
  double lon = std::atan2(v.y(), v.x());
  if (lon >= kPi) lon -= 2.0 * kPi;
  dir.longitude_rad = lon;
  dir.polar_rad = std::atan2(std::hypot(v.x(), v.y()), -v.z());
  return dir;
}

std::optional<double> disparity_to_depth(const CameraRig& rig, double polar_t, double d) {
  rig.validate();
  if (!std::isfinite(polar_t) || !(polar_t > 0.0 && polar_t < kPi))
    throw DomainError("polar angle must lie strictly inside (0, pi)");
  if (std::isnan(d)) throw DomainError("disparity is NaN");
  if (d <= 0.0) return std::nullopt;
  if (d >= kPi - polar_t)
    throw DomainError("disparity " + std::to_string(d) +
                      " exceeds the admissible range for this polar angle");
  return rig.baseline_m * (std::sin(polar_t) / std::tan(d) + std::cos(polar_t));
}

double depth_to_disparity(const CameraRig& rig, double polar_t, double depth) {
  rig.validate();
  if (!std::isfinite(polar_t) || !(polar_t > 0.0 && polar_t < kPi))
    throw DomainError("correspondence undefined on the pole axis");
  if (!(depth > 0.0) || !std::isfinite(depth))
    throw DomainError("depth must be positive and finite");
  const double horizontal = depth * std::sin(polar_t);
  return std::atan2(horizontal, depth * std::cos(polar_t) - rig.baseline_m) - polar_t;
}

std::vector<double> polar_angle_map(const EquirectGrid& grid) {
  grid.validate();
  std::vector<double> polar(grid.height);
  for (int j = 0; j < grid.height; ++j)
    polar[j] = pixel_to_direction(grid, 0.0, j + 0.5).polar_rad;
  return polar;
}

namespace {

void check_rotation(const Mat3& r) {
  if (!r.allFinite()) throw DomainError("rotation has non-finite entries");
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > 1e-9 || std::abs(r.determinant() - 1.0) > 1e-9)
    throw DomainError("rotation must be orthonormal with determinant +1");
}

// Horizontal interpolation of one image row at continuous column index x.
void sample_row(const EquirectImage& img, const InterpKernel& kernel, int row, double x,
                double weight, std::vector<double>& acc) {
  const int w = img.grid.width;
  const TapWeights taps = tap_weights(kernel, x);
  for (std::size_t k = 0; k < taps.weights.size(); ++k) {
    int col = (taps.first + static_cast<int>(k)) % w;
    if (col < 0) col += w;
    const double tw = weight * taps.weights[k];
    for (int c = 0; c < img.channels; ++c) acc[c] += tw * img.at(row, col, c);
  }
}

}  // namespace

EquirectImage rotate_equirect(const EquirectImage& image, const Mat3& rotation,
                              const InterpKernel& kernel) {
  image.validate();
  check_rotation(rotation);
  const EquirectGrid& g = image.grid;
  const Mat3 inverse = rotation.transpose();
  EquirectImage out(g, image.channels);

  parallel_for(0, g.height, [&](std::ptrdiff_t jj) {
    const int j = static_cast<int>(jj);
    std::vector<double> acc(image.channels);
    for (int i = 0; i < g.width; ++i) {
      const Vec3 src = inverse * direction_to_vector(pixel_center_direction(g, i, j));
      const PixelCoord p = direction_to_pixel(g, vector_to_direction(src));
      const double x = p.u - 0.5;
      const double y = p.v - 0.5;
      std::fill(acc.begin(), acc.end(), 0.0);
      const TapWeights rows = tap_weights(kernel, y);
      for (std::size_t k = 0; k < rows.weights.size(); ++k) {
        int row = rows.first + static_cast<int>(k);
        double col_x = x;
        if (row < 0) {
          row = -1 - row;
          col_x = x + 0.5 * g.width;
        } else if (row >= g.height) {
          row = 2 * g.height - 1 - row;
          col_x = x + 0.5 * g.width;
        }
        row = std::clamp(row, 0, g.height - 1);
        sample_row(image, kernel, row, col_x, rows.weights[k], acc);
      }
      for (int c = 0; c < image.channels; ++c)
        out.at(j, i, c) = static_cast<float>(acc[c]);
    }
  });
  return out;
}

std::uint8_t quantize_unit(float value) {
  const double scaled = std::floor(static_cast<double>(value) * 255.0 + 0.5);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

PointCloud depth_to_pointcloud(const EquirectGrid& grid, const DepthMap& depth,
                               const EquirectImage* color) {
  if (!(depth.grid == grid)) throw DomainError("depth map grid does not match");
  if (color && !(color->grid == grid)) throw DomainError("color image grid does not match");
  PointCloud cloud;
  for (int j = 0; j < grid.height; ++j) {
    for (int i = 0; i < grid.width; ++i) {
      const double d = depth.at(j, i);
      if (!DepthMap::is_valid(d)) continue;
      cloud.positions.push_back(d * direction_to_vector(pixel_center_direction(grid, i, j)));
      if (color) {
        std::array<std::uint8_t, 3> rgb{};
        for (int c = 0; c < 3; ++c)
          rgb[c] = quantize_unit(color->at(j, i, color->channels >= 3 ? c : 0));
        cloud.colors.push_back(rgb);
      }
    }
  }
  return cloud;
}

}  // namespace sphstereo
