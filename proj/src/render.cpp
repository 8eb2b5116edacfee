#include "sphstereo/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sphstereo/error.hpp"
#include "sphstereo/parallel.hpp"

namespace sphstereo {
namespace {

constexpr double kRayEpsilon = 1e-9;
constexpr double kCheckerSharpness = 1.5;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double lattice_value(std::uint64_t seed, std::int64_t i, std::int64_t j) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(i));
  h = splitmix64(h ^ static_cast<std::uint64_t>(j));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::optional<double> intersect(const Plane& pl, const Vec3& o, const Vec3& d) {
  const double denom = d.dot(pl.normal);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const double t = (pl.point - o).dot(pl.normal) / denom;
  if (t > kRayEpsilon) return t;
  return std::nullopt;
}

std::optional<double> intersect(const Sphere& sp, const Vec3& o, const Vec3& d) {
  const Vec3 oc = o - sp.center;
  const double b = oc.dot(d);
  const double c = oc.squaredNorm() - sp.radius * sp.radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  // Numerically stable pair of roots.
  const double q = b > 0.0 ? -b - root : -b + root;
  double t0 = q, t1 = q != 0.0 ? c / q : q;
  if (t0 > t1) std::swap(t0, t1);
  if (t0 > kRayEpsilon) return t0;
  if (t1 > kRayEpsilon) return t1;
  return std::nullopt;
}

std::optional<double> intersect(const AxisBox& box, const Vec3& o, const Vec3& d) {
  double tnear = -std::numeric_limits<double>::infinity();
  double tfar = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < box.min[a] || o[a] > box.max[a]) return std::nullopt;
      continue;
    }
    double t0 = (box.min[a] - o[a]) / d[a];
    double t1 = (box.max[a] - o[a]) / d[a];
    if (t0 > t1) std::swap(t0, t1);
    tnear = std::max(tnear, t0);
    tfar = std::min(tfar, t1);
  }
  if (tnear > tfar) return std::nullopt;
  if (tnear > kRayEpsilon) return tnear;
  if (tfar > kRayEpsilon) return tfar;
  return std::nullopt;
}

// Surface coordinates (meters) used to evaluate 2-D textures.
std::array<double, 2> surface_coords(const Shape& shape, const Vec3& p) {
  return std::visit(
      Overloaded{
          [&](const Plane& pl) -> std::array<double, 2> {
            const Vec3 helper = std::abs(pl.normal.z()) > 0.9 ? Vec3(1, 0, 0) : Vec3(0, 0, 1);
            const Vec3 u = pl.normal.cross(helper).normalized();
            const Vec3 v = pl.normal.cross(u);
            const Vec3 rel = p - pl.point;
            return {rel.dot(u), rel.dot(v)};
          },
          [&](const Sphere& sp) -> std::array<double, 2> {
            const Vec3 q = (p - sp.center) / sp.radius;
            const double lon = std::atan2(q.y(), q.x());
            const double polar = std::atan2(std::hypot(q.x(), q.y()), -q.z());
            return {sp.radius * lon, sp.radius * polar};
          },
          [&](const AxisBox& box) -> std::array<double, 2> {
            int face = 0;
            double best = std::numeric_limits<double>::infinity();
            for (int a = 0; a < 3; ++a) {
              const double dist = std::min(std::abs(p[a] - box.min[a]), std::abs(p[a] - box.max[a]));
              if (dist < best) {
                best = dist;
                face = a;
              }
            }
            const int a0 = face == 0 ? 1 : 0;
            const int a1 = face == 2 ? 1 : 2;
            return {p[a0], p[a1]};
          }},
      shape);
}

double soft_square(double x, double scale) {
  return std::tanh(kCheckerSharpness * std::sin(kPi * x / scale)) / std::tanh(kCheckerSharpness);
}

}  // namespace

double value_noise(std::uint64_t seed, double s, double t) {
  const double fs = std::floor(s);
  const double ft = std::floor(t);
  const auto i = static_cast<std::int64_t>(fs);
  const auto j = static_cast<std::int64_t>(ft);
  const double a = s - fs;
  const double b = t - ft;
  const double v00 = lattice_value(seed, i, j);
  const double v10 = lattice_value(seed, i + 1, j);
  const double v01 = lattice_value(seed, i, j + 1);
  const double v11 = lattice_value(seed, i + 1, j + 1);
  return (1 - a) * (1 - b) * v00 + a * (1 - b) * v10 + (1 - a) * b * v01 + a * b * v11;
}

void Scene::validate() const {
  for (const auto& prim : primitives) {
    std::visit(Overloaded{[](const Plane& pl) {
                            if (std::abs(pl.normal.norm() - 1.0) > 1e-9)
                              throw DomainError("plane normal must be unit length");
                          },
                          [](const Sphere& sp) {
                            if (!(sp.radius > 0.0)) throw DomainError("sphere radius must be > 0");
                          },
                          [](const AxisBox& box) {
                            if (!(box.min.array() < box.max.array()).all())
                              throw DomainError("box min must be below max componentwise");
                          }},
               prim.shape);
  }
}

std::optional<Hit> cast_ray(const Scene& scene, const Vec3& origin, const Vec3& dir) {
  std::optional<Hit> best;
  for (std::size_t k = 0; k < scene.primitives.size(); ++k) {
    const auto t = std::visit([&](const auto& s) { return intersect(s, origin, dir); },
                              scene.primitives[k].shape);
    if (t && (!best || *t < best->distance)) best = Hit{*t, origin + *t * dir, k};
  }
  return best;
}

Color shade(const Primitive& prim, const Vec3& point) {
  const auto st = surface_coords(prim.shape, point);
  return std::visit(
      Overloaded{[&](const CheckerTexture& tex) -> Color {
                   const double f =
                       0.5 + 0.5 * soft_square(st[0], tex.scale) * soft_square(st[1], tex.scale);
                   Color c;
                   for (int k = 0; k < 3; ++k) c[k] = tex.color_b[k] + f * (tex.color_a[k] - tex.color_b[k]);
                   return c;
                 },
                 [&](const ValueNoiseTexture& tex) -> Color {
                   const double v = value_noise(tex.seed, st[0] / tex.scale, st[1] / tex.scale);
                   return {v, v, v};
                 },
                 [](const SolidTexture& tex) -> Color { return tex.color; }},
      prim.texture);
}

EquirectRender render_equirect(const Scene& scene, const Vec3& camera_center,
                               const EquirectGrid& grid) {
  grid.validate();
  scene.validate();
  EquirectRender out{EquirectImage(grid, 3), DepthMap(grid)};
  parallel_for(0, grid.height, [&](std::ptrdiff_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < grid.width; ++i) {
      const Vec3 dir = direction_to_vector(pixel_center_direction(grid, i, j));
      const auto hit = cast_ray(scene, camera_center, dir);
      if (!hit) continue;
      out.depth.at(j, i) = hit->distance;
      const Color c = shade(scene.primitives[hit->primitive], hit->point);
      for (int k = 0; k < 3; ++k) out.rgb.at(j, i, k) = static_cast<float>(c[k]);
    }
  });
  return out;
}

StereoPair render_pair(const Scene& scene, const CameraRig& rig, const EquirectGrid& grid) {
  rig.validate();
  EquirectRender top = render_equirect(scene, rig.top_center(), grid);
  EquirectRender bottom = render_equirect(scene, rig.bottom_center(), grid);
  StereoPair pair{std::move(top.rgb), std::move(bottom.rgb), std::move(top.depth),
                  DisparityMap(grid), Mask(grid)};
  const std::vector<double> polar = polar_angle_map(grid);
  const Vec3 cb = rig.bottom_center();
  parallel_for(0, grid.height, [&](std::ptrdiff_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < grid.width; ++i) {
      const double depth = pair.top_depth.at(j, i);
      if (!DepthMap::is_valid(depth)) continue;
      pair.gt_disparity.at(j, i) = depth_to_disparity(rig, polar[j], depth);
      const Vec3 p = depth * direction_to_vector(pixel_center_direction(grid, i, j));
      const Vec3 to_point = p - cb;
      const double dist = to_point.norm();
      const auto hit = cast_ray(scene, cb, to_point / dist);
      if (hit && std::abs(hit->distance - dist) <= 1e-6 * depth) pair.gt_valid.at(j, i) = 1;
    }
  });
  return pair;
}

}  // namespace sphstereo
