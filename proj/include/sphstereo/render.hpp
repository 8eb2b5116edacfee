#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sphstereo/config.hpp"
#include "sphstereo/geom.hpp"
#include "sphstereo/types.hpp"

namespace sphstereo {

using Color = std::array<double, 3>;

// Soft-edged checkerboard: squares of side `scale` meters blending
// color_a/color_b through a smooth transition, so it stays band-limited.
struct CheckerTexture {
  double scale = 0.5;
  Color color_a{0.9, 0.9, 0.9};
  Color color_b{0.1, 0.1, 0.1};
};

// Seeded lattice value noise with bilinear interpolation; lattice spacing
// `scale` meters, gray values in [0, 1].
struct ValueNoiseTexture {
  std::uint64_t seed = 1;
  double scale = 0.1;
};

struct SolidTexture {
  Color color{0.5, 0.5, 0.5};
};

using Texture = std::variant<CheckerTexture, ValueNoiseTexture, SolidTexture>;

struct Plane {
  Vec3 point{0, 0, 0};
  Vec3 normal{0, 0, 1};
};
struct Sphere {
  Vec3 center{0, 0, 0};
  double radius = 1.0;
};
struct AxisBox {
  Vec3 min{-1, -1, -1};
  Vec3 max{1, 1, 1};
};

using Shape = std::variant<Plane, Sphere, AxisBox>;

struct Primitive {
  Shape shape;
  Texture texture;
};

struct Scene {
  std::vector<Primitive> primitives;

  void validate() const;
};

struct Hit {
  double distance = 0.0;
  Vec3 point;
  std::size_t primitive = 0;
};

// Nearest intersection along origin + t * dir (dir unit length), t > 1e-9.
std::optional<Hit> cast_ray(const Scene& scene, const Vec3& origin, const Vec3& dir);

// Unlit albedo of the primitive's texture at a surface point.
Color shade(const Primitive& prim, const Vec3& point);

double value_noise(std::uint64_t seed, double s, double t);

struct EquirectRender {
  EquirectImage rgb;
  DepthMap depth;
};

// Casts one ray per pixel center. Pixels without a hit get invalid depth and
// black color.
EquirectRender render_equirect(const Scene& scene, const Vec3& camera_center,
                               const EquirectGrid& grid);

struct StereoPair {
  EquirectImage top_rgb;
  EquirectImage bottom_rgb;
  DepthMap top_depth;
  DisparityMap gt_disparity;
  Mask gt_valid;
};

// Renders both rig views. gt_valid marks top pixels whose 3D point is also
// the first hit seen from the bottom camera (distance agreement 1e-6 * depth).
StereoPair render_pair(const Scene& scene, const CameraRig& rig, const EquirectGrid& grid);

// Scene files use the config syntax plus repeated "primitive = ..." lines:
//   primitive = sphere center=0,0,0 radius=3 texture=noise seed=7 scale=0.1
//   primitive = plane point=0,0,-1 normal=0,0,1 texture=checker scale=0.5
//   primitive = box min=-3,-3,-1.5 max=3,3,1.5 texture=solid color=0.5,0.5,0.5
// Other keys are RunConfig settings applied on top of the defaults.
struct SceneFile {
  Scene scene;
  std::vector<KeyValue> settings;
};

Primitive parse_primitive(const std::string& text);
SceneFile parse_scene(std::string_view text);
SceneFile load_scene(const std::string& path);

}  // namespace sphstereo
