#include <doctest.h>

#include <cmath>

#include "sphstereo/error.hpp"
#include "sphstereo/render.hpp"
#include "support.hpp"

using namespace sphstereo;

namespace {

Scene single(Shape shape, Texture tex = ValueNoiseTexture{}) {
  Scene s;
  s.primitives.push_back({shape, tex});
  return s;
}

}  // namespace

TEST_SUITE("render") {

TEST_CASE("sphere around the camera renders constant depth") {
  const EquirectRender r = render_equirect(single(Sphere{{0, 0, 0}, 3.0}), {0, 0, 0}, {64, 32});
  for (double d : r.depth.values) REQUIRE(std::abs(d - 3.0) < 1e-12);
  CHECK(r.rgb.channels == 3);
}

TEST_CASE("floor plane depth is 1 / cos(polar) below the horizon") {
  const EquirectGrid g{64, 32};
  const EquirectRender r = render_equirect(single(Plane{{0, 0, -1}, {0, 0, 1}}), {0, 0, 0}, g);
  for (int j = 0; j < g.height; ++j) {
    const double polar = pixel_center_direction(g, 0, j).polar_rad;
    for (int i = 0; i < g.width; ++i) {
      if (polar < kPi / 2) {
        REQUIRE(r.depth.valid(j, i));
        CHECK(r.depth.at(j, i) == doctest::Approx(1.0 / std::cos(polar)).epsilon(1e-12));
      } else {
        CHECK_FALSE(r.depth.valid(j, i));
        CHECK(r.rgb.at(j, i, 0) == 0.0f);
      }
    }
  }
}

TEST_CASE("nested spheres show the inner one") {
  Scene s = single(Sphere{{0, 0, 0}, 5.0});
  s.primitives.push_back({Sphere{{0, 0, 0}, 2.0}, SolidTexture{{0.2, 0.4, 0.6}}});
  const EquirectRender r = render_equirect(s, {0, 0, 0}, {32, 16});
  for (double d : r.depth.values) REQUIRE(std::abs(d - 2.0) < 1e-12);
  CHECK(r.rgb.at(3, 3, 1) == doctest::Approx(0.4f));
}

TEST_CASE("empty scene has no ground truth") {
  const StereoPair p = render_pair(Scene{}, CameraRig(0.2), {32, 16});
  CHECK(p.gt_valid.count() == 0);
  CHECK(p.top_depth.valid_count() == 0);
  CHECK(p.gt_disparity.valid_count() == 0);
  for (float v : p.top_rgb.samples) REQUIRE(v == 0.0f);
}

TEST_CASE("ground-truth disparity on a centered sphere") {
  const EquirectGrid g{64, 33};  // odd height puts row 16 on the equator
  const CameraRig rig(0.2);
  const StereoPair p = render_pair(single(Sphere{{0, 0, 0}, 3.0}), rig, g);
  const auto dir = pixel_center_direction(g, 5, 16);
  CHECK(std::abs(dir.polar_rad - kPi / 2) < 1e-15);
  const double expect = std::atan2(3.0, -0.2) - kPi / 2;
  CHECK(p.gt_disparity.at(16, 5) == doctest::Approx(expect).epsilon(1e-12));
  // Cross-check by projecting the hit point into the bottom camera.
  const Vec3 hit = 3.0 * direction_to_vector(dir);
  const double polar_b = vector_to_direction(hit - rig.bottom_center()).polar_rad;
  CHECK(std::abs(p.gt_disparity.at(16, 5) - (polar_b - dir.polar_rad)) < 1e-12);
  CHECK(p.gt_valid.count() == g.pixel_count());
}

TEST_CASE("correspondences share longitude and hide behind occluders") {
  const EquirectGrid g{128, 64};
  const CameraRig rig(0.2);
  Scene s = single(AxisBox{{-3, -3, -1.5}, {3, 3, 1.5}});
  s.primitives.push_back({Sphere{{1.0, 0.0, -0.3}, 0.25}, SolidTexture{}});
  const StereoPair p = render_pair(s, rig, g);
  std::size_t hidden = 0;
  for (int j = 0; j < g.height; ++j)
    for (int i = 0; i < g.width; ++i) {
      if (!p.top_depth.valid(j, i)) continue;
      const auto dir = pixel_center_direction(g, i, j);
      const Vec3 point = p.top_depth.at(j, i) * direction_to_vector(dir);
      const Vec3 ray = point - rig.bottom_center();
      const auto seen = vector_to_direction(ray);
      if (p.gt_valid.at(j, i)) {
        double dl = std::remainder(seen.longitude_rad - dir.longitude_rad, 2 * kPi);
        CHECK(std::abs(dl) < 1e-9);
        CHECK(p.gt_disparity.at(j, i) ==
              doctest::Approx(seen.polar_rad - dir.polar_rad).epsilon(1e-9));
      } else {
        ++hidden;
        const auto hit = cast_ray(s, rig.bottom_center(), ray.normalized());
        REQUIRE(hit.has_value());
        CHECK(hit->distance < ray.norm());
      }
    }
  CHECK(hidden > 0);
}

TEST_CASE("ray casting edge cases") {
  const Scene box = single(AxisBox{{-1, -1, -1}, {1, 1, 1}});
  const auto inside = cast_ray(box, {0, 0, 0}, {1, 0, 0});
  REQUIRE(inside.has_value());
  CHECK(inside->distance == doctest::Approx(1.0));
  const auto outside = cast_ray(box, {-5, 0, 0}, {1, 0, 0});
  REQUIRE(outside.has_value());
  CHECK(outside->distance == doctest::Approx(4.0));
  CHECK_FALSE(cast_ray(box, {-5, 0, 0}, {-1, 0, 0}).has_value());
  CHECK_FALSE(cast_ray(single(Plane{{0, 0, -1}, {0, 0, 1}}), {0, 0, 0}, {1, 0, 0}).has_value());
  CHECK_FALSE(cast_ray(single(Sphere{{5, 0, 0}, 1.0}), {0, 0, 0}, {-1, 0, 0}).has_value());
  const auto sp = cast_ray(single(Sphere{{5, 0, 0}, 1.0}), {0, 0, 0}, {1, 0, 0});
  REQUIRE(sp.has_value());
  CHECK(sp->distance == doctest::Approx(4.0));
}

TEST_CASE("textures are deterministic and bounded") {
  CHECK(value_noise(3, 0.25, 1.75) == value_noise(3, 0.25, 1.75));
  CHECK(value_noise(3, 0.25, 1.75) != value_noise(4, 0.25, 1.75));
  for (int n = 0; n < 1000; ++n) {
    const double v = value_noise(9, 0.37 * n, -0.11 * n);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  const Primitive checker{Plane{{0, 0, -1}, {0, 0, 1}}, CheckerTexture{0.5, {1, 1, 1}, {0, 0, 0}}};
  for (int n = 0; n < 200; ++n) {
    const Color c = shade(checker, {0.013 * n, -0.029 * n, -1.0});
    CHECK(c[0] >= 0.0);
    CHECK(c[0] <= 1.0);
  }
  // Square centers take the pure colors.
  const Color a = shade(checker, {0.25, 0.25, -1});
  const Color b = shade(checker, {0.75, 0.25, -1});
  CHECK(std::abs(a[0] - b[0]) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("scene validation") {
  CHECK_THROWS_AS(single(Sphere{{0, 0, 0}, -1.0}).validate(), DomainError);
  CHECK_THROWS_AS(single(Plane{{0, 0, 0}, {0, 0, 2}}).validate(), DomainError);
  CHECK_THROWS_AS(single(AxisBox{{1, 1, 1}, {0, 2, 2}}).validate(), DomainError);
}

TEST_CASE("scene files") {
  const SceneFile sf = parse_scene(
      "# demo\n"
      "width = 64\n"
      "primitive = sphere center=0,0,0 radius=3 texture=noise seed=7 scale=0.1\n"
      "primitive = plane point=0,0,-1 normal=0,0,2 texture=checker scale=0.5\n"
      "primitive = box min=-3,-3,-1.5 max=3,3,1.5 texture=solid color=0.5,0.25,1\n");
  REQUIRE(sf.scene.primitives.size() == 3);
  REQUIRE(sf.settings.size() == 1);
  CHECK(sf.settings[0].key == "width");
  const auto& sp = std::get<Sphere>(sf.scene.primitives[0].shape);
  CHECK(sp.radius == 3.0);
  CHECK(std::get<ValueNoiseTexture>(sf.scene.primitives[0].texture).seed == 7);
  // Plane normals are normalized on load.
  CHECK(std::get<Plane>(sf.scene.primitives[1].shape).normal.z() == 1.0);
  CHECK(std::get<SolidTexture>(sf.scene.primitives[2].texture).color[1] == 0.25);

  CHECK_THROWS_AS(parse_primitive("cone radius=1"), ParseError);
  CHECK_THROWS_AS(parse_primitive("sphere center=0,0,0"), ParseError);
  CHECK_THROWS_AS(parse_primitive("sphere center=0,0 radius=1"), ParseError);
  CHECK_THROWS_AS(parse_primitive("sphere center=0,0,0 radius=1 colour=red"), ParseError);
  CHECK_THROWS_AS(parse_primitive("sphere center=0,0,0 radius=abc"), ParseError);
  CHECK_THROWS_AS(parse_primitive("sphere center=0,0,0 radius=1 texture=wood"), ParseError);
  try {
    parse_scene("\n\nprimitive = sphere radius=1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 3);
  }
}

}  // TEST_SUITE
