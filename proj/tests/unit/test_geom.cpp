#include <doctest.h>

#include <cmath>
#include <random>

#include "sphstereo/geom.hpp"
#include "support.hpp"

using namespace sphstereo;

namespace {

// Polar angle (from the south pole) of point p seen from camera c, computed
// from the angle between the ray and the -z axis.
double polar_seen_from(const Vec3& c, const Vec3& p) {
  const Vec3 r = p - c;
  return std::acos(std::clamp(-r.z() / r.norm(), -1.0, 1.0));
}

}  // namespace

TEST_SUITE("geom") {

TEST_CASE("pixel_to_direction: midpoint, corner and first pixel center") {
  const EquirectGrid g{1024, 512};
  auto d = pixel_to_direction(g, 512.0, 256.0);
  CHECK(d.longitude_rad == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(d.polar_rad == doctest::Approx(kPi / 2).epsilon(1e-15));

  d = pixel_to_direction(g, 0.0, 0.0);
  CHECK(d.longitude_rad == -kPi);
  CHECK(d.polar_rad == kPi);

  const auto c = pixel_center_direction(g, 0, 0);
  CHECK(std::abs(c.longitude_rad - (-kPi + kPi / 1024)) < 1e-15);
  CHECK(std::abs(c.polar_rad - kPi * (1.0 - 0.5 / 512)) < 1e-15);
}

TEST_CASE("pixel_to_direction rejects coordinates outside the raster") {
  const EquirectGrid g{16, 8};
  CHECK_THROWS_AS(pixel_to_direction(g, -0.1, 2.0), DomainError);
  CHECK_THROWS_AS(pixel_to_direction(g, 2.0, 8.5), DomainError);
  CHECK_THROWS_AS(pixel_to_direction(g, std::nan(""), 2.0), DomainError);
  CHECK_NOTHROW(pixel_to_direction(g, 3.0, 8.0));
}

TEST_CASE("direction_to_pixel inverts pixel_to_direction") {
  const EquirectGrid g{1024, 512};
  auto p = direction_to_pixel(g, {0.0, kPi / 2});
  CHECK(p.u == doctest::Approx(512.0).epsilon(1e-14));
  CHECK(p.v == doctest::Approx(256.0).epsilon(1e-14));
  p = direction_to_pixel(g, {-kPi, kPi});
  CHECK(p.u == 0.0);
  CHECK(p.v == 0.0);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uu(0.0, 1023.999), vv(0.0, 512.0);
  for (int n = 0; n < 10000; ++n) {
    const double u = uu(rng), v = vv(rng);
    const auto q = direction_to_pixel(g, pixel_to_direction(g, u, v));
    CHECK(std::abs(q.u - u) < 1e-9);
    CHECK(std::abs(q.v - v) < 1e-9);
  }
}

TEST_CASE("direction vectors follow the south-pole convention") {
  const Vec3 down = direction_to_vector({0.0, 0.0});
  CHECK((down - Vec3(0, 0, -1)).norm() < 1e-15);
  const Vec3 fwd = direction_to_vector({0.0, kPi / 2});
  CHECK((fwd - Vec3(1, 0, 0)).norm() < 1e-15);
  const Vec3 left = direction_to_vector({kPi / 2, kPi / 2});
  CHECK((left - Vec3(0, 1, 0)).norm() < 1e-15);
  const auto back = vector_to_direction(Vec3(0.3, -0.4, 0.5));
  CHECK((direction_to_vector(back) - Vec3(0.3, -0.4, 0.5).normalized()).norm() < 1e-15);
}

TEST_CASE("disparity_to_depth anchor cases") {
  const CameraRig rig(0.2);
  CHECK(std::abs(*disparity_to_depth(rig, kPi / 2, kPi / 4) - 0.2) < 1e-12);
  CHECK(std::abs(*disparity_to_depth(rig, kPi / 2, std::atan(0.1)) - 2.0) < 1e-12);
  CHECK_FALSE(disparity_to_depth(rig, kPi / 2, 0.0).has_value());
  CHECK_FALSE(disparity_to_depth(rig, kPi / 2, -0.01).has_value());
  CHECK_THROWS_AS(disparity_to_depth(rig, 0.0, 0.1), DomainError);
  CHECK_THROWS_AS(disparity_to_depth(rig, kPi, 0.1), DomainError);
  CHECK_THROWS_AS(disparity_to_depth(rig, kPi / 2, kPi / 2), DomainError);
}

TEST_CASE("geometric construction: a point 2 m out at equator height") {
  const CameraRig rig(0.2);
  const Vec3 p(2.0, 0.0, 0.0);
  const double polar_t = polar_seen_from(rig.top_center(), p);
  const double polar_b = polar_seen_from(rig.bottom_center(), p);
  const double d = polar_b - polar_t;
  CHECK(std::abs(polar_t - kPi / 2) < 1e-15);
  CHECK(std::abs(d - std::atan(0.1)) < 1e-12);
  CHECK(std::abs(*disparity_to_depth(rig, polar_t, d) - 2.0) < 1e-12);
  CHECK(std::abs(depth_to_disparity(rig, kPi / 2, 2.0) - std::atan(0.1)) < 1e-12);
  CHECK(std::abs(depth_to_disparity(rig, kPi / 2, 0.2) - kPi / 4) < 1e-12);
}

TEST_CASE("depth from disparity matches triangulated random points") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  for (double baseline : {0.05, 0.2, 1.0}) {
    const CameraRig rig(baseline);
    for (int n = 0; n < 2000; ++n) {
      const Vec3 p(coord(rng), coord(rng), coord(rng));
      if (std::hypot(p.x(), p.y()) < 0.5) continue;
      const double pt = polar_seen_from(rig.top_center(), p);
      const double pb = polar_seen_from(rig.bottom_center(), p);
      const auto depth = disparity_to_depth(rig, pt, pb - pt);
      REQUIRE(depth.has_value());
      CHECK(std::abs(*depth - p.norm()) < 1e-9 * p.norm());
      CHECK(std::abs(depth_to_disparity(rig, pt, p.norm()) - (pb - pt)) < 1e-12);
    }
  }
}

TEST_CASE("depth/disparity round trip over random samples") {
  const CameraRig rig(0.2);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> polar(0.05 * kPi, 0.95 * kPi), depth(0.3, 50.0);
  double worst = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const double t = polar(rng), z = depth(rng);
    const double back = *disparity_to_depth(rig, t, depth_to_disparity(rig, t, z));
    worst = std::max(worst, std::abs(back - z) / z);
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("disparity scales with baseline and falls with depth") {
  const double polar = 1.1;
  double last = 1e9;
  for (double z : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double d = depth_to_disparity(CameraRig(0.2), polar, z);
    CHECK(d < last);
    last = d;
    // Scaling the whole scene and the rig together leaves angles unchanged.
    CHECK(std::abs(depth_to_disparity(CameraRig(0.4), polar, 2 * z) - d) < 1e-13);
  }
  CHECK_THROWS_AS(depth_to_disparity(CameraRig(0.2), 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(depth_to_disparity(CameraRig(0.2), 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(depth_to_disparity(CameraRig(0.2), 1.0, INFINITY), DomainError);
  CHECK_THROWS_AS(CameraRig(0.0), DomainError);
  CHECK_THROWS_AS(CameraRig(-1.0), DomainError);
}

TEST_CASE("polar_angle_map") {
  const auto m = polar_angle_map({1024, 512});
  REQUIRE(m.size() == 512);
  CHECK(m[0] == kPi * (1.0 - 0.5 / 512));
  CHECK(std::abs((m[255] - kPi / 2) - (kPi / 2 - m[256])) < 1e-15);
  for (std::size_t j = 1; j < m.size(); ++j) CHECK(m[j] < m[j - 1]);
  const auto two = polar_angle_map({4, 2});
  CHECK(two[0] == doctest::Approx(0.75 * kPi).epsilon(1e-15));
  CHECK(two[1] == doctest::Approx(0.25 * kPi).epsilon(1e-15));
}

TEST_CASE("rotate_equirect: identity and polar-axis quarter turn are exact") {
  const EquirectGrid g{64, 32};
  const EquirectImage img = testing::random_image(g, 3, 2);
  CHECK(testing::same_bits(rotate_equirect(img, Mat3::Identity()).samples, img.samples));

  const Mat3 rz = Eigen::AngleAxisd(kPi / 2, Vec3::UnitZ()).toRotationMatrix();
  const EquirectImage rot = rotate_equirect(img, rz);
  for (int j = 0; j < g.height; ++j)
    for (int i = 0; i < g.width; ++i)
      for (int c = 0; c < 3; ++c)
        REQUIRE(rot.at(j, (i + g.width / 4) % g.width, c) == img.at(j, i, c));
}

TEST_CASE("rotate_equirect: R then R^T recovers a smooth image") {
  const EquirectGrid g{256, 128};
  const EquirectImage img = testing::smooth_image(g, 1, 9);
  const Mat3 r = (Eigen::AngleAxisd(0.4, Vec3::UnitX()) * Eigen::AngleAxisd(-0.7, Vec3::UnitY()))
                     .toRotationMatrix();
  const EquirectImage back = rotate_equirect(rotate_equirect(img, r), r.transpose());
  double worst = 0.0;
  for (std::size_t p = 0; p < img.samples.size(); ++p)
    worst = std::max(worst, static_cast<double>(std::abs(back.samples[p] - img.samples[p])));
  CHECK(worst < 1e-3);
}

TEST_CASE("rotate_equirect rejects non-rotations") {
  const EquirectImage img(EquirectGrid{8, 4}, 1);
  Mat3 m = Mat3::Identity();
  m(0, 0) = -1.0;  // reflection
  CHECK_THROWS_AS(rotate_equirect(img, m), DomainError);
  CHECK_THROWS_AS(rotate_equirect(img, 2.0 * Mat3::Identity()), DomainError);
}

TEST_CASE("depth_to_pointcloud") {
  const EquirectGrid g{32, 16};
  DepthMap ones(g, 1.0);
  const PointCloud unit = depth_to_pointcloud(g, ones);
  CHECK(unit.size() == g.pixel_count());
  CHECK_FALSE(unit.has_color());
  for (const Vec3& p : unit.positions) CHECK(std::abs(p.norm() - 1.0) < 1e-12);

  CHECK(depth_to_pointcloud(g, DepthMap(g)).size() == 0);

  EquirectImage color(g, 3, 1.0f);
  CHECK(depth_to_pointcloud(g, ones, &color).colors[0] == std::array<std::uint8_t, 3>{255, 255, 255});
  CHECK(quantize_unit(0.5f) == 128);
  CHECK(quantize_unit(-1.0f) == 0);
  CHECK(quantize_unit(2.0f) == 255);
}

TEST_CASE("single pixel at longitude 0 on the equator lands on +x") {
  // Grid chosen so a pixel center sits exactly on (lon 0, polar pi/2).
  const EquirectGrid g{3, 3};
  const auto dir = pixel_center_direction(g, 1, 1);
  CHECK(std::abs(dir.longitude_rad) < 1e-15);
  DepthMap m(g);
  m.at(1, 1) = 2.0;
  const PointCloud pc = depth_to_pointcloud(g, m);
  REQUIRE(pc.size() == 1);
  CHECK((pc.positions[0] - Vec3(2, 0, 0)).norm() < 1e-15);
}

}  // TEST_SUITE
