#include <doctest.h>

#include <cmath>
#include <random>

#include "sphstereo/eval.hpp"
#include "sphstereo/matcher.hpp"
#include "sphstereo/render.hpp"
#include "sgm_reference.hpp"
#include "support.hpp"

using namespace sphstereo;

namespace {

CostVolume random_volume(EquirectGrid g, int levels, std::uint32_t seed, bool coarse = false) {
  std::vector<double> lv(levels);
  for (int k = 0; k < levels; ++k) lv[k] = k * 0.01;
  CostVolume vol(g, lv);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::uniform_int_distribution<int> q(0, 3);
  for (float& c : vol.costs) c = coarse ? 0.25f * q(rng) : u(rng);
  return vol;
}

CostVolume single_pixel_volume(const std::vector<float>& costs, double step) {
  std::vector<double> lv(costs.size());
  for (std::size_t k = 0; k < lv.size(); ++k) lv[k] = k * step;
  CostVolume vol(EquirectGrid{2, 2}, lv);
  for (std::size_t k = 0; k < costs.size(); ++k)
    for (int p = 0; p < 4; ++p) vol.slice(static_cast<int>(k))[p] = costs[k];
  return vol;
}

}  // namespace

TEST_SUITE("matcher") {

TEST_CASE("SGM equals the reference DP on small volumes") {
  for (int h = 2; h <= 5; ++h)
    for (int w = 2; w <= 5; ++w)
      for (int d = 1; d <= 4; ++d) {
        const CostVolume vol = random_volume({w, h}, d, 100 * h + 10 * w + d);
        for (std::uint32_t paths : {kAllPaths, 0x03u, 0x0Cu, 0xF0u}) {
          SgmParams p;
          p.paths = paths;
          CHECK(testing::same_bits(aggregate_sgm(vol, p).costs,
                                   testing::reference_sgm(vol, p).costs));
        }
      }
}

TEST_CASE("zero penalties sum the raw costs over paths") {
  const CostVolume vol = random_volume({6, 5}, 4, 3);
  SgmParams p;
  p.p1 = 0.0;
  p.p2 = 0.0;
  const CostVolume out = aggregate_sgm(vol, p);
  for (std::size_t i = 0; i < vol.costs.size(); ++i)
    CHECK(out.costs[i] == doctest::Approx(8.0 * vol.costs[i]).epsilon(1e-6));
  p.paths = kPathLeftToRight;
  CHECK(testing::same_bits(aggregate_sgm(vol, p).costs, vol.costs));
}

TEST_CASE("single-column volume with one vertical path") {
  const CostVolume vol = random_volume({1 + 1, 7}, 5, 12);
  SgmParams p;
  p.paths = kPathTopToBottom;
  const CostVolume out = aggregate_sgm(vol, p);
  testing::Costs column;
  for (int j = 0; j < 7; ++j) {
    std::vector<float> c(5);
    for (int d = 0; d < 5; ++d) c[d] = vol.at(d, j, 0);
    column.push_back(c);
  }
  const testing::Costs l = testing::reference_dp(column, 0.02f, 0.25f);
  for (int j = 0; j < 7; ++j)
    for (int d = 0; d < 5; ++d) CHECK(out.at(d, j, 0) == l[j][d]);
}

TEST_CASE("circular column shifts commute with aggregation") {
  const CostVolume vol = random_volume({24, 10}, 6, 21);
  const int shift = 7;
  CostVolume rolled(vol.grid, vol.levels);
  for (int d = 0; d < 6; ++d)
    for (int j = 0; j < 10; ++j)
      for (int i = 0; i < 24; ++i) rolled.at(d, j, (i + shift) % 24) = vol.at(d, j, i);
  const CostVolume a = aggregate_sgm(vol, SgmParams{});
  const CostVolume b = aggregate_sgm(rolled, SgmParams{});
  double worst = 0.0;
  for (int d = 0; d < 6; ++d)
    for (int j = 0; j < 10; ++j)
      for (int i = 0; i < 24; ++i)
        worst = std::max(worst, std::abs(double(b.at(d, j, (i + shift) % 24)) - a.at(d, j, i)));
  // The horizontal rings settle to their periodic state; only float rounding
  // at the seam may differ.
  CHECK(worst < 1e-5);
}

TEST_CASE("SGM parameter validation") {
  SgmParams p;
  p.p1 = 0.5;
  p.p2 = 0.1;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.p1 = -0.1;
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK(SgmParams{}.path_count() == 8);
}

TEST_CASE("WTA: integer parabola vertex and hand-computed offset") {
  const double step = 0.01;
  const DisparityMap a = wta_disparity(single_pixel_volume({4, 1, 0, 1, 4}, step));
  CHECK(a.at(0, 0) == 2 * step);

  const DisparityMap b = wta_disparity(single_pixel_volume({2.0f, 1.0f, 0.5f, 0.9f, 2.0f}, step));
  const double offset = (1.0 - 0.9) / (2.0 * (1.0 - 2.0 * 0.5 + 0.9));
  CHECK(offset == doctest::Approx(0.0555555555).epsilon(1e-8));
  // Dense search over the parabola through (-1, 1.0), (0, 0.5), (1, 0.9).
  double best_x = 0.0, best_y = 1e9;
  for (int n = -500000; n <= 500000; ++n) {
    const double x = n * 1e-6;
    const double y = 0.5 + 0.5 * (0.9 - 1.0) * x + 0.5 * (1.0 - 2 * 0.5 + 0.9) * x * x;
    if (y < best_y) best_y = y, best_x = x;
  }
  CHECK(std::abs(best_x - offset) < 2e-6);
  CHECK(b.at(0, 0) == doctest::Approx((2 + offset) * step).epsilon(1e-6));
}

TEST_CASE("WTA tie-break and boundary levels") {
  const double step = 0.01;
  CHECK(wta_disparity(single_pixel_volume({1, 0.5, 0.5, 1}, step), false).at(0, 0) == 1 * step);
  CHECK(wta_disparity(single_pixel_volume({0.2f, 0.5f, 0.9f}, step)).at(0, 0) == 0.0);
  CHECK(wta_disparity(single_pixel_volume({0.9f, 0.5f, 0.2f}, step)).at(1, 1) == 2 * step);
  // Flat cost: lowest index, no refinement.
  CHECK(wta_disparity(single_pixel_volume({0.3f, 0.3f, 0.3f}, step)).at(0, 0) == 0.0);
  // Offset is clamped to half a level.
  const double v = wta_disparity(single_pixel_volume({1.0f, 0.0f, 0.0f, 1.0f}, step)).at(0, 0);
  CHECK(v >= 0.5 * step);
  CHECK(v <= 1.5 * step);
}

TEST_CASE("consistency check") {
  const EquirectGrid g{16, 12};
  const double step = kPi / g.height;  // one row per level
  DisparityMap ref(g, 0.0), other(g, 0.0);
  CHECK(consistency_check(ref, other, 1.0, step).valid_count() == g.pixel_count());

  DisparityMap far(g, 10 * step);
  CHECK(consistency_check(far, other, 1.0, step).valid_count() == 0);

  // A constant disparity of two rows seen from the bottom view is the same
  // constant; every pixel whose lookup stays inside the image agrees.
  DisparityMap two(g, 2 * step);
  const DisparityMap kept = consistency_check(two, two, 1.0, step);
  for (int j = 0; j < g.height; ++j)
    for (int i = 0; i < g.width; ++i) CHECK(kept.valid(j, i));

  DisparityMap holes = two;
  holes.at(5, 3) = DisparityMap::invalid();
  CHECK_FALSE(consistency_check(holes, two, 1.0, step).valid(5, 3));
  CHECK_THROWS_AS(consistency_check(two, DisparityMap(EquirectGrid{8, 12}, 0.0), 1.0, step),
                  DomainError);
}

TEST_CASE("consistency check rejects mostly at occlusions") {
  const EquirectGrid g{256, 128};
  const CameraRig rig(0.2);
  Scene scene;
  scene.primitives.push_back({AxisBox{{-3, -3, -1.5}, {3, 3, 1.5}}, ValueNoiseTexture{21, 0.1}});
  scene.primitives.push_back({Sphere{{1.2, 0, -0.4}, 0.4}, ValueNoiseTexture{22, 0.05}});
  const StereoPair pair = render_pair(scene, rig, g);

  PipelineOptions opts;
  opts.match.num_levels = 40;
  opts.match.step_deg = 0.5;
  opts.lr_check = true;
  const DisparityMap checked = match_pair(pair.top_rgb, pair.bottom_rgb, opts);
  std::size_t occ = 0, occ_rej = 0, vis = 0, vis_rej = 0;
  const RowRange rows = crop_rows(g, 0.05);
  for (int j = rows.begin; j < rows.end; ++j)
    for (int i = 0; i < g.width; ++i) {
      const bool rejected = !checked.valid(j, i);
      if (pair.gt_valid.at(j, i)) ++vis, vis_rej += rejected;
      else if (pair.gt_disparity.valid(j, i)) ++occ, occ_rej += rejected;
    }
  REQUIRE(occ > 20);
  const double occ_rate = double(occ_rej) / occ, vis_rate = double(vis_rej) / vis;
  MESSAGE("rejection rate occluded " << occ_rate << " visible " << vis_rate);
  CHECK(occ_rate > 5.0 * vis_rate);
}

TEST_CASE("brute-force matcher: identical and constant inputs") {
  const EquirectImage img = testing::random_image({24, 12}, 3, 5);
  MatchConfig cfg;
  cfg.num_levels = 5;
  cfg.step_deg = 2.0;
  for (CostMetric m : {CostMetric::SAD, CostMetric::ZNCC, CostMetric::CENSUS}) {
    cfg.metric = m;
    const DisparityMap d = match_bruteforce(img, img, cfg);
    for (double v : d.values) REQUIRE(v == 0.0);
    const EquirectImage flat(img.grid, 3, 0.5f);
    for (double v : match_bruteforce(flat, flat, cfg).values) REQUIRE(v == 0.0);
  }
}

TEST_CASE("pipeline without aggregation equals the brute-force matcher") {
  for (CostMetric m : {CostMetric::SAD, CostMetric::ZNCC, CostMetric::CENSUS}) {
    for (std::uint32_t seed = 0; seed < 3; ++seed) {
      const EquirectImage top = testing::random_image({64, 32}, 3, 2 * seed + 1);
      const EquirectImage bottom = testing::random_image({64, 32}, 3, 2 * seed + 2);
      PipelineOptions opts;
      opts.match.metric = m;
      opts.match.num_levels = 16;
      opts.match.step_deg = 1.5;
      opts.use_sgm = false;
      opts.subpixel = false;
      CHECK(testing::same_bits(match_pair(top, bottom, opts).values,
                               match_bruteforce(top, bottom, opts.match).values));
    }
  }
}

TEST_CASE("median filter") {
  const EquirectGrid g{8, 6};
  const DisparityMap flat(g, 0.1);
  CHECK(testing::same_bits(median_filter(flat, 1).values, flat.values));
  DisparityMap spike = flat;
  spike.at(3, 4) = 5.0;
  CHECK(median_filter(spike, 1).at(3, 4) == 0.1);
  const DisparityMap none(g);
  CHECK(median_filter(none, 2).valid_count() == 0);
  CHECK(testing::same_bits(median_filter(spike, 0).values, spike.values));
  CHECK_THROWS_AS(median_filter(flat, -1), DomainError);

  // Even count of valid neighbors takes the lower middle value.
  DisparityMap sparse(g);
  sparse.at(2, 2) = 1.0;
  sparse.at(2, 3) = 2.0;
  CHECK(median_filter(sparse, 1).at(2, 2) == 1.0);
  // Invalid pixels stay invalid; longitude wraps, so column 0 sees column 7.
  CHECK_FALSE(median_filter(sparse, 1).valid(4, 4));
  DisparityMap wrap(g);
  wrap.at(2, 0) = 1.0;
  wrap.at(2, 1) = 3.0;
  wrap.at(2, 7) = 3.0;
  CHECK(median_filter(wrap, 1).at(2, 0) == 3.0);
}

TEST_CASE("full pipeline on identical images gives zero disparity") {
  const EquirectImage img = testing::random_image({48, 24}, 3, 9);
  PipelineOptions opts;
  opts.match.num_levels = 8;
  opts.match.step_deg = 1.0;
  opts.median_radius = 1;
  const DisparityMap d = match_pair(img, img, opts);
  for (double v : d.values) REQUIRE(v == 0.0);
  CostVolume raw;
  match_pair(img, img, opts, &raw);
  CHECK(raw.num_levels() == 8);
}

}  // TEST_SUITE
