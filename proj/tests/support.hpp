#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <vector>

#include "sphstereo/types.hpp"

namespace sphstereo::testing {

inline EquirectImage random_image(EquirectGrid grid, int channels, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  EquirectImage img(grid, channels);
  for (float& s : img.samples) s = u(rng);
  return img;
}

// Sum of a few low-frequency waves on the sphere; periodic in longitude.
inline EquirectImage smooth_image(EquirectGrid grid, int channels, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  double ph[3][3];
  for (auto& row : ph)
    for (double& p : row) p = phase(rng);
  EquirectImage img(grid, channels);
  for (int j = 0; j < grid.height; ++j) {
    const double polar = kPi * (1.0 - (j + 0.5) / grid.height);
    for (int i = 0; i < grid.width; ++i) {
      const double lon = 2.0 * kPi * (i + 0.5) / grid.width - kPi;
      for (int c = 0; c < channels; ++c) {
        const double x = std::sin(polar) * std::cos(lon + ph[c][0]) +
                         0.5 * std::cos(2.0 * polar + ph[c][1]) +
                         0.3 * std::sin(polar) * std::sin(2.0 * lon + ph[c][2]);
        img.at(j, i, c) = static_cast<float>(0.5 + 0.25 * x);
      }
    }
  }
  return img;
}

template <class T>
bool same_bits(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0);
}

}  // namespace sphstereo::testing
