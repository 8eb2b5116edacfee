#include "sphstereo/interp.hpp"

#include <cmath>

#include "sphstereo/error.hpp"
#include "sphstereo/types.hpp"

namespace sphstereo {

double lanczos_weight(double distance, double a) {
  const double x = std::abs(distance);
  if (x == 0.0) return 1.0;
  if (x >= a) return 0.0;
  const double px = kPi * x;
  return a * std::sin(px) * std::sin(px / a) / (px * px);
}

TapWeights tap_weights(const InterpKernel& kernel, double x) {
  if (!std::isfinite(x)) throw DomainError("interpolation position is not finite");
  const double nearest = std::round(x);
  if (std::abs(x - nearest) < 1e-9) x = nearest;

  TapWeights out;
  if (x == nearest) {
    out.first = static_cast<int>(nearest);
    out.weights = {1.0};
    return out;
  }

  switch (kernel.kind) {
    case InterpKernel::Kind::Nearest:
      out.first = static_cast<int>(nearest);
      out.weights = {1.0};
      break;
    case InterpKernel::Kind::Linear: {
      const double base = std::floor(x);
      const double f = x - base;
      out.first = static_cast<int>(base);
      out.weights = {1.0 - f, f};
      break;
    }
    case InterpKernel::Kind::Lanczos: {
      if (kernel.taps < 1 || kernel.taps % 2 == 0)
        throw DomainError("Lanczos kernel needs an odd tap count");
      const int half = kernel.taps / 2;
      const double a = half > 0 ? half : 0.5;
      out.first = static_cast<int>(nearest) - half;
      out.weights.resize(kernel.taps);
      double sum = 0.0;
      for (int k = 0; k < kernel.taps; ++k) {
        out.weights[k] = lanczos_weight(x - (out.first + k), a);
        sum += out.weights[k];
      }
      for (double& w : out.weights) w /= sum;
      break;
    }
  }
  return out;
}

}  // namespace sphstereo
