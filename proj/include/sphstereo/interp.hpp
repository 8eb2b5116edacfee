#pragma once

#include <vector>

namespace sphstereo {

// 1-D resampling kernel. Lanczos uses a window of `taps` samples centered on
// the nearest integer position, i.e. a Lanczos-a kernel with a = (taps-1)/2.
struct InterpKernel {
  enum class Kind { Nearest, Linear, Lanczos };
  Kind kind = Kind::Lanczos;
  int taps = 7;

  static InterpKernel nearest() { return {Kind::Nearest, 1}; }
  static InterpKernel linear() { return {Kind::Linear, 2}; }
  static InterpKernel lanczos(int taps = 7) { return {Kind::Lanczos, taps}; }
};

// Weights for reconstructing a signal at continuous sample position x
// (samples live at integer positions). weights[k] applies to sample first + k.
// Positions within 1e-9 of an integer are snapped, so integer positions yield a
// single unit weight.
struct TapWeights {
  int first = 0;
  std::vector<double> weights;
};

TapWeights tap_weights(const InterpKernel& kernel, double x);

double lanczos_weight(double distance, double a);

}  // namespace sphstereo
