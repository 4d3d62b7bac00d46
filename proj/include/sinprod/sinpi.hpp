#pragma once

#include <cmath>
#include <numbers>

namespace sinprod {

/// sin(pi*d) for d in [0, 1/2].
///
/// The folded range keeps the argument handed to the libm kernel below pi/4.
/// Lattice points come out exact: d == 0 gives 0 and d == 1/2 gives cos(0) == 1.
inline double sinpi_folded(double d) {
  if (d == 0.0) return 0.0;
  if (d <= 0.25) return std::sin(std::numbers::pi * d);
  return std::cos(std::numbers::pi * (0.5 - d));
}

/// |sin(pi*t)| for any finite t.
inline double abs_sinpi(double t) {
  double r = std::fmod(std::fabs(t), 1.0);
  // 1 - r is exact for r >= 1/2
  double d = r <= 0.5 ? r : 1.0 - r;
  return sinpi_folded(d);
}

}  // namespace sinprod
