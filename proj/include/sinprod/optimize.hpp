#pragma once

#include <cmath>
#include <functional>

namespace sinprod {

struct Extremum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the minimum of a unimodal function on [a, b].
template <class F>
Extremum golden_section_minimize(F&& f, double a, double b, double tol = 1e-12, int max_iter = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > tol * (std::fabs(a) + std::fabs(b) + tol); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? Extremum{c, fc} : Extremum{d, fd};
}

template <class F>
Extremum golden_section_maximize(F&& f, double a, double b, double tol = 1e-12, int max_iter = 200) {
  Extremum e = golden_section_minimize([&](double x) { return -f(x); }, a, b, tol, max_iter);
  e.value = -e.value;
  return e;
}

}  // namespace sinprod
