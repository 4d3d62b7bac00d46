#pragma once

// The excluded neighbourhoods |x - m pi/2^n| <= 2^-(n + sqrt(n) + k) around
// the dyadic lattice, and membership in their complement A_k.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "sinprod/angle.hpp"

namespace sinprod {

/// sqrt(n) rounded down, so exponents n + sqrt(n) + k only ever shrink and
/// the excluded intervals only ever grow.
inline double sqrt_down(std::int64_t n) {
  double s = std::sqrt(static_cast<double>(n));
  if (s * s > static_cast<double>(n)) s = std::nextafter(s, 0.0);
  return s;
}

struct ExcludedInterval {
  int n = 0;
  int k = 0;
  std::int64_t m = 0;         // center = m pi / 2^n when center_exact
  bool center_exact = false;
  double center_over_pi = 0.0;
  double radius = 0.0;        // radians

  friend bool operator==(const ExcludedInterval&, const ExcludedInterval&) = default;

  /// Length of the interval clipped to [0, pi].
  double clipped_length() const {
    // trim the overhang rather than subtracting endpoints, which would lose
    // the tiny radii of deep intervals to cancellation against c
    const double c = center_over_pi * std::numbers::pi;
    double len = 2.0 * radius;
    if (c < radius) len -= radius - c;
    if (c + radius > std::numbers::pi) len -= c + radius - std::numbers::pi;
    return std::max(len, 0.0);
  }
};

inline double excluded_radius(int n, int k) {
  return std::exp2(-(static_cast<double>(n) + sqrt_down(n) + static_cast<double>(k)));
}

/// Every excluded interval meeting [0, pi] for depths 0..n_max (odd m only
/// for n >= 1, since even m repeat a coarser center).
inline std::vector<ExcludedInterval> excluded_intervals(int k, int n_max) {
  if (n_max > 40) throw error(errc::invalid_argument, "interval enumeration is limited to n_max <= 40");
  std::vector<ExcludedInterval> out;
  for (int n = 0; n <= n_max; ++n) {
    const double radius = excluded_radius(n, k);
    const std::int64_t count = std::int64_t{1} << n;
    for (std::int64_t m = 0; m <= count; ++m) {
      if (n >= 1 && (m % 2) == 0) continue;
      ExcludedInterval e;
      e.n = n;
      e.k = k;
      e.m = m;
      e.center_exact = true;
      e.center_over_pi = std::ldexp(static_cast<double>(m), -n);
      e.radius = radius;
      out.push_back(e);
    }
  }
  return out;
}

struct MembershipReport {
  bool in_up_to_depth = false;
  int depth_checked = 0;
  std::optional<ExcludedInterval> violating_interval;

  friend bool operator==(const MembershipReport&, const MembershipReport&) = default;
};

namespace detail {

// log2(pi * d_n) + sqrt(n) + k > 0 is the membership condition at depth n.
inline double membership_margin(const ReducedArg& r, int n, int k) {
  return r.log2_distance() + std::log2(std::numbers::pi) + sqrt_down(n) + static_cast<double>(k);
}

inline ExcludedInterval violation_at(const AngleRep& x, int n, int k) {
  ExcludedInterval e;
  e.n = n;
  e.k = k;
  e.radius = excluded_radius(n, k);
  if (const auto* d = std::get_if<DyadicPi>(&x.storage()); d && d->n >= n) {
    // nearest integer to m * 2^(n - d.n), exact
    const int shift = d->n - n;
    std::int64_t q = shift == 0 ? d->m : (d->m + (std::int64_t{1} << (shift - 1))) >> shift;
    e.m = q;
    e.center_exact = true;
    e.center_over_pi = std::ldexp(static_cast<double>(q), -n);
    return e;
  }
  if (const auto* d = std::get_if<DyadicPi>(&x.storage())) {
    e.m = d->m << (n - d->n);
    e.center_exact = n <= max_dyadic_exponent;
    e.center_over_pi = std::ldexp(static_cast<double>(d->m), -d->n);
    return e;
  }
  const double scaled = std::ldexp(x.approx_over_pi(), n);
  e.center_exact = std::fabs(scaled) < 0x1.0p52;
  e.m = e.center_exact ? std::llround(scaled) : 0;
  e.center_over_pi = std::ldexp(std::round(scaled), -n);
  return e;
}

}  // namespace detail

/// Checks |x - m pi/2^n| > 2^-(n + sqrt n + k) for all m and 0 <= n <= n_max,
/// one depth at a time. Reports the first violated interval.
inline MembershipReport in_A_k(const AngleRep& x, int k, int n_max) {
  if (k < 1) throw error(errc::invalid_argument, "A_k needs k >= 1");
  if (n_max < 0) throw error(errc::invalid_argument, "negative n_max");
  MembershipReport rep;
  for (int n = 0; n <= n_max; ++n) {
    ReducedArg r = reduce_argument(x, n);
    rep.depth_checked = n;
    if (r.is_zero() || detail::membership_margin(r, n, k) <= 0.0) {
      rep.violating_interval = detail::violation_at(x, n, k);
      return rep;
    }
  }
  rep.in_up_to_depth = true;
  return rep;
}

/// Smallest k >= 1 with x in A_k up to depth n_max, or nullopt when it would
/// exceed k_max (or x sits on the lattice).
inline std::optional<int> least_member_k(const AngleRep& x, int n_max, int k_max) {
  int needed = 1;
  for (int n = 0; n <= n_max; ++n) {
    ReducedArg r = reduce_argument(x, n);
    if (r.is_zero()) return std::nullopt;
    // smallest integer k with margin > 0, nudged up at exact ties
    double v = -(r.log2_distance() + std::log2(std::numbers::pi) + sqrt_down(n));
    int kn = static_cast<int>(std::floor(v + 1e-9)) + 1;
    needed = std::max(needed, kn);
    if (needed > k_max) return std::nullopt;
  }
  return needed;
}

}  // namespace sinprod
