#pragma once

// Measure bounds for the sets where f is small (A_k complements) or
// reasonably large (B_k), Monte Carlo and grid estimators, and the
// layer-cake integral.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "sinprod/angle.hpp"
#include "sinprod/lattice.hpp"
#include "sinprod/product.hpp"
#include "sinprod/random.hpp"
#include "sinprod/summation.hpp"

namespace sinprod {

/// 37/(6 * 2^k): total length of the excluded lattice neighbourhoods.
inline double excluded_length_bound(int k) {
  if (k < 1) throw error(errc::invalid_argument, "k must be at least 1");
  return 37.0 / (6.0 * std::ldexp(1.0, k));
}

/// Total length inside [0, pi] of the excluded intervals for depths 0..n_max.
/// Depth 0 contributes two half intervals at 0 and pi; depth n >= 1 has 2^(n-1)
/// interior centers, none overlapping the ends once k >= 1.
inline double excluded_length_sum(int k, int n_max) {
  if (k < 1) throw error(errc::invalid_argument, "k must be at least 1");
  CompensatedSum sum;
  sum.add(2.0 * excluded_radius(0, k));
  for (int n = 1; n <= n_max; ++n) sum.add(std::ldexp(excluded_radius(n, k), n));
  return sum.value();
}

/// Bound on the length of every excluded interval deeper than n_max:
/// sum_{n > n_max} 2^-(sqrt(n) + k), with the tail past 4096 terms bounded by
/// the integral of 2^-sqrt(x).
inline double excluded_length_remainder(int k, int n_max) {
  CompensatedSum sum;
  const int last = n_max + 4096;
  for (int n = n_max + 1; n <= last; ++n) sum.add(std::exp2(-(sqrt_down(n) + k)));
  // integral of 2^-sqrt(x) from M is 2 e^(-s c) (s c + 1)/c^2 with s = sqrt(M), c = ln 2
  const double c = std::numbers::ln2;
  const double s = std::sqrt(static_cast<double>(last));
  sum.add(std::ldexp(2.0 * std::exp(-s * c) * (s * c + 1.0) / (c * c), -k));
  return sum.value();
}

/// 1/(3.15 * 5.531^k), the lower bound for f on A_k.
inline double pointwise_lower_bound(int k) {
  if (k < 1) throw error(errc::invalid_argument, "k must be at least 1");
  return 1.0 / (3.15 * std::pow(5.531, k));
}

/// e^(-1.147 - 1.7103 k), the sharper form the bound above is rounded from.
inline double pointwise_lower_bound_exp(int k) { return std::exp(-1.147 - 1.7103 * k); }

enum class BoundDirection { at_most, at_least };

struct MeasureEstimate {
  double estimate = 0.0;
  std::uint64_t samples = 0;
  double ci_halfwidth = 0.0;
  double theoretical_bound = 0.0;
  BoundDirection direction = BoundDirection::at_most;
  bool passes = false;

  friend bool operator==(const MeasureEstimate&, const MeasureEstimate&) = default;
};

/// at_most: estimate - halfwidth <= bound. at_least: estimate + halfwidth > bound.
inline bool judge(const MeasureEstimate& m) {
  if (m.direction == BoundDirection::at_most) return m.estimate - m.ci_halfwidth <= m.theoretical_bound;
  return m.estimate + m.ci_halfwidth > m.theoretical_bound;
}

inline constexpr double one_sided_z95 = 1.6448536269514722;

namespace detail {

// f_N(x) <= threshold, stopping as soon as the running product drops below.
inline bool partial_at_most(const AngleRep& x, int N, double log_threshold) {
  double acc = 0.0;
  for (int n = 0; n <= N; ++n) {
    const ReducedArg r = reduce_argument(x, n);
    if (r.is_zero()) return true;
    acc += exponent_value(n) * log_abs_sin(r);
    if (acc <= log_threshold) return true;
  }
  return false;
}

// Counts task(i) == true for i < count over fixed blocks; integer counts
// make the total independent of the worker count.
template <class Pred>
std::uint64_t parallel_count(std::uint64_t count, unsigned workers, Pred&& pred) {
  constexpr std::uint64_t block = 4096;
  const std::uint64_t blocks = (count + block - 1) / block;
  std::vector<std::uint64_t> hits(blocks, 0);
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::uint64_t lo = b * block;
    const std::uint64_t hi = std::min(count, lo + block);
    std::uint64_t h = 0;
    for (std::uint64_t i = lo; i < hi; ++i) h += pred(i) ? 1 : 0;
    hits[b] = h;
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  return total;
}

}  // namespace detail

/// Monte Carlo estimate of the measure of {x in [0, pi] : f_N(x) <= 1/(3.15 * 5.531^k)}
/// tested against 37/(6 * 2^k). Sample i is the random expansion (seed, i).
inline MeasureEstimate empirical_small_value_measure(int k, int N, std::uint64_t samples,
                                                     std::uint64_t seed = default_seed, unsigned workers = 0) {
  if (samples == 0) throw error(errc::invalid_sample_count, "samples must be positive");
  if (k < 2) throw error(errc::invalid_argument, "k must be at least 2");
  if (N < 64) throw error(errc::invalid_argument, "evaluation depth must be at least 64");
  const double log_threshold = std::log(pointwise_lower_bound(k));
  const std::uint64_t hits = detail::parallel_count(samples, workers, [&](std::uint64_t i) {
    return detail::partial_at_most(AngleRep::random(seed, i), N, log_threshold);
  });
  MeasureEstimate m;
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(hits) / n;
  m.estimate = std::numbers::pi * p;
  m.samples = samples;
  m.ci_halfwidth = std::numbers::pi * one_sided_z95 * std::sqrt(p * (1.0 - p) / n);
  m.theoretical_bound = excluded_length_bound(k);
  m.direction = BoundDirection::at_most;
  m.passes = judge(m);
  return m;
}

inline double b_k_threshold() { return std::exp(-std::numbers::pi * std::numbers::pi / 2.0); }

/// Grid estimate of the measure of B_k = {x in [0, pi] : f_k(x) > e^(-pi^2/2)}
/// from the midpoints (2i+1) pi/(2G). The slack charges one cell for every
/// change of membership between neighbouring midpoints.
inline MeasureEstimate b_k_measure(int k, std::uint64_t grid_points, unsigned workers = 0) {
  if (k < 0) throw error(errc::invalid_argument, "k must be non-negative");
  if (grid_points < 2) throw error(errc::invalid_sample_count, "grid needs at least 2 points");
  if (grid_points > (std::uint64_t{1} << 40)) throw error(errc::invalid_argument, "grid too large");
  const double log_threshold = -std::numbers::pi * std::numbers::pi / 2.0;
  const auto G = static_cast<std::int64_t>(grid_points);
  std::vector<std::uint8_t> inside(grid_points, 0);
  constexpr std::uint64_t block = 4096;
  const std::uint64_t blocks = (grid_points + block - 1) / block;
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::uint64_t hi = std::min<std::uint64_t>(grid_points, (b + 1) * block);
    for (std::uint64_t i = b * block; i < hi; ++i) {
      const AngleRep x = AngleRep::rational(2 * static_cast<std::int64_t>(i) + 1, 2 * G);
      inside[i] = !detail::partial_at_most(x, k, log_threshold);
    }
  });
  std::uint64_t count = 0, changes = 0;
  for (std::uint64_t i = 0; i < grid_points; ++i) {
    count += inside[i];
    if (i > 0 && inside[i] != inside[i - 1]) ++changes;
  }
  MeasureEstimate m;
  const double cell = std::numbers::pi / static_cast<double>(grid_points);
  m.estimate = cell * static_cast<double>(count);
  m.samples = grid_points;
  m.ci_halfwidth = cell * static_cast<double>(changes);
  m.theoretical_bound = std::numbers::pi / 2.0;
  m.direction = BoundDirection::at_least;
  m.passes = judge(m);
  return m;
}

/// Integral of log f_k over [0, pi]. Every log|sin(2^n x)| integrates to
/// -pi log 2 there, so the sum is -2 pi log 2 * sum 1/(2n+1)^2.
inline double exact_log_integral(int k) {
  if (k < 0) throw error(errc::invalid_argument, "k must be non-negative");
  CompensatedSum s;
  for (int n = k; n >= 0; --n) {
    const double odd = 2.0 * n + 1.0;
    s.add(1.0 / (odd * odd));
  }
  return -2.0 * std::numbers::pi * std::numbers::ln2 * s.value();
}

/// Layer-cake integral of equally weighted samples over a domain of the given
/// length: the integral over y in [0, y_max] of the superlevel measure
/// length * #{v > y}/N, by the trapezoid rule on y_points levels.
inline double layer_cake(std::span<const double> samples, double domain_length, std::size_t y_points,
                         double y_max = 1.0) {
  if (samples.empty()) throw error(errc::invalid_sample_count, "no samples");
  if (y_points < 2) throw error(errc::invalid_argument, "level grid needs at least 2 points");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  auto superlevel = [&](double y) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), y);
    return domain_length * static_cast<double>(above) / n;
  };
  const double h = y_max / static_cast<double>(y_points - 1);
  CompensatedSum sum;
  for (std::size_t j = 0; j < y_points; ++j) {
    const double w = (j == 0 || j + 1 == y_points) ? 0.5 : 1.0;
    sum.add(w * superlevel(h * static_cast<double>(j)));
  }
  return h * sum.value();
}

/// Layer-cake integral of f_k over [0, pi] from the x midpoints
/// (2i+1) pi/(2 x_grid), exactly reduced.
inline double layer_cake_integral(int k, std::size_t x_grid, std::size_t y_grid, unsigned workers = 0) {
  if (k < 0) throw error(errc::invalid_argument, "k must be non-negative");
  if (x_grid < 2 || y_grid < 2) throw error(errc::invalid_argument, "grids need at least 2 points");
  std::vector<double> values(x_grid);
  const auto G = static_cast<std::int64_t>(x_grid);
  constexpr std::size_t block = 4096;
  const std::size_t blocks = (x_grid + block - 1) / block;
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::size_t hi = std::min(x_grid, (b + 1) * block);
    for (std::size_t i = b * block; i < hi; ++i)
      values[i] = partial_product(AngleRep::rational(2 * static_cast<std::int64_t>(i) + 1, 2 * G), k).value;
  });
  return layer_cake(values, std::numbers::pi, y_grid);
}

}  // namespace sinprod
