#pragma once

// Midpoint estimates M_k of the integral of f over [0, pi], convergence
// diagnostics and the a/(k - b) extrapolation.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "sinprod/error.hpp"
#include "sinprod/optimize.hpp"
#include "sinprod/product.hpp"
#include "sinprod/summation.hpp"

namespace sinprod {

inline constexpr int max_midpoint_k = 32;
inline constexpr int chunk_bits = 10;

namespace detail {

// One depth n evaluated on the residue u mod 2^p, p = L + 1 - n.
struct LevelKernel {
  int n = 0;
  int p = 0;
  std::uint64_t mask = 0;
  std::uint64_t full = 0;
  double scale = 0.0;  // 2^-p

  double operator()(std::uint64_t u) const {
    const std::uint64_t w = u & mask;
    const std::uint64_t dn = std::min(w, full - w);
    return factor_from_distance(static_cast<double>(dn) * scale, n);
  }
};

inline LevelKernel make_level(int n, int p) {
  LevelKernel k;
  k.n = n;
  k.p = p;
  k.full = std::uint64_t{1} << p;
  k.mask = k.full - 1;
  k.scale = std::ldexp(1.0, -p);
  return k;
}

}  // namespace detail

/// Midpoint rule for the integral of f_depth over [0, pi] with 2^L equal
/// intervals. Nodes are u*pi/2^(L+1) for odd u; the reflection x -> pi - x
/// lets only u < 2^L be evaluated.
///
/// Depth n sees u only through u mod 2^(L+1-n). Nodes are grouped by their
/// residue modulo 2^(c+1) into 2^c canonical chunks; inside a chunk the
/// remaining index bits run in bit-reversed order so each partial product at
/// a coarse resolution is reused by every finer residue below it.
/// Chunk sums are combined along a fixed tree, so the result does not depend
/// on the worker count.
inline double midpoint_integral(int depth, int log2_intervals, unsigned workers = 0) {
  const int L = log2_intervals;
  if (depth < 0) throw error(errc::invalid_argument, "negative depth");
  if (L < 1 || L > max_midpoint_k + 1) throw error(errc::depth_too_large, "log2_intervals must lie in [1, 33]");
  // depth L+1 sees an odd multiple of pi in every node
  if (depth >= L + 1) return 0.0;

  const int c = std::min(chunk_bits, L - 1);
  const int inner_bits = L - 1 - c;
  const std::size_t chunks = std::size_t{1} << c;

  // resolution of depth n is min(L + 1 - n, L); depth L is identically 1
  std::vector<detail::LevelKernel> prefix;
  std::vector<std::vector<detail::LevelKernel>> by_resolution(static_cast<std::size_t>(L + 1));
  for (int n = 0; n <= std::min(depth, L - 1); ++n) {
    const int p = L + 1 - n;
    const int q = std::min(p, L);
    if (q <= c + 1) prefix.push_back(detail::make_level(n, p));
    else by_resolution[static_cast<std::size_t>(q)].push_back(detail::make_level(n, p));
  }

  std::vector<CompensatedSum> partial(chunks);
  parallel_for(chunks, workers, [&](std::size_t chunk) {
    const std::uint64_t r = 2 * static_cast<std::uint64_t>(chunk) + 1;
    std::array<double, max_midpoint_k + 2> prod{};
    double base = 1.0;
    for (const auto& lv : prefix) base *= lv(r);
    prod[static_cast<std::size_t>(c + 1)] = base;

    CompensatedSum acc;
    const std::uint64_t steps = std::uint64_t{1} << inner_bits;
    std::uint64_t i = 0;
    for (std::uint64_t s = 0; s < steps; ++s) {
      int from = c + 2;
      if (s != 0) {
        const int t = std::countr_zero(s);
        i ^= ((std::uint64_t{2} << t) - 1) << (inner_bits - 1 - t);
        from = L - t;
      }
      const std::uint64_t u = r + (i << (c + 1));
      for (int q = from; q <= L; ++q) {
        double v = prod[static_cast<std::size_t>(q - 1)];
        for (const auto& lv : by_resolution[static_cast<std::size_t>(q)]) v *= lv(u);
        prod[static_cast<std::size_t>(q)] = v;
      }
      acc.add(prod[static_cast<std::size_t>(L)]);
    }
    partial[chunk] = acc;
  });

  const double total = pairwise_total(partial).value();
  return std::ldexp(std::numbers::pi, 1 - L) * total;
}

/// M_k: midpoint estimate of 2 * integral over [0, pi/2] of f_{k+1} with 2^k
/// intervals (the factor at depth k+1 is 1 at every node).
inline double midpoint_estimate(int k, unsigned workers = 0) {
  if (k < 0) throw error(errc::invalid_argument, "k must be non-negative");
  if (k > max_midpoint_k) throw error(errc::depth_too_large, "k must not exceed 32");
  return midpoint_integral(k, k + 1, workers);
}

/// The factor used by the quadrature kernel at node u*pi/2^(L+1) and depth n,
/// exposed for auditing against the generic evaluator.
inline double node_factor(std::uint64_t u, int log2_intervals, int n) {
  const int p = log2_intervals + 1 - n;
  if (p <= 0) return 0.0;
  return detail::make_level(n, p)(u);
}

// ---------------------------------------------------------------------------

inline constexpr double default_extrapolation_a = 0.4044;
inline constexpr double default_extrapolation_b = 0.27;

struct ConvergenceRow {
  int k = 0;
  double m_k = 0.0;
  std::optional<double> inv_sqrt_diff;
  double extrapolated = 0.0;

  friend bool operator==(const ConvergenceRow&, const ConvergenceRow&) = default;
};

inline double extrapolate(double m_k, int k, double a, double b) { return m_k - a / (static_cast<double>(k) - b); }

/// Rows from precomputed M_k values for consecutive k starting at k_first.
inline std::vector<ConvergenceRow> convergence_rows(int k_first, std::span<const double> m, double a, double b) {
  std::vector<ConvergenceRow> rows;
  rows.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    ConvergenceRow row;
    row.k = k_first + static_cast<int>(i);
    row.m_k = m[i];
    if (i > 0 && m[i - 1] > m[i]) row.inv_sqrt_diff = 1.0 / std::sqrt(m[i - 1] - m[i]);
    row.extrapolated = extrapolate(row.m_k, row.k, a, b);
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<ConvergenceRow> convergence_table(int k_min, int k_max, double a = default_extrapolation_a,
                                                     double b = default_extrapolation_b, unsigned workers = 0) {
  if (k_min < 1) throw error(errc::invalid_argument, "k_min must be at least 1");
  if (k_max > max_midpoint_k) throw error(errc::depth_too_large, "k_max must not exceed 32");
  if (k_max < k_min) throw error(errc::invalid_argument, "k_max must not be below k_min");
  std::vector<double> m;
  for (int k = k_min; k <= k_max; ++k) m.push_back(midpoint_estimate(k, workers));
  return convergence_rows(k_min, m, a, b);
}

struct FitWindow {
  int lo = 0;
  int hi = 0;

  friend bool operator==(const FitWindow&, const FitWindow&) = default;
};

struct FitResult {
  double a = 0.0;
  double b = 0.0;
  double m_inf = 0.0;
  FitWindow window;
  double rms_residual = 0.0;

  friend bool operator==(const FitResult&, const FitResult&) = default;
};

namespace detail {

struct LinearFit {
  double m_inf = 0.0;
  double a = 0.0;
  double rss = 0.0;
  bool ok = false;
};

// m ~ m_inf + a * x with x = 1/(k - b)
inline LinearFit fit_for_b(std::span<const ConvergenceRow> rows, double b) {
  const double n = static_cast<double>(rows.size());
  double xm = 0.0, ym = 0.0;
  for (const auto& r : rows) {
    xm += 1.0 / (r.k - b);
    ym += r.m_k;
  }
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& r : rows) {
    const double dx = 1.0 / (r.k - b) - xm;
    sxx += dx * dx;
    sxy += dx * (r.m_k - ym);
  }
  LinearFit f;
  if (!(sxx > 0.0) || !std::isfinite(sxx)) return f;
  f.a = sxy / sxx;
  f.m_inf = ym - f.a * xm;
  for (const auto& r : rows) {
    const double e = r.m_k - (f.m_inf + f.a / (r.k - b));
    f.rss += e * e;
  }
  f.ok = std::isfinite(f.rss);
  return f;
}

}  // namespace detail

/// Least-squares fit of m_k ~ m_inf + a/(k - b) over rows with k in the
/// window. Linear in (m_inf, a) for fixed b; b is scanned over (0, k_lo) and
/// then refined by golden-section search.
inline FitResult fit_ab(std::span<const ConvergenceRow> rows, FitWindow window) {
  std::vector<ConvergenceRow> sel;
  for (const auto& r : rows)
    if (r.k >= window.lo && r.k <= window.hi) sel.push_back(r);
  if (sel.size() < 4) throw error(errc::degenerate_fit, "fit needs at least 4 rows in the window");
  const int k_lo = std::min_element(sel.begin(), sel.end(), [](auto& x, auto& y) { return x.k < y.k; })->k;
  if (k_lo <= 0) throw error(errc::degenerate_fit, "window must start above k = 0");

  auto rss = [&](double b) {
    const auto f = detail::fit_for_b(sel, b);
    return f.ok ? f.rss : std::numeric_limits<double>::infinity();
  };
  constexpr int grid = 512;
  const double span_b = static_cast<double>(k_lo);
  int best = 1;
  double best_rss = std::numeric_limits<double>::infinity();
  for (int i = 1; i < grid; ++i) {
    const double v = rss(span_b * i / grid);
    if (v < best_rss) {
      best_rss = v;
      best = i;
    }
  }
  const double lo = span_b * (best - 1) / grid;
  const double hi = span_b * (best + 1) / grid;
  const Extremum e = golden_section_minimize(rss, lo, hi, 1e-15, 400);
  const double b = e.value <= best_rss ? e.x : span_b * best / grid;
  const auto f = detail::fit_for_b(sel, b);
  if (!f.ok) throw error(errc::degenerate_fit, "singular fit");
  FitResult out;
  out.a = f.a;
  out.b = b;
  out.m_inf = f.m_inf;
  out.window = window;
  out.rms_residual = std::sqrt(f.rss / static_cast<double>(sel.size()));
  return out;
}

/// (pi/2) e^(-pi^2/2): half the interval carries f_k > e^(-pi^2/2).
inline double lebesgue_lower_bound() {
  return std::numbers::pi / 2.0 * std::exp(-std::numbers::pi * std::numbers::pi / 2.0);
}

/// Least-squares slope of (M_{k-1} - M_k)^(-1/2) against k.
inline double diff_diagnostic_slope(std::span<const ConvergenceRow> rows) {
  double n = 0.0, xm = 0.0, ym = 0.0;
  for (const auto& r : rows)
    if (r.inv_sqrt_diff) {
      n += 1.0;
      xm += r.k;
      ym += *r.inv_sqrt_diff;
    }
  if (n < 3.0) throw error(errc::insufficient_data, "slope needs at least 3 rows with a difference column");
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& r : rows)
    if (r.inv_sqrt_diff) {
      sxx += (r.k - xm) * (r.k - xm);
      sxy += (r.k - xm) * (*r.inv_sqrt_diff - ym);
    }
  return sxy / sxx;
}

}  // namespace sinprod
