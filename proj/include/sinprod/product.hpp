#pragma once

// Factors [sin(2^n x)]^(2/(2n+1)^2), partial products f_k and enclosures of
// the infinite product f.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "sinprod/angle.hpp"
#include "sinprod/lattice.hpp"
#include "sinprod/sinpi.hpp"

namespace sinprod {

inline constexpr int default_truncation_depth = 64;

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  friend bool operator==(const Rational&, const Rational&) = default;
};

/// 2/(2n+1)^2, already in lowest terms since (2n+1)^2 is odd.
constexpr Rational factor_exponent(std::int64_t n) {
  const std::int64_t odd = 2 * n + 1;
  return {2, odd * odd};
}

inline double exponent_value(int n) {
  const double odd = 2.0 * n + 1.0;
  return 2.0 / (odd * odd);
}

/// Factor value from the distance d in [0, 1/2] of 2^n x/pi to the lattice.
/// Shared by the generic evaluator and the quadrature kernel.
inline double factor_from_distance(double d, int n) {
  const double s = sinpi_folded(d);
  if (s == 0.0) return 0.0;
  if (n == 0) return s * s;
  return std::pow(s, exponent_value(n));
}

inline double factor_value(const AngleRep& x, int n) {
  const ReducedArg r = reduce_argument(x, n);
  if (r.is_zero()) return 0.0;
  if (r.dist_exp > detail::normal_distance_exponent) return factor_from_distance(r.distance(), n);
  return std::exp(exponent_value(n) * log_abs_sin(r));
}

/// g_n(x) = (2/(2n+1)^2) log|sin(2^n x)|
inline double log_factor(const AngleRep& x, int n) {
  const ReducedArg r = reduce_argument(x, n);
  return exponent_value(n) * log_abs_sin(r);
}

struct ProductEnclosure {
  int depth = 0;
  double value = 1.0;
  double log_value = 0.0;
  double lower = 0.0;
  bool exact_zero = false;

  friend bool operator==(const ProductEnclosure&, const ProductEnclosure&) = default;
};

/// f_k(x), accumulated as a sum of logs. A structural zero is reported as
/// exact_zero; underflow of a positive product leaves log_value finite.
inline ProductEnclosure partial_product(const AngleRep& x, int k) {
  if (k < 0) throw error(errc::invalid_argument, "negative depth");
  ProductEnclosure enc;
  enc.depth = k;
  double acc = 0.0;
  for (int n = 0; n <= k; ++n) {
    const ReducedArg r = reduce_argument(x, n);
    if (r.is_zero()) {
      enc.value = 0.0;
      enc.log_value = -std::numeric_limits<double>::infinity();
      enc.exact_zero = true;
      return enc;
    }
    acc += exponent_value(n) * log_abs_sin(r);
  }
  enc.log_value = acc;
  enc.value = std::exp(acc);
  return enc;
}

inline double log_partial_product(const AngleRep& x, int k) { return partial_product(x, k).log_value; }

/// Lower bound on sum_{n>N} (2/(2n+1)^2) (log(23/24) - (sqrt(n) + k) log 2),
/// the log of the smallest possible tail when every factor beyond N obeys
/// |sin(2^n x)| > (23/24) 2^-(sqrt(n)+k).
///
/// A block of terms is summed directly; the rest is bounded by integrals of
/// the decreasing majorants 2/(2x+1)^2 and 2 sqrt(x)/(2x+1)^2.
inline double certified_tail_log(int N, int k) {
  constexpr int explicit_terms = 4096;
  const double base = std::log(23.0 / 24.0) - static_cast<double>(k) * std::numbers::ln2;
  double sum = 0.0;
  const std::int64_t last = static_cast<std::int64_t>(N) + explicit_terms;
  for (std::int64_t n = last; n > N; --n) {
    const double odd = 2.0 * static_cast<double>(n) + 1.0;
    const double e = 2.0 / (odd * odd);
    sum += e * (base - std::sqrt(static_cast<double>(n)) * std::numbers::ln2);
  }
  const double M = static_cast<double>(last);
  const double weight_tail = 1.0 / (2.0 * M + 1.0);
  const double sqrt_tail =
      std::atan(1.0 / std::sqrt(2.0 * M)) / std::numbers::sqrt2 + std::sqrt(M) / (2.0 * M + 1.0);
  return sum + base * weight_tail - std::numbers::ln2 * sqrt_tail;
}

/// f_N(x) together with a certified lower bound on f(x) when x can be shown
/// to avoid the excluded lattice neighbourhoods.
///
/// Certificates are only attempted for bit-stream angles: dyadic angles are
/// zeros of f, and machine-precision angles are dyadic too. Membership in A_k
/// is checked 64 levels past N.
inline ProductEnclosure evaluate_limit(const AngleRep& x, int N = default_truncation_depth,
                                       bool want_certificate = false, int k_max = 64) {
  ProductEnclosure enc = partial_product(x, N);
  if (enc.exact_zero || !want_certificate || !x.is_bit_stream()) return enc;
  const auto k = least_member_k(x, N + 64, k_max);
  if (!k) return enc;
  const double tail = certified_tail_log(N, *k);
  // the relative guard absorbs rounding in the N+1 accumulated logs
  enc.lower = std::exp(enc.log_value + tail) * (1.0 - 1e-12);
  return enc;
}

}  // namespace sinprod
