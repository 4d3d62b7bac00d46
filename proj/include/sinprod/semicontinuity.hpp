#pragma once

// Upper-semicontinuity witnesses (k, lambda, delta): for |t - x| < delta the
// partial product f_k cannot rise by more than epsilon above its value at x.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "sinprod/angle.hpp"
#include "sinprod/optimize.hpp"
#include "sinprod/product.hpp"
#include "sinprod/random.hpp"
#include "sinprod/summation.hpp"

namespace sinprod {

inline constexpr int default_reference_depth = 1024;
inline constexpr int max_certificate_depth = 1 << 22;

struct UscWitness {
  AngleRep x;
  double epsilon = 0.0;
  int k = 0;
  double lambda = 0.0;  // f_k(x)
  double delta = 0.0;
  double log_delta = 0.0;  // delta itself underflows once (2k+1)^2/2 * log(lambda) passes -700
  bool certified = false;
  bool lattice = false;  // x is a zero of the factor at depth k

  friend bool operator==(const UscWitness&, const UscWitness&) = default;
};

namespace detail {

inline double odd_square(int k) {
  const double o = 2.0 * k + 1.0;
  return o * o;
}

// log of (2k+1)^2 lambda^((2k+1)^2/2) eps~ / (21 * 2^(k+1))
inline double log_generic_delta(int k, double lambda, double epsilon) {
  const double eps_eff = std::min(epsilon, 1.0 / 7.0);
  const double sq = odd_square(k);
  return std::log(sq) + sq / 2.0 * std::log(lambda) + std::log(eps_eff) - std::log(21.0) -
         static_cast<double>(k + 1) * std::numbers::ln2;
}

// log of arcsin(min(1, eps^((2n+1)^2/2))) / 2^n
inline double log_lattice_delta(int n, double epsilon) {
  const double lv = odd_square(n) / 2.0 * std::log(epsilon);
  double head = 0.0;
  if (lv >= 0.0) head = std::log(std::numbers::pi / 2.0);
  else if (lv > -600.0) head = std::log(std::asin(std::exp(lv)));
  else head = lv;  // arcsin(v) == v to double precision
  return head - static_cast<double>(n) * std::numbers::ln2;
}

// first depth <= limit with a vanishing factor
inline std::optional<int> first_zero_depth(const AngleRep& x, int limit) {
  for (int n = 0; n <= limit; ++n)
    if (reduce_argument(x, n).is_zero()) return n;
  return std::nullopt;
}

}  // namespace detail

/// Witness for upper semicontinuity at x.
///
/// At a lattice point with vanishing factor at depth n, |t - x| < delta with
/// delta = arcsin(min(1, eps^((2n+1)^2/2)))/2^n keeps that factor below eps.
/// Elsewhere k is the least depth with f_k(x) <= L + eps^2, where L is a
/// certified lower bound on f(x) when one exists and the proxy f_{n_ref}(x)
/// otherwise, and delta follows the unified formula.
///
/// The certified floor trails f(x) by about log 2/sqrt(d) at depth d, so the
/// certificate depth starts at n_ref (or where that gap drops to eps^2/2) and
/// grows fourfold up to max_certificate_depth until the floor is reachable.
inline UscWitness usc_witness(const AngleRep& x, double epsilon, int n_ref = default_reference_depth,
                              bool strict = false) {
  if (!(epsilon > 0.0)) throw error(errc::invalid_argument, "epsilon must be positive");
  if (n_ref < 0) throw error(errc::invalid_argument, "negative reference depth");
  const int depth = std::min(n_ref, x.max_reliable_depth());
  UscWitness w;
  w.x = x;
  w.epsilon = epsilon;

  if (const auto z = detail::first_zero_depth(x, depth)) {
    w.k = *z;
    w.lambda = 0.0;
    w.lattice = true;
    w.certified = true;
    w.log_delta = detail::log_lattice_delta(*z, epsilon);
    w.delta = std::exp(w.log_delta);
    return w;
  }

  const double eps2 = epsilon * epsilon;
  // least n <= limit with f_n(x) <= target; acc ends as log f_n(x)
  double acc = 0.0;
  auto least_below = [&](double target, int limit) -> std::optional<int> {
    acc = 0.0;
    for (int n = 0; n <= limit; ++n) {
      acc += log_factor(x, n);
      if (std::exp(acc) <= target) return n;
    }
    return std::nullopt;
  };

  std::optional<int> found;
  if (x.is_bit_stream()) {
    const double gap_depth = std::pow(2.0 * std::numbers::ln2 / eps2, 2.0);
    int d = std::max(depth, static_cast<int>(std::min(gap_depth, static_cast<double>(max_certificate_depth))));
    for (;;) {
      const ProductEnclosure ref = evaluate_limit(x, d, true);
      if (!(ref.lower > 0.0)) break;
      found = least_below(ref.lower + eps2, d);
      if (found || d >= max_certificate_depth) break;
      d = std::min(4 * std::max(d, 16), max_certificate_depth);
    }
  }
  w.certified = found.has_value();
  if (!found) {
    if (strict) throw error(errc::certificate_unavailable, "no certified lower bound on f(" + x.describe() + ") within eps^2");
    found = least_below(partial_product(x, depth).value + eps2, depth);
  }
  w.k = *found;
  w.lambda = std::exp(acc);
  w.log_delta = detail::log_generic_delta(w.k, w.lambda, epsilon);
  w.delta = std::exp(w.log_delta);
  return w;
}

/// g_n(t) - g_n(x) without subtracting two logs. For nearby points the phase
/// shift d = 2^n (t - x)/pi is exact in fixed point, and
/// |sin(pi(a + d))| / |sin(pi a)| = |1 - 2 sin^2(pi d/2) + sin(pi d) cot(pi a)|.
inline double log_factor_rise(const AngleRep& x, const AngleRep& t, int n) {
  const ReducedArg rx = reduce_argument(x, n);
  const double d = std::ldexp(difference_over_pi(t, x), n);
  if (!rx.is_zero() && std::fabs(d) < 0.25) {
    const double frac = rx.t - std::floor(rx.t);
    const double dist = rx.distance();
    const double cot = (frac < 0.5 ? 1.0 : -1.0) * std::cos(std::numbers::pi * dist) / abs_sin(rx);
    const double h = std::sin(std::numbers::pi * d / 2.0);
    const double arg = -2.0 * h * h + std::sin(std::numbers::pi * d) * cot;
    if (std::isfinite(arg) && arg > -1.0) return exponent_value(n) * std::log1p(arg);
  }
  return log_factor(t, n) - log_factor(x, n);
}

/// 2^(n+1)|t - x| / ((2n+1)^2 |sin(2^n x)|), the bound on g_n(t) - g_n(x).
inline double lemma2_rhs(const AngleRep& x, const AngleRep& t, int n) {
  const ReducedArg rx = reduce_argument(x, n);
  const ReducedArg rt = reduce_argument(t, n);
  if (rx.is_zero() || rt.is_zero()) throw error(errc::zero_factor, "sine vanishes at depth " + std::to_string(n));
  const double dist = std::fabs(difference_over_pi(t, x)) * std::numbers::pi;
  return std::ldexp(dist, n + 1) / (detail::odd_square(n) * abs_sin(rx));
}

struct UscReport {
  UscWitness witness;
  std::uint64_t trials = 0;
  std::uint64_t log_checks = 0;
  std::uint64_t log_violations = 0;
  double max_log_ratio = 0.0;  // worst (log f_k(t) - log f_k(x)) / bound
  std::uint64_t value_checks = 0;
  std::uint64_t value_violations = 0;
  double max_value_excess = -std::numeric_limits<double>::infinity();  // worst f_k(t) - f_k(x) - eps
  bool passes = true;

  friend bool operator==(const UscReport&, const UscReport&) = default;
};

namespace detail {

struct TrialOutcome {
  bool log_checked = false;
  bool log_ok = true;
  double log_ratio = 0.0;
  bool value_ok = true;
  double value_excess = 0.0;
};

inline TrialOutcome run_trial(const UscWitness& w, double log_fx, double fx, double u) {
  TrialOutcome o;
  // offset u * delta in radians is u * delta/pi in y units, kept as mantissa * 2^e
  const double log2_offset = w.log_delta / std::numbers::ln2 - std::log2(std::numbers::pi);
  const auto scale_exp = static_cast<std::int64_t>(std::floor(log2_offset));
  const double mant = u * std::exp2(log2_offset - static_cast<double>(scale_exp));
  const std::size_t words = words_for_offset(mant, w.k, scale_exp);
  const AngleRep t = perturbed(w.x, mant, words, scale_exp);
  const ProductEnclosure ft = partial_product(t, w.k);

  if (w.lattice) {
    // f(x) = 0 here, so the requirement is f_k(t) < eps
    o.value_excess = ft.value - w.epsilon;
    o.value_ok = ft.value < w.epsilon;
    return o;
  }
  o.log_checked = true;
  const double sq = odd_square(w.k);
  // log of 3 * 2^(k+1) |t - x| / ((2k+1)^2 lambda^((2k+1)^2/2))
  const double log_bound = std::log(3.0) + static_cast<double>(w.k + 1) * std::numbers::ln2 + std::log(std::fabs(u)) +
                           w.log_delta - std::log(sq) - sq / 2.0 * std::log(w.lambda);
  const double rise = ft.log_value - log_fx;
  const double bound = std::exp(log_bound);
  o.log_ratio = rise / bound;
  o.log_ok = rise < bound;
  o.value_excess = ft.value - fx - w.epsilon;
  o.value_ok = ft.value < fx + w.epsilon;
  return o;
}

}  // namespace detail

/// Samples t uniformly from (x - delta, x + delta) and checks
/// (a) log f_k(t) - log f_k(x) < 3 * 2^(k+1)|t - x| / ((2k+1)^2 lambda^((2k+1)^2/2))
/// (b) f_k(t) < f_k(x) + eps
/// At lattice points only f_k(t) < eps is checked.
inline UscReport check_usc(const AngleRep& x, double epsilon, std::uint64_t trials, std::uint64_t seed = default_seed,
                           int n_ref = default_reference_depth, bool strict = false, unsigned workers = 0) {
  UscReport rep;
  rep.witness = usc_witness(x, epsilon, n_ref, strict);
  rep.trials = trials;
  if (trials == 0) return rep;
  const UscWitness& w = rep.witness;
  const ProductEnclosure fx = partial_product(x, w.k);
  const CounterRng rng(seed, 0x75c0);

  std::vector<detail::TrialOutcome> out(trials);
  constexpr std::uint64_t block = 256;
  const std::uint64_t blocks = (trials + block - 1) / block;
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::uint64_t hi = std::min<std::uint64_t>(trials, (b + 1) * block);
    for (std::uint64_t i = b * block; i < hi; ++i)
      out[i] = detail::run_trial(w, fx.log_value, fx.value, rng.symmetric_nonzero(i));
  });
  for (const auto& o : out) {
    if (o.log_checked) {
      ++rep.log_checks;
      if (!o.log_ok) ++rep.log_violations;
      rep.max_log_ratio = std::max(rep.max_log_ratio, o.log_ratio);
    }
    ++rep.value_checks;
    if (!o.value_ok) ++rep.value_violations;
    rep.max_value_excess = std::max(rep.max_value_excess, o.value_excess);
  }
  rep.passes = rep.log_violations == 0 && rep.value_violations == 0;
  return rep;
}

struct LambdaMaxCheck {
  double argmax = 0.0;
  double max_value = 0.0;
  double sin_argmax = 0.0;
  double expected_sin = 0.0;  // sqrt(10/11)
  bool passes = false;

  friend bool operator==(const LambdaMaxCheck&, const LambdaMaxCheck&) = default;
};

/// Maximizes f_1(x) = sin^2(x) sin(2x)^(2/9) on (0, pi/2).
inline LambdaMaxCheck lemma1_lambda_max_check() {
  auto f1 = [](double x) { return std::sin(x) * std::sin(x) * std::pow(std::sin(2.0 * x), 2.0 / 9.0); };
  const Extremum e = golden_section_maximize(f1, 0.5, 1.5, 1e-15, 400);
  LambdaMaxCheck c;
  c.argmax = e.x;
  c.max_value = e.value;
  c.sin_argmax = std::sin(e.x);
  c.expected_sin = std::sqrt(10.0 / 11.0);
  c.passes = c.max_value < 0.81 && std::fabs(c.sin_argmax - c.expected_sin) < 1e-6;
  return c;
}

}  // namespace sinprod
