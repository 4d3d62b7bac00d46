#pragma once

// The closed form at pi/3 and the explicit zero-free point whose partial
// products still tend to zero.

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sinprod/angle.hpp"
#include "sinprod/product.hpp"

namespace sinprod {

/// f(pi/3) = (3/4)^(pi^2/8): every factor is |sin(pi/3)| = sqrt(3)/2.
inline double closed_form_pi_thirds() {
  return std::exp(std::log(0.75) * std::numbers::pi * std::numbers::pi / 8.0);
}

/// Richardson-style completion of a truncated pi/3 product: the missing
/// factors are known exactly, so f = f_N * (3/4)^(sum_{n>N} 1/(2n+1)^2).
inline double pi_thirds_tail_corrected(const ProductEnclosure& partial) {
  // pi^2/8 minus the compensated head of the odd-square series
  double sum = 0.0, comp = 0.0;
  for (int n = 0; n <= partial.depth; ++n) {
    const double odd = 2.0 * n + 1.0;
    const double term = 1.0 / (odd * odd);
    const double t = sum + term;
    comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  const double tail = (std::numbers::pi * std::numbers::pi / 8.0 - sum) - comp;
  return std::exp(partial.log_value + std::log(0.75) * tail);
}

/// The depths n = 2^(2^j).
inline std::uint64_t special_depth(int j) {
  if (j < 0 || j > 5) throw error(errc::invalid_argument, "special depth index must lie in [0, 5]");
  return std::uint64_t{1} << (std::uint64_t{1} << j);
}

struct FactorBound {
  std::int64_t n = 0;
  double bound = 0.0;
  bool below_nine_tenths = false;
};

/// pi^(2/(2n+1)^2) * 2^(-2(n^2-n)/(2n+1)^2), the bound on the constructed
/// point's factor at a special depth n.
inline FactorBound factor_bound_at(std::int64_t n) {
  if (n < 1) throw error(errc::invalid_argument, "factor bound needs n >= 1");
  const double nd = static_cast<double>(n);
  const double odd2 = (2.0 * nd + 1.0) * (2.0 * nd + 1.0);
  const double lg = (2.0 / odd2) * std::log(std::numbers::pi) - (2.0 * (nd * nd - nd) / odd2) * std::numbers::ln2;
  FactorBound fb;
  fb.n = n;
  fb.bound = std::exp(lg);
  fb.below_nine_tenths = fb.bound < 0.9;
  return fb;
}

/// Binary expansion of y = sum_{j>=0} 2^-(2^(2^(2j))) (1 - 2^-(2^(2^(2j+1)) - 2^(2^(2j))))
/// = 0.0011 0000 0000 0000 1...1 0...: alternating runs of ones and zeros on
/// (2^(2^j), 2^(2^(j+1))], ones for even j.
class ConstructedZeroBits final : public BitSource {
 public:
  bool bit(std::uint64_t pos) const override {
    if (pos <= 2) return false;
    for (int j = 0; j < 5; ++j)
      if (pos <= boundary(j + 1)) return j % 2 == 0;
    return false;  // j = 5 run, zeros up to 2^64
  }

  std::uint64_t window(std::uint64_t pos) const override {
    std::uint64_t w = 0;
    std::uint64_t p = pos;
    int filled = 0;
    while (filled < 64) {
      const bool b = bit(p);
      const std::uint64_t len = run_end_or_max(p) - p;
      const int take = static_cast<int>(std::min<std::uint64_t>(len, static_cast<std::uint64_t>(64 - filled)));
      w = take == 64 ? 0 : w << take;
      if (b) w |= take == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << take) - 1;
      filled += take;
      p += static_cast<std::uint64_t>(take);
    }
    return w;
  }

  std::uint64_t run_end(std::uint64_t pos) const override {
    const std::uint64_t end = run_end_or_max(pos);
    if (end == never) throw error(errc::depth_exceeds_precision, "constructed expansion is only tracked to depth 2^32");
    return end;
  }

  std::string describe() const override { return "constructed"; }

 private:
  static std::uint64_t boundary(int j) { return special_depth(j); }

  static std::uint64_t run_end_or_max(std::uint64_t pos) {
    if (pos <= 2) return 3;
    for (int j = 1; j <= 5; ++j)
      if (pos <= boundary(j)) return boundary(j) + 1;
    return never;
  }
};

inline AngleRep constructed_zero_angle() {
  return AngleRep::bits(false, 0, std::make_shared<ConstructedZeroBits>(), "constructed");
}

struct SpecialDepthFactor {
  std::int64_t n = 0;
  double factor = 0.0;
  double bound = 0.0;
  // factor <= bound; the true gap at large n lies far below double resolution
  bool within_bound = false;

  friend bool operator==(const SpecialDepthFactor&, const SpecialDepthFactor&) = default;
};

inline SpecialDepthFactor special_factor(int j) {
  const auto n = static_cast<std::int64_t>(special_depth(j));
  if (n > std::numeric_limits<int>::max()) throw error(errc::depth_too_large, "special depth beyond int range");
  SpecialDepthFactor s;
  s.n = n;
  s.factor = factor_value(constructed_zero_angle(), static_cast<int>(n));
  s.bound = factor_bound_at(n).bound;
  s.within_bound = s.factor <= s.bound;
  return s;
}

struct ConstructedZeroReport {
  ProductEnclosure partial;
  std::vector<SpecialDepthFactor> special;

  friend bool operator==(const ConstructedZeroReport&, const ConstructedZeroReport&) = default;
};

/// f_N at the constructed point with the factors at every special depth
/// 2^(2^j) <= N, j <= j_max.
inline ConstructedZeroReport constructed_zero_partial(int j_max, int N) {
  if (N < 4) throw error(errc::invalid_argument, "constructed zero needs N >= 4");
  if (j_max < 0 || j_max > 4) throw error(errc::invalid_argument, "j_max must lie in [0, 4]");
  ConstructedZeroReport rep;
  rep.partial = partial_product(constructed_zero_angle(), N);
  for (int j = 0; j <= j_max; ++j) {
    if (special_depth(j) > static_cast<std::uint64_t>(N)) break;
    rep.special.push_back(special_factor(j));
  }
  return rep;
}

struct ZeroSearchResult {
  double threshold = 0.0;
  std::optional<int> partial_depth;   // first special depth with f_N < threshold
  double partial_value = 0.0;
  std::optional<int> special_depth;   // first special depth where the product of special factors < threshold
  double special_product = 1.0;
  std::vector<SpecialDepthFactor> trail;

  friend bool operator==(const ZeroSearchResult&, const ZeroSearchResult&) = default;
};

/// Walks the special depths 2^(2^j), j <= j_max, tracking both the full
/// partial product and the product of the special factors alone.
inline ZeroSearchResult verify_constructed_zero(double threshold, int j_max = 4) {
  if (!(threshold > 0.0)) throw error(errc::invalid_argument, "threshold must be positive");
  if (j_max < 0 || j_max > 4) throw error(errc::invalid_argument, "j_max must lie in [0, 4]");
  const AngleRep x = constructed_zero_angle();
  ZeroSearchResult res;
  res.threshold = threshold;
  double log_partial = 0.0;
  int done = -1;
  for (int j = 0; j <= j_max; ++j) {
    const int n = static_cast<int>(special_depth(j));
    for (int m = done + 1; m <= n; ++m) log_partial += log_factor(x, m);
    done = n;
    const SpecialDepthFactor s = special_factor(j);
    res.trail.push_back(s);
    res.special_product *= s.factor;
    if (!res.partial_depth && std::exp(log_partial) < threshold) {
      res.partial_depth = n;
      res.partial_value = std::exp(log_partial);
    }
    if (!res.special_depth && res.special_product < threshold) res.special_depth = n;
    if (res.partial_depth && res.special_depth) break;
  }
  if (!res.partial_depth) res.partial_value = std::exp(log_partial);
  return res;
}

}  // namespace sinprod
