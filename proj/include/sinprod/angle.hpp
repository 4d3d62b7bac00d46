#pragma once

// Angle representations. Every angle is stored through y = x/pi so that the
// doubling map x -> 2^n x becomes a shift of the binary expansion of y and
// sin(2^n x) = sin(pi * frac_2(2^n y)) can be evaluated without argument
// reduction error.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sinprod/error.hpp"
#include "sinprod/random.hpp"
#include "sinprod/sinpi.hpp"

namespace sinprod {

inline constexpr int max_dyadic_exponent = 62;
inline constexpr int double_guard_bits = 8;

/// x = m*pi/2^n. Canonical: m odd unless m == 0, in which case n == 0.
struct DyadicPi {
  std::int64_t m = 0;
  int n = 0;

  friend bool operator==(const DyadicPi&, const DyadicPi&) = default;
};

inline DyadicPi make_dyadic(std::int64_t m, int n) {
  if (n < 0 || n > max_dyadic_exponent)
    throw error(errc::invalid_argument, "dyadic exponent must lie in [0, 62]");
  if (m == 0) return {0, 0};
  while (n > 0 && (m % 2) == 0) {
    m /= 2;
    --n;
  }
  return {m, n};
}

/// Lazily generated fractional bits b_1 b_2 ... of |y|.
class BitSource {
 public:
  static constexpr std::uint64_t never = std::numeric_limits<std::uint64_t>::max();

  virtual ~BitSource() = default;

  /// Bit at position pos >= 1 (weight 2^-pos).
  virtual bool bit(std::uint64_t pos) const = 0;

  /// 64 bits starting at pos; bit pos lands in the most significant place.
  virtual std::uint64_t window(std::uint64_t pos) const {
    std::uint64_t w = 0;
    for (std::uint64_t i = 0; i < 64; ++i) w = (w << 1) | (bit(pos + i) ? 1U : 0U);
    return w;
  }

  /// First position after pos whose bit differs from bit(pos), or `never`.
  virtual std::uint64_t run_end(std::uint64_t pos) const {
    const bool lead = bit(pos);
    for (std::uint64_t scanned = 0; scanned < scan_limit; scanned += 64) {
      std::uint64_t w = window(pos + scanned);
      if (lead) w = ~w;
      if (w != 0) return pos + scanned + static_cast<std::uint64_t>(std::countl_zero(w));
    }
    throw error(errc::depth_exceeds_precision,
                "bit run longer than " + std::to_string(scan_limit) + " positions");
  }

  virtual std::string describe() const = 0;

 protected:
  static constexpr std::uint64_t scan_limit = std::uint64_t{1} << 22;
};

/// Fractional bits of p/q for 0 <= p < q.
class RationalBits final : public BitSource {
 public:
  RationalBits(std::uint64_t p, std::uint64_t q) : p_(p), q_(q) {
    if (q < 2 || p >= q || q >= (std::uint64_t{1} << 62))
      throw error(errc::invalid_argument, "rational bits need 0 <= p < q < 2^62");
  }

  bool bit(std::uint64_t pos) const override { return (window(pos) >> 63) != 0; }

  std::uint64_t window(std::uint64_t pos) const override {
    std::uint64_t r = mulmod(p_, powmod2(pos - 1));
    std::uint64_t w = 0;
    for (int i = 0; i < 64; ++i) {
      r <<= 1;
      w <<= 1;
      if (r >= q_) {
        r -= q_;
        w |= 1U;
      }
    }
    return w;
  }

  std::string describe() const override {
    return "rational:" + std::to_string(p_) + "/" + std::to_string(q_);
  }

 private:
  std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % q_);
  }

  // 2^e mod q
  std::uint64_t powmod2(std::uint64_t e) const {
    std::uint64_t result = 1 % q_;
    std::uint64_t base = 2 % q_;
    while (e != 0) {
      if (e & 1U) result = mulmod(result, base);
      base = mulmod(base, base);
      e >>= 1;
    }
    return result;
  }

  std::uint64_t p_;
  std::uint64_t q_;
};

/// A finite expansion held in big-endian 64-bit words, zero beyond.
class WordBits final : public BitSource {
 public:
  explicit WordBits(std::vector<std::uint64_t> words) : words_(std::move(words)) {}

  bool bit(std::uint64_t pos) const override {
    std::uint64_t idx = (pos - 1) / 64;
    if (idx >= words_.size()) return false;
    return ((words_[idx] >> (63 - (pos - 1) % 64)) & 1U) != 0;
  }

  std::uint64_t window(std::uint64_t pos) const override {
    std::uint64_t idx = (pos - 1) / 64;
    unsigned off = static_cast<unsigned>((pos - 1) % 64);
    std::uint64_t hi = word(idx);
    if (off == 0) return hi;
    return (hi << off) | (word(idx + 1) >> (64 - off));
  }

  std::uint64_t run_end(std::uint64_t pos) const override {
    const bool lead = bit(pos);
    const std::uint64_t stored_bits = 64 * static_cast<std::uint64_t>(words_.size());
    std::uint64_t p = pos;
    while (p <= stored_bits) {
      std::uint64_t w = window(p);
      if (lead) w = ~w;
      if (w != 0) return p + static_cast<std::uint64_t>(std::countl_zero(w));
      p += 64;
    }
    // zero tail
    return lead ? std::max(p, stored_bits + 1) : never;
  }

  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  std::string describe() const override {
    std::string s = "words:";
    char buf[20];
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(words_[i]));
      s += buf;
    }
    return s;
  }

 private:
  std::uint64_t word(std::uint64_t idx) const { return idx < words_.size() ? words_[idx] : 0; }

  std::vector<std::uint64_t> words_;
};

/// An infinite uniformly random expansion, reproducible from (seed, stream).
class RandomBits final : public BitSource {
 public:
  RandomBits(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream), rng_(seed, stream) {}

  bool bit(std::uint64_t pos) const override {
    return ((rng_.bits((pos - 1) / 64) >> (63 - (pos - 1) % 64)) & 1U) != 0;
  }

  std::uint64_t window(std::uint64_t pos) const override {
    std::uint64_t idx = (pos - 1) / 64;
    unsigned off = static_cast<unsigned>((pos - 1) % 64);
    std::uint64_t hi = rng_.bits(idx);
    if (off == 0) return hi;
    return (hi << off) | (rng_.bits(idx + 1) >> (64 - off));
  }

  std::string describe() const override {
    return "random:" + std::to_string(seed_) + ":" + std::to_string(stream_);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  CounterRng rng_;
};

/// y = (negative ? -1 : 1) * (integer + 0.b_1 b_2 ...).
struct BitStream {
  bool negative = false;
  std::int64_t integer = 0;
  std::shared_ptr<const BitSource> fraction;
  std::string label;  // parseable spelling when one exists
};

/// A machine number of radians with its precision budget.
struct RawReal {
  double radians = 0.0;
  double y = 0.0;  // radians / pi, rounded
  int max_reliable_depth = 0;
};

class AngleRep {
 public:
  using Storage = std::variant<DyadicPi, BitStream, RawReal>;

  AngleRep() : rep_(DyadicPi{}) {}
  explicit AngleRep(DyadicPi d) : rep_(make_dyadic(d.m, d.n)) {}
  explicit AngleRep(BitStream b) : rep_(std::move(b)) {
    if (!std::get<BitStream>(rep_).fraction)
      throw error(errc::invalid_argument, "bit stream without a source");
  }
  explicit AngleRep(RawReal r) : rep_(r) {}

  /// x = m*pi/2^n
  static AngleRep dyadic(std::int64_t m, int n) { return AngleRep(make_dyadic(m, n)); }

  /// x = p*pi/q. Dyadic denominators become DyadicPi, the rest lazy bit streams.
  static AngleRep rational(std::int64_t p, std::int64_t q) {
    if (q == 0) throw error(errc::invalid_argument, "zero denominator");
    if (q < 0) {
      p = -p;
      q = -q;
    }
    std::int64_t g = std::gcd(p, q);
    if (g > 1) {
      p /= g;
      q /= g;
    }
    if (std::has_single_bit(static_cast<std::uint64_t>(q)))
      return dyadic(p, std::countr_zero(static_cast<std::uint64_t>(q)));
    bool neg = p < 0;
    std::uint64_t mag = neg ? static_cast<std::uint64_t>(-(p + 1)) + 1 : static_cast<std::uint64_t>(p);
    std::uint64_t uq = static_cast<std::uint64_t>(q);
    BitStream b;
    b.negative = neg;
    b.integer = static_cast<std::int64_t>(mag / uq);
    b.fraction = std::make_shared<RationalBits>(mag % uq, uq);
    b.label = std::to_string(p) + "/" + std::to_string(q) + "pi";
    return AngleRep(std::move(b));
  }

  /// Exact dyadic angle x = y*pi for a machine number y.
  static AngleRep pi_fraction(double y);

  /// Radians given as a machine number; depth budget per double precision.
  static AngleRep radians(double x) {
    if (!std::isfinite(x)) throw error(errc::invalid_argument, "angle must be finite");
    if (x == 0.0) return dyadic(0, 0);
    RawReal r;
    r.radians = x;
    r.y = x / std::numbers::pi;
    r.max_reliable_depth = static_cast<int>(
        std::floor(std::numeric_limits<double>::digits - double_guard_bits - std::log2(std::fabs(r.y))));
    return AngleRep(r);
  }

  /// Random y uniform in [0, 1) with an infinite expansion.
  static AngleRep random(std::uint64_t seed, std::uint64_t stream) {
    BitStream b;
    b.fraction = std::make_shared<RandomBits>(seed, stream);
    b.label = b.fraction->describe();
    return AngleRep(std::move(b));
  }

  static AngleRep bits(bool negative, std::int64_t integer, std::shared_ptr<const BitSource> src,
                       std::string label = {}) {
    BitStream b{negative, integer, std::move(src), std::move(label)};
    return AngleRep(std::move(b));
  }

  const Storage& storage() const noexcept { return rep_; }
  bool is_dyadic() const noexcept { return std::holds_alternative<DyadicPi>(rep_); }
  bool is_bit_stream() const noexcept { return std::holds_alternative<BitStream>(rep_); }
  bool is_raw() const noexcept { return std::holds_alternative<RawReal>(rep_); }

  /// Largest depth the representation can reduce exactly (unbounded for
  /// dyadic and bit-stream angles).
  int max_reliable_depth() const noexcept {
    if (const auto* r = std::get_if<RawReal>(&rep_)) return r->max_reliable_depth;
    return std::numeric_limits<int>::max();
  }

  /// y = x/pi rounded to double.
  double approx_over_pi() const {
    return std::visit(
        [](const auto& v) -> double {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, DyadicPi>) {
            return std::ldexp(static_cast<double>(v.m), -v.n);
          } else if constexpr (std::is_same_v<T, RawReal>) {
            return v.y;
          } else {
            double mag = static_cast<double>(v.integer) +
                         std::ldexp(static_cast<double>(v.fraction->window(1)), -64);
            return v.negative ? -mag : mag;
          }
        },
        rep_);
  }

  double approx_radians() const {
    if (const auto* r = std::get_if<RawReal>(&rep_)) return r->radians;
    return approx_over_pi() * std::numbers::pi;
  }

  std::string describe() const {
    return std::visit(
        [](const auto& v) -> std::string {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, DyadicPi>) {
            if (v.m == 0) return "0";
            if (v.n == 0) return std::to_string(v.m) + "pi";
            return std::to_string(v.m) + "/" + std::to_string(std::uint64_t{1} << v.n) + "pi";
          } else if constexpr (std::is_same_v<T, RawReal>) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v.radians);
            return buf;
          } else {
            if (!v.label.empty()) return v.label;
            return std::string(v.negative ? "-" : "") + std::to_string(v.integer) + "+" +
                   v.fraction->describe();
          }
        },
        rep_);
  }

  friend bool operator==(const AngleRep& a, const AngleRep& b) { return a.describe() == b.describe(); }

 private:
  Storage rep_;
};

/// 2^n y reduced modulo 2, plus its distance to the nearest integer kept as
/// mantissa and an unbounded binary exponent so that distances far below the
/// double range (the constructed zero reaches 2^-65280) stay usable in logs.
struct ReducedArg {
  double t = 0.0;
  double dist_mant = 0.0;  // in [1/2, 1), or 0 for a lattice point
  std::int64_t dist_exp = 0;
  bool exact = false;

  bool is_zero() const noexcept { return dist_mant == 0.0; }

  /// Distance as a double (flushes to zero below the subnormal range).
  double distance() const noexcept {
    if (is_zero()) return 0.0;
    if (dist_exp < -1100) return 0.0;
    return std::ldexp(dist_mant, static_cast<int>(dist_exp));
  }

  double log_distance() const noexcept {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return std::log(dist_mant) + static_cast<double>(dist_exp) * std::numbers::ln2;
  }

  /// log2 of the distance.
  double log2_distance() const noexcept {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return std::log2(dist_mant) + static_cast<double>(dist_exp);
  }
};

namespace detail {

inline constexpr std::int64_t normal_distance_exponent = -1000;

inline ReducedArg make_reduced(double t, double dist, std::int64_t extra_exp, bool exact) {
  ReducedArg r;
  r.t = t;
  r.exact = exact;
  if (dist == 0.0) return r;
  int e = 0;
  r.dist_mant = std::frexp(dist, &e);
  r.dist_exp = e + extra_exp;
  return r;
}

inline ReducedArg reduce_dyadic(const DyadicPi& d, int n) {
  if (d.m == 0) return make_reduced(0.0, 0.0, 0, true);
  const auto um = static_cast<std::uint64_t>(d.m);
  if (n >= d.n) {
    double t = (n == d.n) ? static_cast<double>(um & 1U) : 0.0;
    return make_reduced(t, 0.0, 0, true);
  }
  const int p = d.n - n;  // 1..62
  const std::uint64_t mod2 = (std::uint64_t{1} << (p + 1)) - 1;
  const std::uint64_t full = std::uint64_t{1} << p;
  const std::uint64_t w2 = um & mod2;
  const std::uint64_t w = w2 & (full - 1);
  const std::uint64_t dn = std::min(w, full - w);
  double t = std::ldexp(static_cast<double>(w2), -p);
  return make_reduced(t, static_cast<double>(dn), -p, true);
}

inline ReducedArg reduce_bits(const BitStream& b, int n) {
  const BitSource& src = *b.fraction;
  const auto pos = static_cast<std::uint64_t>(n) + 1;
  unsigned ibit = n == 0 ? static_cast<unsigned>(b.integer & 1) : (src.bit(static_cast<std::uint64_t>(n)) ? 1U : 0U);
  const std::uint64_t w = src.window(pos);
  double t = static_cast<double>(ibit) + std::ldexp(static_cast<double>(w), -64);
  if (t >= 2.0) t -= 2.0;
  if (b.negative && t != 0.0) t = 2.0 - t;

  const bool lead = (w >> 63) != 0;
  const int run = lead ? std::countl_one(w) : std::countl_zero(w);
  std::uint64_t first_diff = 0;
  if (run < 64) {
    first_diff = pos + static_cast<std::uint64_t>(run);
  } else {
    first_diff = src.run_end(pos);
    if (first_diff == BitSource::never) return make_reduced(t, 0.0, 0, true);
  }
  std::uint64_t mant64 = src.window(first_diff);
  if (lead) mant64 = ~mant64;
  double mant = std::ldexp(static_cast<double>(mant64), -64);
  // distance = mant * 2^(n + 1 - first_diff)
  std::int64_t exp = static_cast<std::int64_t>(n) + 1 - static_cast<std::int64_t>(first_diff);
  return make_reduced(t, mant, exp, false);
}

inline ReducedArg reduce_raw(const RawReal& r, int n) {
  if (n > r.max_reliable_depth)
    throw error(errc::depth_exceeds_precision,
                "depth " + std::to_string(n) + " exceeds the reliable depth " +
                    std::to_string(r.max_reliable_depth) + " of a machine-precision angle");
  const double v = std::ldexp(r.y, n);
  const double fr = std::fmod(std::fabs(v), 1.0);
  const double d = fr <= 0.5 ? fr : 1.0 - fr;
  double t = std::fmod(v, 2.0);
  if (t < 0.0) t += 2.0;
  if (t >= 2.0) t -= 2.0;
  return make_reduced(t, d, 0, false);
}

}  // namespace detail

/// Reduce 2^n x modulo 2 pi, returned as a fraction of pi.
inline ReducedArg reduce_argument(const AngleRep& x, int n) {
  if (n < 0) throw error(errc::invalid_argument, "negative depth");
  return std::visit(
      [n](const auto& v) -> ReducedArg {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DyadicPi>) return detail::reduce_dyadic(v, n);
        else if constexpr (std::is_same_v<T, BitStream>) return detail::reduce_bits(v, n);
        else return detail::reduce_raw(v, n);
      },
      x.storage());
}

/// |sin(pi t)| for the reduced argument; 0 exactly on the lattice.
inline double abs_sin(const ReducedArg& r) {
  if (r.is_zero()) return 0.0;
  if (r.dist_exp > detail::normal_distance_exponent) return sinpi_folded(r.distance());
  return std::exp(std::log(std::numbers::pi) + r.log_distance());
}

/// log|sin(pi t)|, -inf exactly on the lattice.
inline double log_abs_sin(const ReducedArg& r) {
  if (r.is_zero()) return -std::numeric_limits<double>::infinity();
  if (r.dist_exp > detail::normal_distance_exponent) return std::log(sinpi_folded(r.distance()));
  // sin(pi d) == pi d to double precision for d this small
  return std::log(std::numbers::pi) + r.log_distance();
}

// ---------------------------------------------------------------------------
// Fixed-point view of an angle, used to build exactly perturbed points and to
// take differences of nearby angles.

/// y = integer + sum_i frac[i] * 2^(-64 (i+1)); integer is the floor of y.
struct FixedAngle {
  std::int64_t integer = 0;
  std::vector<std::uint64_t> frac;
};

namespace detail {

inline void negate(FixedAngle& f) {
  bool carry = true;
  for (auto it = f.frac.rbegin(); it != f.frac.rend(); ++it) {
    *it = ~*it;
    if (carry) {
      ++*it;
      carry = (*it == 0);
    }
  }
  f.integer = ~f.integer + (carry ? 1 : 0);
}

inline bool frac_is_zero(const FixedAngle& f) {
  return std::all_of(f.frac.begin(), f.frac.end(), [](std::uint64_t w) { return w == 0; });
}

// Adds v * 2^shift_from_lsb to the (W+1)-word two's complement integer.
inline void add_at(FixedAngle& f, std::uint64_t v, std::int64_t shift, bool subtract) {
  const auto words = static_cast<std::int64_t>(f.frac.size());
  if (shift < 0) {
    if (shift <= -64) return;
    v >>= -shift;
    shift = 0;
  }
  // index from the least significant word: 0 = frac.back(), words = integer
  auto get = [&](std::int64_t i) -> std::uint64_t {
    return i < words ? f.frac[static_cast<std::size_t>(words - 1 - i)] : static_cast<std::uint64_t>(f.integer);
  };
  auto set = [&](std::int64_t i, std::uint64_t w) {
    if (i < words) f.frac[static_cast<std::size_t>(words - 1 - i)] = w;
    else f.integer = static_cast<std::int64_t>(w);
  };
  std::int64_t idx = shift / 64;
  unsigned off = static_cast<unsigned>(shift % 64);
  std::uint64_t lo = v << off;
  std::uint64_t hi = off == 0 ? 0 : v >> (64 - off);
  std::uint64_t parts[2] = {lo, hi};
  bool carry = false;
  for (std::int64_t i = idx; i <= words; ++i) {
    std::uint64_t part = (i - idx < 2) ? parts[i - idx] : 0;
    if (i - idx >= 2 && !carry) break;
    std::uint64_t cur = get(i);
    std::uint64_t res = 0;
    if (!subtract) {
      res = cur + part;
      bool c1 = res < cur;
      std::uint64_t res2 = res + (carry ? 1 : 0);
      bool c2 = res2 < res;
      res = res2;
      carry = c1 || c2;
    } else {
      res = cur - part;
      bool b1 = cur < part;
      std::uint64_t res2 = res - (carry ? 1 : 0);
      bool b2 = res < (carry ? 1U : 0U);
      res = res2;
      carry = b1 || b2;
    }
    set(i, res);
  }
}

}  // namespace detail

inline FixedAngle to_fixed(const AngleRep& x, std::size_t words) {
  FixedAngle f;
  f.frac.assign(words, 0);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DyadicPi>) {
          f.integer = v.m >> v.n;  // arithmetic shift = floor
          if (v.n > 0 && words > 0) {
            std::uint64_t low = static_cast<std::uint64_t>(v.m) & ((std::uint64_t{1} << v.n) - 1);
            f.frac[0] = low << (64 - v.n);
          }
        } else if constexpr (std::is_same_v<T, RawReal>) {
          double y = v.y;
          double fl = std::floor(y);
          f.integer = static_cast<std::int64_t>(fl);
          double rem = y - fl;
          for (std::size_t i = 0; i < words && rem != 0.0; ++i) {
            double scaled = std::ldexp(rem, 64);
            double hi = std::floor(scaled);
            f.frac[i] = static_cast<std::uint64_t>(hi);
            rem = scaled - hi;
          }
        } else {
          f.integer = v.integer;
          for (std::size_t i = 0; i < words; ++i) f.frac[i] = v.fraction->window(64 * i + 1);
          if (v.negative) detail::negate(f);
        }
      },
      x.storage());
  return f;
}

inline AngleRep from_fixed(FixedAngle f) {
  bool neg = f.integer < 0;
  if (neg) detail::negate(f);
  if (detail::frac_is_zero(f)) return AngleRep::dyadic(neg ? -f.integer : f.integer, 0);
  return AngleRep::bits(neg, f.integer, std::make_shared<WordBits>(std::move(f.frac)));
}

/// Adds s * 2^scale_exp (in y units, i.e. multiples of pi). The extra
/// exponent reaches offsets far below the double range; bits below the
/// window are truncated.
inline void add_over_pi(FixedAngle& f, double s, std::int64_t scale_exp = 0) {
  if (s == 0.0) return;
  int e = 0;
  double m = std::frexp(std::fabs(s), &e);
  auto mant = static_cast<std::uint64_t>(std::ldexp(m, 53));
  std::int64_t shift =
      static_cast<std::int64_t>(e) + scale_exp - 53 + 64 * static_cast<std::int64_t>(f.frac.size());
  detail::add_at(f, mant, shift, s < 0);
}

inline double to_double(FixedAngle f) {
  bool neg = f.integer < 0;
  if (neg) detail::negate(f);
  double v = static_cast<double>(f.integer);
  double scale = 1.0;
  for (std::size_t i = 0; i < f.frac.size(); ++i) {
    scale = std::ldexp(scale, -64);
    if (scale == 0.0) break;
    v += static_cast<double>(f.frac[i]) * scale;
  }
  return neg ? -v : v;
}

/// Fixed-point words needed so an offset of magnitude |s| (in y units) lands
/// inside the window together with 64 guard bits past depth `depth`.
inline std::size_t words_for_offset(double s, int depth, std::int64_t scale_exp = 0) {
  double lg = s == 0.0 ? 0.0 : -std::log2(std::fabs(s)) - static_cast<double>(scale_exp);
  double need = std::max(lg + 128.0, static_cast<double>(depth) + 128.0);
  return static_cast<std::size_t>(std::ceil(need / 64.0)) + 1;
}

/// x + s * 2^scale_exp * pi on the first `words` fractional words of x.
inline AngleRep perturbed(const AngleRep& x, double offset_over_pi, std::size_t words, std::int64_t scale_exp = 0) {
  FixedAngle f = to_fixed(x, words);
  add_over_pi(f, offset_over_pi, scale_exp);
  return from_fixed(std::move(f));
}

/// (a - b)/pi computed in fixed point so nearby angles do not cancel.
inline double difference_over_pi(const AngleRep& a, const AngleRep& b, std::size_t words = 8) {
  FixedAngle fa = to_fixed(a, words);
  FixedAngle fb = to_fixed(b, words);
  detail::negate(fb);
  // fa += fb, word by word from the least significant end
  bool carry = false;
  for (std::size_t i = words; i-- > 0;) {
    std::uint64_t s = fa.frac[i] + fb.frac[i];
    bool c1 = s < fa.frac[i];
    std::uint64_t s2 = s + (carry ? 1 : 0);
    carry = c1 || (s2 < s);
    fa.frac[i] = s2;
  }
  fa.integer = static_cast<std::int64_t>(static_cast<std::uint64_t>(fa.integer) +
                                         static_cast<std::uint64_t>(fb.integer) + (carry ? 1 : 0));
  return to_double(std::move(fa));
}

inline AngleRep AngleRep::pi_fraction(double y) {
  if (!std::isfinite(y)) throw error(errc::invalid_argument, "angle must be finite");
  if (y == 0.0) return dyadic(0, 0);
  int e = 0;
  double m = std::frexp(y, &e);
  auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
  int n = 53 - e;
  while (n > 0 && (mant % 2) == 0) {
    mant /= 2;
    --n;
  }
  if (n < 0) {
    if (e > 62) throw error(errc::invalid_argument, "angle too large for an exact dyadic form");
    return dyadic(mant << -n, 0);
  }
  if (n <= max_dyadic_exponent) return dyadic(mant, n);
  RawReal r;
  r.y = y;
  r.radians = y * std::numbers::pi;
  FixedAngle f = to_fixed(AngleRep(r), static_cast<std::size_t>((n + 63) / 64) + 1);
  return from_fixed(std::move(f));
}

}  // namespace sinprod
