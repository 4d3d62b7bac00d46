#pragma once

// Textual angle specs:
//   <p>/<q>pi  <p>pi/<q>  pi/<q>  <p>pi  pi  -pi/<q>
//   constructed
//   random:<seed>:<stream>
//   [-]<integer>+words:<hex>     (fixed-point expansions, as printed by describe)
//   decimal radians, e.g. 0.5 or -1e-3

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sinprod/angle.hpp"
#include "sinprod/error.hpp"
#include "sinprod/special_values.hpp"

namespace sinprod {

namespace detail {

[[noreturn]] inline void parse_fail(std::string_view text, std::size_t pos, std::string_view what) {
  throw error(errc::parse_error, "angle '" + std::string(text) + "' at position " + std::to_string(pos) + ": " +
                                     std::string(what));
}

class Cursor {
 public:
  explicit Cursor(std::string_view s) : text_(s) {}

  bool done() const { return pos_ >= text_.size(); }
  std::size_t pos() const { return pos_; }
  std::string_view text() const { return text_; }

  bool eat(std::string_view tok) {
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  template <class Int>
  Int integer(std::string_view what) {
    Int v{};
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec == std::errc::result_out_of_range) parse_fail(text_, pos_, std::string(what) + " out of range");
    if (ec != std::errc() || ptr == first) parse_fail(text_, pos_, "expected " + std::string(what));
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  void expect_end() {
    if (!done()) parse_fail(text_, pos_, "unexpected trailing input");
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

inline AngleRep parse_words(Cursor& c, bool negative, std::int64_t integer) {
  std::vector<std::uint64_t> words;
  const std::string_view rest = c.text().substr(c.pos());
  if (rest.empty() || rest.size() % 16 != 0) parse_fail(c.text(), c.pos(), "word digits must come in groups of 16");
  for (std::size_t i = 0; i < rest.size(); i += 16) {
    std::uint64_t w = 0;
    auto [ptr, ec] = std::from_chars(rest.data() + i, rest.data() + i + 16, w, 16);
    if (ec != std::errc() || ptr != rest.data() + i + 16) parse_fail(c.text(), c.pos() + i, "bad hex word");
    words.push_back(w);
  }
  return AngleRep::bits(negative, integer, std::make_shared<WordBits>(std::move(words)));
}

inline bool looks_like_pi_form(std::string_view s) { return s.find("pi") != std::string_view::npos; }

inline AngleRep parse_pi_form(Cursor& c) {
  const bool neg = c.eat("-");
  std::int64_t p = 1;
  std::int64_t q = 1;
  if (c.eat("pi")) {
    if (c.eat("/")) q = c.integer<std::int64_t>("denominator");
  } else {
    p = c.integer<std::int64_t>("numerator");
    if (c.eat("/")) {
      q = c.integer<std::int64_t>("denominator");
      if (!c.eat("pi")) parse_fail(c.text(), c.pos(), "expected 'pi'");
    } else {
      if (!c.eat("pi")) parse_fail(c.text(), c.pos(), "expected 'pi' or '/'");
      if (c.eat("/")) q = c.integer<std::int64_t>("denominator");
    }
  }
  c.expect_end();
  if (q == 0) parse_fail(c.text(), c.pos(), "zero denominator");
  return AngleRep::rational(neg ? -p : p, q);
}

}  // namespace detail

inline AngleRep parse_angle(std::string_view text) {
  if (text.empty()) detail::parse_fail(text, 0, "empty angle");
  detail::Cursor c(text);
  if (text == "constructed") return constructed_zero_angle();
  if (c.eat("random:")) {
    const auto seed = c.integer<std::uint64_t>("seed");
    if (!c.eat(":")) detail::parse_fail(text, c.pos(), "expected ':'");
    const auto stream = c.integer<std::uint64_t>("stream");
    c.expect_end();
    return AngleRep::random(seed, stream);
  }
  if (const auto plus = text.find("+words:"); plus != std::string_view::npos) {
    const bool neg = c.eat("-");
    const auto integer = c.integer<std::int64_t>("integer part");
    if (!c.eat("+words:")) detail::parse_fail(text, c.pos(), "expected '+words:'");
    return detail::parse_words(c, neg, integer);
  }
  if (detail::looks_like_pi_form(text)) return detail::parse_pi_form(c);

  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc::result_out_of_range) detail::parse_fail(text, 0, "decimal out of range");
  if (ec != std::errc() || ptr == text.data()) detail::parse_fail(text, 0, "expected a number or a pi form");
  if (ptr != text.data() + text.size())
    detail::parse_fail(text, static_cast<std::size_t>(ptr - text.data()), "unexpected trailing input");
  if (!std::isfinite(v)) detail::parse_fail(text, 0, "angle must be finite");
  return AngleRep::radians(v);
}

/// A rational number p/q (or integer) used for ranges in units of pi.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

inline Fraction parse_fraction(std::string_view text) {
  detail::Cursor c(text);
  const bool neg = c.eat("-");
  Fraction f;
  f.num = c.integer<std::int64_t>("numerator");
  if (c.eat("/")) f.den = c.integer<std::int64_t>("denominator");
  c.expect_end();
  if (f.den == 0) detail::parse_fail(text, c.pos(), "zero denominator");
  if (neg) f.num = -f.num;
  return f;
}

}  // namespace sinprod
