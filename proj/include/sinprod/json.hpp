#pragma once

// JSON encoding of result types. Infinite log values are written as null.

#include <cmath>
#include <limits>
#include <optional>

#include <json.hpp>

#include "sinprod/lattice.hpp"
#include "sinprod/measure.hpp"
#include "sinprod/parse.hpp"
#include "sinprod/product.hpp"
#include "sinprod/quadrature.hpp"
#include "sinprod/semicontinuity.hpp"
#include "sinprod/special_values.hpp"

namespace sinprod {

using nlohmann::json;

namespace detail {

inline json extended(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline double extended_from(const json& j, double if_null) { return j.is_null() ? if_null : j.get<double>(); }

}  // namespace detail

inline void to_json(json& j, const AngleRep& x) { j = x.describe(); }
inline void from_json(const json& j, AngleRep& x) { x = parse_angle(j.get<std::string>()); }

inline void to_json(json& j, const ProductEnclosure& e) {
  j = json{{"depth", e.depth},
           {"value", e.value},
           {"log_value", detail::extended(e.log_value)},
           {"lower", e.lower},
           {"exact_zero", e.exact_zero}};
}

inline void from_json(const json& j, ProductEnclosure& e) {
  e.depth = j.at("depth").get<int>();
  e.value = j.at("value").get<double>();
  e.log_value = detail::extended_from(j.at("log_value"), -std::numeric_limits<double>::infinity());
  e.lower = j.at("lower").get<double>();
  e.exact_zero = j.at("exact_zero").get<bool>();
}

inline void to_json(json& j, const ConvergenceRow& r) {
  j = json{{"k", r.k},
           {"m_k", r.m_k},
           {"inv_sqrt_diff", r.inv_sqrt_diff ? json(*r.inv_sqrt_diff) : json(nullptr)},
           {"extrapolated", r.extrapolated}};
}

inline void from_json(const json& j, ConvergenceRow& r) {
  r.k = j.at("k").get<int>();
  r.m_k = j.at("m_k").get<double>();
  const json& d = j.at("inv_sqrt_diff");
  r.inv_sqrt_diff = d.is_null() ? std::nullopt : std::optional<double>(d.get<double>());
  r.extrapolated = j.at("extrapolated").get<double>();
}

inline void to_json(json& j, const FitResult& f) {
  j = json{{"a", f.a},
           {"b", f.b},
           {"m_inf", f.m_inf},
           {"window", json::array({f.window.lo, f.window.hi})},
           {"rms_residual", f.rms_residual}};
}

inline void from_json(const json& j, FitResult& f) {
  f.a = j.at("a").get<double>();
  f.b = j.at("b").get<double>();
  f.m_inf = j.at("m_inf").get<double>();
  f.window.lo = j.at("window").at(0).get<int>();
  f.window.hi = j.at("window").at(1).get<int>();
  f.rms_residual = j.at("rms_residual").get<double>();
}

NLOHMANN_JSON_SERIALIZE_ENUM(BoundDirection, {{BoundDirection::at_most, "at_most"},
                                              {BoundDirection::at_least, "at_least"}})

inline void to_json(json& j, const MeasureEstimate& m) {
  j = json{{"estimate", m.estimate},
           {"samples", m.samples},
           {"ci_halfwidth", m.ci_halfwidth},
           {"theoretical_bound", m.theoretical_bound},
           {"direction", m.direction},
           {"passes", m.passes}};
}

inline void from_json(const json& j, MeasureEstimate& m) {
  m.estimate = j.at("estimate").get<double>();
  m.samples = j.at("samples").get<std::uint64_t>();
  m.ci_halfwidth = j.at("ci_halfwidth").get<double>();
  m.theoretical_bound = j.at("theoretical_bound").get<double>();
  m.direction = j.at("direction").get<BoundDirection>();
  m.passes = j.at("passes").get<bool>();
}

inline void to_json(json& j, const UscWitness& w) {
  j = json{{"x", w.x},
           {"epsilon", w.epsilon},
           {"k", w.k},
           {"lambda", w.lambda},
           {"delta", w.delta},
           {"log_delta", detail::extended(w.log_delta)},
           {"certified", w.certified},
           {"lattice", w.lattice}};
}

inline void from_json(const json& j, UscWitness& w) {
  w.x = j.at("x").get<AngleRep>();
  w.epsilon = j.at("epsilon").get<double>();
  w.k = j.at("k").get<int>();
  w.lambda = j.at("lambda").get<double>();
  w.delta = j.at("delta").get<double>();
  w.log_delta = detail::extended_from(j.at("log_delta"), -std::numeric_limits<double>::infinity());
  w.certified = j.at("certified").get<bool>();
  w.lattice = j.at("lattice").get<bool>();
}

inline void to_json(json& j, const UscReport& r) {
  j = json{{"witness", r.witness},
           {"trials", r.trials},
           {"log_checks", r.log_checks},
           {"log_violations", r.log_violations},
           {"max_log_ratio", r.max_log_ratio},
           {"value_checks", r.value_checks},
           {"value_violations", r.value_violations},
           {"max_value_excess", detail::extended(r.max_value_excess)},
           {"passes", r.passes}};
}

inline void from_json(const json& j, UscReport& r) {
  r.witness = j.at("witness").get<UscWitness>();
  r.trials = j.at("trials").get<std::uint64_t>();
  r.log_checks = j.at("log_checks").get<std::uint64_t>();
  r.log_violations = j.at("log_violations").get<std::uint64_t>();
  r.max_log_ratio = j.at("max_log_ratio").get<double>();
  r.value_checks = j.at("value_checks").get<std::uint64_t>();
  r.value_violations = j.at("value_violations").get<std::uint64_t>();
  r.max_value_excess = detail::extended_from(j.at("max_value_excess"), -std::numeric_limits<double>::infinity());
  r.passes = j.at("passes").get<bool>();
}

inline void to_json(json& j, const SpecialDepthFactor& s) {
  j = json{{"n", s.n}, {"factor", s.factor}, {"bound", s.bound}, {"within_bound", s.within_bound}};
}

inline void from_json(const json& j, SpecialDepthFactor& s) {
  s.n = j.at("n").get<std::int64_t>();
  s.factor = j.at("factor").get<double>();
  s.bound = j.at("bound").get<double>();
  s.within_bound = j.at("within_bound").get<bool>();
}

inline void to_json(json& j, const ZeroSearchResult& z) {
  j = json{{"threshold", z.threshold},
           {"partial_depth", z.partial_depth ? json(*z.partial_depth) : json(nullptr)},
           {"partial_value", z.partial_value},
           {"special_depth", z.special_depth ? json(*z.special_depth) : json(nullptr)},
           {"special_product", z.special_product},
           {"trail", z.trail}};
}

inline void from_json(const json& j, ZeroSearchResult& z) {
  z.threshold = j.at("threshold").get<double>();
  const json& pd = j.at("partial_depth");
  z.partial_depth = pd.is_null() ? std::nullopt : std::optional<int>(pd.get<int>());
  z.partial_value = j.at("partial_value").get<double>();
  const json& sd = j.at("special_depth");
  z.special_depth = sd.is_null() ? std::nullopt : std::optional<int>(sd.get<int>());
  z.special_product = j.at("special_product").get<double>();
  z.trail = j.at("trail").get<std::vector<SpecialDepthFactor>>();
}

inline void to_json(json& j, const LambdaMaxCheck& c) {
  j = json{{"argmax", c.argmax},
           {"max_value", c.max_value},
           {"sin_argmax", c.sin_argmax},
           {"expected_sin", c.expected_sin},
           {"passes", c.passes}};
}

inline void from_json(const json& j, LambdaMaxCheck& c) {
  c.argmax = j.at("argmax").get<double>();
  c.max_value = j.at("max_value").get<double>();
  c.sin_argmax = j.at("sin_argmax").get<double>();
  c.expected_sin = j.at("expected_sin").get<double>();
  c.passes = j.at("passes").get<bool>();
}

inline void to_json(json& j, const ExcludedInterval& e) {
  j = json{{"n", e.n},
           {"k", e.k},
           {"m", e.m},
           {"center_exact", e.center_exact},
           {"center_over_pi", e.center_over_pi},
           {"radius", e.radius}};
}

inline void from_json(const json& j, ExcludedInterval& e) {
  e.n = j.at("n").get<int>();
  e.k = j.at("k").get<int>();
  e.m = j.at("m").get<std::int64_t>();
  e.center_exact = j.at("center_exact").get<bool>();
  e.center_over_pi = j.at("center_over_pi").get<double>();
  e.radius = j.at("radius").get<double>();
}

inline void to_json(json& j, const MembershipReport& r) {
  j = json{{"in_up_to_depth", r.in_up_to_depth},
           {"depth_checked", r.depth_checked},
           {"violating_interval", r.violating_interval ? json(*r.violating_interval) : json(nullptr)}};
}

inline void from_json(const json& j, MembershipReport& r) {
  r.in_up_to_depth = j.at("in_up_to_depth").get<bool>();
  r.depth_checked = j.at("depth_checked").get<int>();
  const json& v = j.at("violating_interval");
  r.violating_interval = v.is_null() ? std::nullopt : std::optional<ExcludedInterval>(v.get<ExcludedInterval>());
}

}  // namespace sinprod
