#pragma once

// Command-line front end. run() returns the process exit code:
// 0 when every bound check passes, 1 when one fails, 2 on errors.

#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sinprod/json.hpp"
#include "sinprod/measure.hpp"
#include "sinprod/parse.hpp"
#include "sinprod/product.hpp"
#include "sinprod/quadrature.hpp"
#include "sinprod/random.hpp"
#include "sinprod/semicontinuity.hpp"
#include "sinprod/special_values.hpp"

namespace sinprod::cli {

enum class Format { csv, json };

struct Output {
  Format format = Format::csv;
  std::string path;
};

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string full(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string flag(bool b) { return b ? "true" : "false"; }

inline void add_output_options(CLI::App* sub, Output& o) {
  sub->add_option("--format", o.format, "csv or json")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"csv", Format::csv}, {"json", Format::json}}))
      ->default_str("csv");
  sub->add_option("--out", o.path, "write to this file instead of standard output");
}

inline FitWindow parse_window(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw error(errc::parse_error, "window '" + s + "' must look like lo:hi");
  FitWindow w;
  try {
    std::size_t used = 0;
    w.lo = std::stoi(s.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("lo");
    const std::string hi = s.substr(colon + 1);
    w.hi = std::stoi(hi, &used);
    if (used != hi.size()) throw std::invalid_argument("hi");
  } catch (const std::logic_error&) {
    throw error(errc::parse_error, "window '" + s + "' must look like lo:hi");
  }
  return w;
}

inline void emit(const Output& o, const std::string& text, std::ostream& out) {
  if (o.path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.path, std::ios::binary);
  if (!f) throw error(errc::invalid_argument, "cannot open " + o.path + " for writing");
  f << text;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Partial products, bounds and integrals of prod_n sin(2^n x)^(2/(2n+1)^2)", "sinprod"};
  app.require_subcommand(1);
  Output o;
  unsigned workers = 0;
  std::uint64_t seed = default_seed;
  auto add_workers = [&](CLI::App* sub) {
    sub->add_option("--workers", workers, "threads, 0 = automatic (SINPROD_WORKERS or hardware)")->capture_default_str();
  };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", seed, "random seed")->capture_default_str(); };

  // eval
  std::string x_spec;
  int depth = default_truncation_depth;
  bool certify = false;
  int k_max = 64;
  auto* eval = app.add_subcommand("eval", "evaluate f_N(x) and optionally a certified lower bound on f(x)");
  eval->add_option("--x", x_spec, "angle, e.g. 1/8pi, pi/3, constructed, random:1:2, 0.5")->required();
  eval->add_option("--depth", depth, "truncation depth N")->check(CLI::NonNegativeNumber)->capture_default_str();
  eval->add_flag("--certify", certify, "attempt a lower-bound certificate");
  eval->add_option("--kmax", k_max, "largest k tried for the certificate")->check(CLI::PositiveNumber)->capture_default_str();
  detail::add_output_options(eval, o);

  // table
  int k_min = 6, k_hi = 20;
  double a = default_extrapolation_a, b = default_extrapolation_b;
  bool fit = false;
  std::string window_spec;
  auto* table = app.add_subcommand("table", "midpoint estimates M_k with difference and extrapolation columns");
  table->add_option("--kmin", k_min)->check(CLI::Range(1, max_midpoint_k))->capture_default_str();
  table->add_option("--kmax", k_hi)->check(CLI::Range(1, max_midpoint_k))->capture_default_str();
  table->add_option("--a", a)->capture_default_str();
  table->add_option("--b", b)->capture_default_str();
  table->add_flag("--fit", fit, "append a least-squares fit of m_inf + a/(k - b)");
  table->add_option("--window", window_spec, "fit window lo:hi (defaults to the table range)");
  add_workers(table);
  detail::add_output_options(table, o);

  // zeros
  double threshold = 0.75;
  int j_max = 4;
  auto* zeros = app.add_subcommand("zeros", "partial products at the constructed zero along depths 2^(2^j)");
  zeros->add_option("--threshold", threshold)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  zeros->add_option("--jmax", j_max)->check(CLI::Range(0, 4))->capture_default_str();
  detail::add_output_options(zeros, o);

  // measure
  std::string set = "small";
  int k = 8;
  int mc_depth = 64;
  std::uint64_t samples = 100000;
  std::uint64_t grid = std::uint64_t{1} << 20;
  auto* measure = app.add_subcommand("measure", "measure estimates: small values of f_N, or the set B_k");
  measure->add_option("--set", set, "small: {f_N <= 1/(3.15*5.531^k)}; b: {f_k > e^(-pi^2/2)}")
      ->check(CLI::IsMember({"small", "b"}))
      ->capture_default_str();
  measure->add_option("--k", k)->check(CLI::NonNegativeNumber)->capture_default_str();
  measure->add_option("--depth", mc_depth, "evaluation depth for the small-value set")->capture_default_str();
  measure->add_option("--samples", samples)->capture_default_str();
  measure->add_option("--grid", grid, "grid points for the B_k estimate")->capture_default_str();
  add_seed(measure);
  add_workers(measure);
  detail::add_output_options(measure, o);

  // usc
  double eps = 0.05;
  std::uint64_t trials = 10000;
  int n_ref = default_reference_depth;
  bool strict = false;
  auto* usc = app.add_subcommand("usc", "semicontinuity witness and randomized checks around x");
  usc->add_option("--x", x_spec)->required();
  usc->add_option("--eps", eps)->check(CLI::PositiveNumber)->capture_default_str();
  usc->add_option("--trials", trials)->capture_default_str();
  usc->add_option("--nref", n_ref, "reference depth for the lower bound on f(x)")->capture_default_str();
  usc->add_flag("--strict", strict, "fail unless the witness is certified");
  add_seed(usc);
  add_workers(usc);
  detail::add_output_options(usc, o);

  // layercake
  std::size_t x_grid = 100000, y_grid = 4097;
  bool reference = false;
  double tol = 1e-3;
  int ref_bits = 18;
  auto* layer = app.add_subcommand("layercake", "integral of f_k from the measures of its superlevel sets");
  layer->add_option("--k", k)->check(CLI::NonNegativeNumber)->capture_default_str();
  layer->add_option("--xgrid", x_grid)->capture_default_str();
  layer->add_option("--ygrid", y_grid)->capture_default_str();
  layer->add_flag("--reference", reference, "compare with a 2^bits-interval midpoint rule");
  layer->add_option("--reference-bits", ref_bits)->check(CLI::Range(1, 30))->capture_default_str();
  layer->add_option("--tol", tol)->capture_default_str();
  add_workers(layer);
  detail::add_output_options(layer, o);

  // plotdata
  std::size_t points = 4096;
  int plot_depth = 20;
  std::string range = "0:1";
  auto* plot = app.add_subcommand("plotdata", "(x, f_N(x)) pairs on a uniform grid");
  plot->add_option("--points", points)->check(CLI::Range(std::size_t{2}, std::size_t{1} << 26))->capture_default_str();
  plot->add_option("--depth", plot_depth)->check(CLI::NonNegativeNumber)->capture_default_str();
  plot->add_option("--range", range, "lo:hi in units of pi, integers or fractions")->capture_default_str();
  detail::add_output_options(plot, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    std::ostringstream s;
    int status = 0;

    if (*eval) {
      const AngleRep x = parse_angle(x_spec);
      const ProductEnclosure e = evaluate_limit(x, depth, certify, k_max);
      if (o.format == Format::json) {
        s << json{{"x", x}, {"enclosure", e}}.dump(2) << '\n';
      } else {
        s << "x,depth,value,log_value,lower,exact_zero\n"
          << x.describe() << ',' << e.depth << ',' << detail::full(e.value) << ',' << detail::full(e.log_value) << ','
          << detail::full(e.lower) << ',' << detail::flag(e.exact_zero) << '\n';
      }
    } else if (*table) {
      if (k_hi < k_min) throw error(errc::invalid_argument, "--kmax must not be below --kmin");
      const auto rows = convergence_table(k_min, k_hi, a, b, workers);
      std::optional<FitResult> f;
      if (fit) f = fit_ab(rows, window_spec.empty() ? FitWindow{k_min, k_hi} : detail::parse_window(window_spec));
      if (o.format == Format::json) {
        json j = rows;
        if (f) j = json{{"rows", rows}, {"fit", *f}};
        s << j.dump(2) << '\n';
      } else {
        s << "k,M_k,inv_sqrt_diff,extrapolated\n";
        for (const auto& r : rows)
          s << r.k << ',' << detail::fixed(r.m_k, 10) << ',' << (r.inv_sqrt_diff ? detail::fixed(*r.inv_sqrt_diff, 6) : "")
            << ',' << detail::fixed(r.extrapolated, 7) << '\n';
        if (f)
          s << "\na,b,m_inf,window_lo,window_hi,rms_residual\n"
            << detail::full(f->a) << ',' << detail::full(f->b) << ',' << detail::full(f->m_inf) << ',' << f->window.lo
            << ',' << f->window.hi << ',' << detail::full(f->rms_residual) << '\n';
      }
    } else if (*zeros) {
      if (!(threshold > 0.0)) throw error(errc::invalid_argument, "--threshold must be positive");
      const ZeroSearchResult z = verify_constructed_zero(threshold, j_max);
      bool bounded = true;
      for (const auto& t : z.trail) bounded = bounded && t.within_bound;
      status = (z.partial_depth && bounded) ? 0 : 1;
      if (o.format == Format::json) {
        s << json(z).dump(2) << '\n';
      } else {
        auto opt = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); };
        s << "threshold,partial_depth,partial_value,special_depth,special_product\n"
          << detail::full(z.threshold) << ',' << opt(z.partial_depth) << ',' << detail::full(z.partial_value) << ','
          << opt(z.special_depth) << ',' << detail::full(z.special_product) << "\n\nn,factor,bound,within_bound\n";
        for (const auto& t : z.trail)
          s << t.n << ',' << detail::full(t.factor) << ',' << detail::full(t.bound) << ',' << detail::flag(t.within_bound)
            << '\n';
      }
    } else if (*measure) {
      const MeasureEstimate m = set == "small" ? empirical_small_value_measure(k, mc_depth, samples, seed, workers)
                                               : b_k_measure(k, grid, workers);
      status = m.passes ? 0 : 1;
      if (o.format == Format::json) {
        s << json{{"set", set}, {"k", k}, {"result", m}}.dump(2) << '\n';
      } else {
        s << "set,k,estimate,samples,ci_halfwidth,theoretical_bound,direction,passes\n"
          << set << ',' << k << ',' << detail::full(m.estimate) << ',' << m.samples << ','
          << detail::full(m.ci_halfwidth) << ',' << detail::full(m.theoretical_bound) << ','
          << json(m.direction).get<std::string>() << ',' << detail::flag(m.passes) << '\n';
      }
    } else if (*usc) {
      const AngleRep x = parse_angle(x_spec);
      const UscReport r = check_usc(x, eps, trials, seed, n_ref, strict, workers);
      status = r.passes ? 0 : 1;
      if (o.format == Format::json) {
        s << json(r).dump(2) << '\n';
      } else {
        const UscWitness& w = r.witness;
        s << "x,epsilon,k,lambda,delta,log_delta,certified,lattice,trials,log_checks,log_violations,max_log_ratio,"
             "value_checks,value_violations,max_value_excess,passes\n"
          << w.x.describe() << ',' << detail::full(w.epsilon) << ',' << w.k << ',' << detail::full(w.lambda) << ','
          << detail::full(w.delta) << ',' << detail::full(w.log_delta) << ',' << detail::flag(w.certified) << ','
          << detail::flag(w.lattice) << ',' << r.trials << ',' << r.log_checks << ',' << r.log_violations << ','
          << detail::full(r.max_log_ratio) << ',' << r.value_checks << ',' << r.value_violations << ','
          << detail::full(r.max_value_excess) << ',' << detail::flag(r.passes) << '\n';
      }
    } else if (*layer) {
      const double lc = layer_cake_integral(k, x_grid, y_grid, workers);
      std::optional<double> ref;
      if (reference) {
        ref = midpoint_integral(k, ref_bits, workers);
        status = std::fabs(lc - *ref) <= tol ? 0 : 1;
      }
      if (o.format == Format::json) {
        json j{{"k", k}, {"x_grid", x_grid}, {"y_grid", y_grid}, {"layer_cake", lc}};
        if (ref) {
          j["midpoint"] = *ref;
          j["difference"] = lc - *ref;
          j["passes"] = status == 0;
        }
        s << j.dump(2) << '\n';
      } else {
        s << "k,x_grid,y_grid,layer_cake,midpoint,difference\n"
          << k << ',' << x_grid << ',' << y_grid << ',' << detail::full(lc) << ','
          << (ref ? detail::full(*ref) : "") << ',' << (ref ? detail::full(lc - *ref) : "") << '\n';
      }
    } else if (*plot) {
      const auto colon = range.find(':');
      if (colon == std::string::npos) throw error(errc::parse_error, "range '" + range + "' must look like lo:hi");
      const Fraction lo = parse_fraction(range.substr(0, colon));
      const Fraction hi = parse_fraction(range.substr(colon + 1));
      const auto steps = static_cast<std::int64_t>(points - 1);
      // x_i / pi = (lo.num * hi.den * steps + (hi.num * lo.den - lo.num * hi.den) * i) / (lo.den * hi.den * steps)
      const __int128 den = static_cast<__int128>(lo.den) * hi.den * steps;
      const __int128 base = static_cast<__int128>(lo.num) * hi.den * steps;
      const __int128 span = static_cast<__int128>(hi.num) * lo.den - static_cast<__int128>(lo.num) * hi.den;
      const __int128 limit = __int128{1} << 62;
      if (den >= limit || den <= -limit || base + span * steps >= limit || base + span * steps <= -limit || base >= limit ||
          base <= -limit)
        throw error(errc::invalid_argument, "range and point count too fine for exact grid arithmetic");
      json rows = json::array();
      if (o.format == Format::csv) s << "x_over_pi,x,f\n";
      for (std::int64_t i = 0; i <= steps; ++i) {
        const auto num = static_cast<std::int64_t>(base + span * i);
        const auto d = static_cast<std::int64_t>(den);
        const AngleRep x = AngleRep::rational(num, d);
        const double y = static_cast<double>(num) / static_cast<double>(d);
        const double fx = partial_product(x, plot_depth).value;
        if (o.format == Format::json) rows.push_back(json{{"x_over_pi", y}, {"x", y * std::numbers::pi}, {"f", fx}});
        else s << detail::full(y) << ',' << detail::full(y * std::numbers::pi) << ',' << detail::full(fx) << '\n';
      }
      if (o.format == Format::json) s << rows.dump(2) << '\n';
    }

    detail::emit(o, s.str(), out);
    return status;
  } catch (const error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace sinprod::cli
