// End-to-end checks, one line per criterion. The full-range table, its fit and
// the k = 29 determinism run take minutes and only run with --expensive.
//
//   acceptance [--expensive] [--only 1,4,7]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "sinprod/cli.hpp"
#include "sinprod/sinprod.hpp"

using namespace sinprod;

namespace {

struct Published {
  int k;
  double m_k;
  double inv_sqrt_diff;
  double extrapolated;
};

constexpr Published published[] = {
    {6, 1.2419727451, 0.0, 1.1713968},        {7, 1.2311527243, 9.613598, 1.1710636},
    {8, 1.2230892609, 11.136255, 1.1707736},  {9, 1.2168748353, 12.685264, 1.1705518},
    {10, 1.2119511226, 14.251272, 1.1703889}, {11, 1.2079596568, 15.828283, 1.1702709},
    {12, 1.2046613111, 17.412130, 1.1701856}, {13, 1.2018911808, 18.999838, 1.1701237},
    {14, 1.1995322446, 20.589315, 1.1700785}, {15, 1.1974993737, 22.179160, 1.1700452},
    {16, 1.1957292786, 23.768496, 1.1700204}, {17, 1.1941739924, 25.356823, 1.1700019},
    {18, 1.1927965318, 26.943897, 1.1699877}, {19, 1.1915679404, 28.529638, 1.1699769},
    {20, 1.1904652307, 30.114067, 1.1699685}, {21, 1.1894699246, 31.697256, 1.1699620},
    {22, 1.1885669999, 33.279304, 1.1699568}, {23, 1.1877441184, 34.860317, 1.1699527},
    {24, 1.1869910513, 36.440403, 1.1699493}, {25, 1.1862992466, 38.019661, 1.1699466},
    {26, 1.1856614980, 39.598181, 1.1699444}, {27, 1.1850716898, 41.176044, 1.1699426},
    {28, 1.1845245979, 42.753322, 1.1699411}, {29, 1.1840157324, 44.330078, 1.1699399},
};

const Published& row_for(int k) { return published[k - 6]; }

// M_k values shared between criteria so each is computed once
std::map<int, double> m_cache;

double m_of(int k) {
  auto it = m_cache.find(k);
  if (it != m_cache.end()) return it->second;
  return m_cache[k] = midpoint_estimate(k);
}

std::vector<ConvergenceRow> rows_between(int lo, int hi) {
  std::vector<double> m;
  for (int k = lo; k <= hi; ++k) m.push_back(m_of(k));
  return convergence_rows(lo, m, default_extrapolation_a, default_extrapolation_b);
}

struct Outcome {
  bool pass = true;
  std::string detail;
  bool skipped = false;
};

const Outcome needs_expensive{false, "needs M_21..M_29; run with --expensive", true};

// column check against the printed table; returns the worst errors seen
struct Columns {
  bool m = false;
  bool diff = false;
  bool extrapolated = false;
};

// Compares computed rows against the printed table; col3 and col4 must round
// to the printed digits (half a unit in the last place).
Outcome check_columns(int lo, int hi, double tol_m, Columns which) {
  // rows from k = lo - 1 so the difference column exists at lo (except at 6)
  const int first = std::max(6, lo - 1);
  const auto rows = rows_between(first, hi);
  double worst_m = 0.0, worst_d = 0.0, worst_e = 0.0;
  std::string off;
  Outcome o;
  auto miss = [&](const char* col, int k) {
    o.pass = false;
    off += std::string(off.empty() ? "" : ",") + col + "@k=" + std::to_string(k);
  };
  for (const auto& r : rows) {
    if (r.k < lo) continue;
    const Published& p = row_for(r.k);
    if (which.m) {
      const double em = std::fabs(r.m_k - p.m_k);
      worst_m = std::max(worst_m, em);
      if (em > tol_m) miss("col2", r.k);
    }
    if (which.extrapolated) {
      const double ee = std::fabs(r.extrapolated - p.extrapolated);
      worst_e = std::max(worst_e, ee);
      if (ee > 5e-8) miss("col4", r.k);
    }
    if (which.diff && p.inv_sqrt_diff > 0.0) {
      if (!r.inv_sqrt_diff) {
        miss("col3", r.k);
        continue;
      }
      const double ed = std::fabs(*r.inv_sqrt_diff - p.inv_sqrt_diff);
      worst_d = std::max(worst_d, ed);
      if (ed > 5e-7) miss("col3", r.k);
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "max |d col2| %.2e, |d col3| %.2e, |d col4| %.2e", worst_m, worst_d, worst_e);
  o.detail = buf;
  if (!off.empty()) o.detail += "; off in " + off;
  return o;
}

Outcome criterion1() {
  // through the command-line front end, as a user would produce the table
  std::ostringstream out, err;
  const char* argv[] = {"sinprod", "table", "--kmin", "6", "--kmax", "20"};
  const int code = cli::run(6, argv, out, err);
  if (code != 0) return {false, "table exited with " + std::to_string(code) + ": " + err.str()};
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);  // header
  int printed_rows = 0;
  double worst = 0.0;
  while (std::getline(in, line) && !line.empty()) {
    int k = 0;
    double m = 0.0;
    if (std::sscanf(line.c_str(), "%d,%lf", &k, &m) != 2) return {false, "unreadable row: " + line};
    worst = std::max(worst, std::fabs(m - row_for(k).m_k));
    ++printed_rows;
  }
  if (printed_rows != 15) return {false, "expected 15 rows, got " + std::to_string(printed_rows)};
  Outcome cols = check_columns(6, 20, 5e-11, {true, true, true});
  cols.detail += "; CSV max |dM| " + std::to_string(worst);
  if (worst > 5e-11) cols.pass = false;
  return cols;
}

Outcome criterion2() { return check_columns(21, 29, 5e-10, {true, false, false}); }

Outcome criterion3(bool expensive) {
  if (!expensive) return needs_expensive;
  Outcome o = check_columns(6, 29, 0.0, {false, false, true});
  const auto rows = rows_between(20, 29);
  const FitResult f = fit_ab(rows, {20, 29});
  char buf[200];
  std::snprintf(buf, sizeof buf, "; fit [20,29]: m_inf %.8f a %.6f b %.6f rms %.2e", f.m_inf, f.a, f.b, f.rms_residual);
  o.detail += buf;
  if (std::fabs(f.m_inf - 1.16993) > 2e-5 || !(f.b < 20.0) || !std::isfinite(f.rms_residual)) o.pass = false;
  return o;
}

Outcome criterion4() {
  const AngleRep x = AngleRep::rational(1, 3);
  const ProductEnclosure e = evaluate_limit(x, 10000, true);
  const double closed = closed_form_pi_thirds();
  const double corrected = pi_thirds_tail_corrected(e);
  Outcome o;
  o.pass = e.lower > 0.0 && e.lower <= closed && closed <= e.value && std::fabs(e.value - closed) < 1e-4 &&
           std::fabs(corrected - closed) < 1e-12;
  char buf[240];
  std::snprintf(buf, sizeof buf, "lower %.15f <= %.15f <= f_N %.15f; |f_N - closed| %.2e; corrected gap %.2e", e.lower,
                closed, e.value, std::fabs(e.value - closed), std::fabs(corrected - closed));
  o.detail = buf;
  return o;
}

Outcome criterion5() {
  const ZeroSearchResult a = verify_constructed_zero(0.75);
  const ZeroSearchResult b = verify_constructed_zero(0.4);
  Outcome o;
  o.pass = a.partial_depth && *a.partial_depth <= 16 && b.partial_depth && *b.partial_depth <= 257;
  for (int j = 0; j <= 4; ++j) {
    const SpecialDepthFactor s = special_factor(j);
    o.pass = o.pass && s.within_bound;
  }
  for (const auto* z : {&a, &b})
    for (const auto& t : z->trail) o.pass = o.pass && t.within_bound;
  auto depth = [](const std::optional<int>& d) { return d ? std::to_string(*d) : std::string("none"); };
  o.detail = "below 0.75 at depth " + depth(a.partial_depth) + ", below 0.4 at depth " + depth(b.partial_depth) +
             ", special factors n = 2, 4, 16, 256, 65536 within bound";
  return o;
}

Outcome criterion6() {
  Outcome o;
  for (int k : {4, 6, 8}) {
    const MeasureEstimate m = empirical_small_value_measure(k, 64, 1'000'000, default_seed);
    o.pass = o.pass && m.passes;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%sk=%d: %.3e - %.1e <= %.3e", o.detail.empty() ? "" : "; ", k, m.estimate,
                  m.ci_halfwidth, m.theoretical_bound);
    o.detail += buf;
  }
  return o;
}

Outcome criterion7(bool expensive) {
  Outcome o;
  const double floor = lebesgue_lower_bound();
  const int top = expensive ? 29 : 20;
  double smallest = 1e300;
  for (int k = 0; k <= top; ++k) smallest = std::min(smallest, m_of(k));
  o.pass = smallest > floor;
  double worst_b = 1e300;
  for (int k = 0; k <= 10; ++k) {
    const MeasureEstimate m = b_k_measure(k, 1 << 20);
    o.pass = o.pass && m.passes && m.estimate - m.ci_halfwidth > std::numbers::pi / 2.0;
    worst_b = std::min(worst_b, m.estimate - m.ci_halfwidth);
  }
  double worst_log = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double v = exact_log_integral(k);
    worst_log = std::min(worst_log, v);
    o.pass = o.pass && v > -std::pow(std::numbers::pi, 3) / 4.0;
  }
  char buf[240];
  std::snprintf(buf, sizeof buf, "min M_k (k<=%d) %.6f > %.6f; min mu(B_k) - slack %.6f > pi/2; min log integral %.6f > %.6f",
                top, smallest, floor, worst_b, worst_log, -std::pow(std::numbers::pi, 3) / 4.0);
  o.detail = buf;
  return o;
}

Outcome criterion8() {
  Outcome o;
  // slope bound on g_n over random pairs at mixed separations
  const CounterRng rng(2024, 8);
  std::uint64_t slope_violations = 0;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const AngleRep x = AngleRep::random(2024, i);
    const int n = static_cast<int>(rng.bits(3 * i) % 32);
    const double scale = std::ldexp(1.0, -static_cast<int>(rng.bits(3 * i + 1) % 48));
    const double off = rng.symmetric_nonzero(3 * i + 2) * scale;
    const AngleRep t = perturbed(x, off, words_for_offset(off, n));
    if (!(log_factor_rise(x, t, n) < lemma2_rhs(x, t, n))) ++slope_violations;
  }
  o.pass = slope_violations == 0;

  std::uint64_t trial_violations = 0, certified = 0, lambda_violations = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const AngleRep x = AngleRep::random(4242, s);
    const UscReport r = check_usc(x, 0.05, 10000, s);
    trial_violations += r.log_violations + r.value_violations;
    if (r.witness.certified) {
      ++certified;
      if (!(r.witness.lambda < 0.81)) ++lambda_violations;
    }
    for (double eps : {1.0 / 7.0, 0.01}) {
      const UscWitness w = usc_witness(x, eps);
      if (w.certified) {
        ++certified;
        if (!(w.lambda < 0.81)) ++lambda_violations;
      }
    }
  }
  const LambdaMaxCheck c = lemma1_lambda_max_check();
  o.pass = o.pass && trial_violations == 0 && lambda_violations == 0 && certified > 0 && c.passes;
  char buf[300];
  std::snprintf(buf, sizeof buf,
                "slope-bound violations %llu/100000; trial violations %llu/200000; lambda >= 0.81 in %llu of %llu certified "
                "witnesses; max f_1 %.9f at sin x %.9f (sqrt(10/11) %.9f)",
                static_cast<unsigned long long>(slope_violations), static_cast<unsigned long long>(trial_violations),
                static_cast<unsigned long long>(lambda_violations), static_cast<unsigned long long>(certified),
                c.max_value, c.sin_argmax, c.expected_sin);
  o.detail = buf;
  return o;
}

Outcome criterion9() {
  Outcome o;
  double worst = 0.0;
  for (int k = 0; k <= 8; ++k) {
    const double lc = layer_cake_integral(k, 100000, 4097);
    const double ref = midpoint_integral(k, 18);
    worst = std::max(worst, std::fabs(lc - ref));
  }
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double q = integrator.integrate([](double x) { return 2.0 * std::log(std::sin(x)); }, 0.0, std::numbers::pi);
  const double log_gap = std::fabs(exact_log_integral(0) - q);
  o.pass = worst < 1e-3 && log_gap < 1e-8;
  char buf[200];
  std::snprintf(buf, sizeof buf, "max |layer cake - midpoint| (k<=8) %.2e; |exact - tanh-sinh| %.2e", worst, log_gap);
  o.detail = buf;
  return o;
}

Outcome criterion10(bool expensive) {
  const int k = expensive ? 29 : 20;
  const double one = midpoint_estimate(k, 1);
  const double two = midpoint_estimate(k, 2);
  const double eight = midpoint_estimate(k, 8);
  Outcome o;
  o.pass = one == two && one == eight;
  char buf[200];
  std::snprintf(buf, sizeof buf, "M_%d = %.17g with 1, 2 and 8 workers (%s)", k, one,
                o.pass ? "bit-identical" : "MISMATCH");
  o.detail = buf;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  bool expensive = false;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--expensive") == 0) {
      expensive = true;
    } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      std::string item;
      while (std::getline(list, item, ',')) only.insert(std::stoi(item));
    } else {
      std::fprintf(stderr, "usage: acceptance [--expensive] [--only 1,2,...]\n");
      return 2;
    }
  }

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1},
      {2, [&] { return expensive ? criterion2() : needs_expensive; }},
      {3, [&] { return criterion3(expensive); }},
      {4, criterion4},
      {5, criterion5},
      {6, criterion6},
      {7, [&] { return criterion7(expensive); }},
      {8, criterion8},
      {9, criterion9},
      {10, [&] { return criterion10(expensive); }},
  };

  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass && !o.skipped) ++failures;
    std::printf("criterion %2d: %s (%.1fs) %s\n", id, o.skipped ? "SKIP" : o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
