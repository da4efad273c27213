#include "gapspec/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>

#include "gapspec/comb.hpp"
#include "gapspec/denjoy.hpp"
#include "gapspec/errors.hpp"
#include "gapspec/gapset.hpp"
#include "gapspec/greens.hpp"
#include "gapspec/herglotz.hpp"

namespace gapspec::acceptance {

namespace {

using io::json;

struct Example {
  GapSet set;
  DirichletDivisor mu;
  NuDivisor nu;
};

Example one_gap() {
  Example e;
  e.set.E0 = 0;
  e.set.gaps = {{1, 2}};
  e.mu = {{1.2}, {1}};
  e.nu = {-1, {1.5}};
  return e;
}

Example three_gap() {
  Example e;
  e.set.E0 = 0;
  e.set.gaps = {{1, 2}, {3, 4}, {5, 7}};
  e.mu = {{1.2, 3.7, 5.5}, {1, -1, 1}};
  e.nu = {-1, {1.5, 3.5, 6}};
  return e;
}

// Points of the interior of E, kept a tenth of a band length from the edges.
std::vector<double> band_samples(const GapSet& s, int count, std::mt19937_64& rng) {
  std::vector<std::pair<double, double>> bands;
  double lo = s.E0;
  for (const auto& g : s.gaps) {
    bands.push_back({lo, g.a});
    lo = g.b;
  }
  bands.push_back({lo, lo + 3.0});
  std::vector<double> out;
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int i = 0; i < count; ++i) {
    const auto& b = bands[static_cast<std::size_t>(i) % bands.size()];
    out.push_back(b.first + (b.second - b.first) * u(rng));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Random admissible finite gap set with divisors.
Example random_example(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Example e;
  e.set.E0 = -2.0 + 4.0 * u(rng);
  const int n = 1 + static_cast<int>(u(rng) * 4);
  double x = e.set.E0;
  for (int j = 0; j < n; ++j) {
    const double a = x + 0.2 + 2.0 * u(rng);
    const double b = a + 0.1 + 2.0 * u(rng);
    e.set.gaps.push_back({a, b});
    e.mu.mu.push_back(a + (b - a) * u(rng));
    e.mu.sigma.push_back(u(rng) < 0.5 ? 1 : -1);
    e.nu.nu.push_back(a + (b - a) * u(rng));
    x = b;
  }
  e.nu.nu0 = e.set.E0 - 3.0 * u(rng);
  return e;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome reflectionless() {
  Outcome o;
  std::mt19937_64 rng(1);
  double exact = 0, eps = 0;
  for (const auto& e : {one_gap(), three_gap()}) {
    auto lam = band_samples(e.set, 100, rng);
    exact = std::max(exact, greens::reflectionless_check(e.set, e.mu, lam));
    eps = std::max(eps, greens::reflectionless_check_eps(e.set, e.mu, lam, 1e-7));
  }
  o.pass = exact <= 1e-12 && eps <= 1e-6;
  o.measured = {{"exact_max_abs_re", exact}, {"eps_max_abs_re", eps}, {"eps", 1e-7}};
  o.summary = fmt("max|Re g(l+i0)| = %.3g (<= 1e-12), eps=1e-7: %.3g (<= 1e-6)", exact, eps);
  return o;
}

Outcome asymptotics() {
  Outcome o;
  double wg = 0, wh = 0;
  for (const auto& e : {one_gap(), three_gap()}) {
    for (double y : {1e6, -1e6}) {
      const cplx z(0, y);
      const cplx r = sqrt2pi(z - e.set.E0);
      wg = std::max(wg, std::abs(2.0 * r * greens::g_eval(e.set, e.mu, z) / cplx(0, 1) - 1.0));
      wh = std::max(wh, std::abs(2.0 * greens::h_eval(e.set, e.nu, z) / (cplx(0, 1) * r) - 1.0));
    }
  }
  o.pass = wg <= 1e-4 && wh <= 1e-4;
  o.measured = {{"g_deviation", wg}, {"h_deviation", wh}, {"abs_z", 1e6}};
  o.summary = fmt("|2 sqrt(z) g/i - 1| = %.3g, |2 h/(i sqrt(z)) - 1| = %.3g (<= 1e-4)", wg, wh);
  return o;
}

Outcome xi() {
  Outcome o;
  std::mt19937_64 rng(3);
  double on_E = 0, on_gaps = 0;
  int gap_points = 0;
  for (const auto& e : {one_gap(), three_gap()}) {
    auto m = greens::g_evaluator(e.set, e.mu);
    for (double l : band_samples(e.set, 50, rng))
      on_E = std::max(on_E, std::fabs(herglotz::xi_boundary(m, l).value - 0.5));
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int i = 0; i < 50; ++i) {
      const auto& g = e.set.gaps[static_cast<std::size_t>(i) % e.set.gaps.size()];
      const std::size_t j = static_cast<std::size_t>(i) % e.set.gaps.size();
      double l = g.a + (g.b - g.a) * u(rng);
      if (std::fabs(l - e.mu.mu[j]) < 1e-3 * (g.b - g.a)) continue;
      const double want = greens::xi_profile(e.set, e.mu, l);
      on_gaps = std::max(on_gaps, std::fabs(herglotz::xi_boundary(m, l).value - want));
      ++gap_points;
    }
  }
  o.pass = on_E <= 1e-6 && on_gaps <= 1e-6;
  o.measured = {{"max_dev_on_E", on_E}, {"max_dev_on_gaps", on_gaps}, {"gap_points", gap_points}};
  o.summary = fmt("|xi - 1/2| on E = %.3g, |xi - {0,1}| on gaps = %.3g (<= 1e-6)", on_E, on_gaps);
  return o;
}

Outcome trace() {
  Outcome o;
  double worst = 0;
  json per = json::array();
  for (const auto& e : {one_gap(), three_gap()}) {
    const double v = greens::trace_potential(e.set, e.mu).value;
    const double t = greens::trace_limit_check(e.set, e.mu, 1e4);
    const double rel = std::fabs(t - v) / std::fabs(v);
    worst = std::max(worst, rel);
    per.push_back({{"V", v}, {"limit_y1e4", t}, {"relative", rel}});
  }
  o.pass = worst <= 1e-3;
  o.measured = {{"cases", per}, {"max_relative", worst}};
  o.summary = fmt("trace limit at y=1e4 vs V: max relative %.3g (<= 1e-3)", worst);
  return o;
}

Outcome stieltjes() {
  Outcome o;
  NevanlinnaRep rep;
  rep.measure.pp.push_back({0.5, 0.7});
  AcPiece p;
  p.l = 1;
  p.u = 3;
  p.density = [](double) { return 2.0; };
  p.form = "const:2";
  rep.measure.ac.push_back(p);
  auto m = HerglotzEvaluator::representation(rep);
  const double mass_ac = herglotz::stieltjes_invert(m, 1.2, 2.6).value;
  const double mass_pp = herglotz::stieltjes_invert(m, 0.0, 0.9).value;
  const double w = herglotz::point_mass(m, 0.5).value;
  const double w0 = herglotz::point_mass(m, 2.0).value;
  const double e1 = std::fabs(mass_ac - 2.8), e2 = std::fabs(mass_pp - 0.7), e3 = std::fabs(w - 0.7),
               e4 = std::fabs(w0);
  const double worst = std::max({e1, e2, e3, e4});
  o.pass = worst <= 1e-4;
  o.measured = {{"interval_1.2_2.6", mass_ac}, {"interval_0_0.9", mass_pp}, {"weight_at_0.5", w},
                {"weight_at_2", w0}, {"max_error", worst}};
  o.summary = fmt("masses %.8f (2.8), %.8f (0.7); max error %.3g (<= 1e-4)", mass_ac, mass_pp, worst);
  return o;
}

Outcome compactification() {
  Outcome o;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> re(-5, 10), lg(-2, 1);
  double worst = 0;
  const double lambda0 = -1;
  for (const auto& e : {one_gap(), three_gap()}) {
    auto c = sets::compactify(e.set, lambda0);
    auto dt = greens::compactify_divisor(e.mu, lambda0);
    const double C = greens::compact_constant(e.set, e.mu, lambda0);
    for (int i = 0; i < 25; ++i) {
      const cplx z(re(rng), std::pow(10.0, lg(rng)));
      const cplx want = greens::g_eval(e.set, e.mu, z);
      const cplx got = greens::g_eval_compact(c.set, dt, C, c.zeta(z));
      worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
    }
  }
  o.pass = worst <= 1e-10;
  o.measured = {{"max_relative_diff", worst}, {"points", 50}, {"lambda0", lambda0}};
  o.summary = fmt("|g~(zeta(z)) - g(z)| at 50 points: %.3g (<= 1e-10)", worst);
  return o;
}

Outcome essential_closure() {
  Outcome o;
  FiniteSetDescription ex{{{0, 1}}, {2}};
  auto r = sets::essential_closure(ex);
  const bool example = r == FiniteSetDescription{{{0, 1}}, {}};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5, 5);
  int idem = 0;
  for (int t = 0; t < 100; ++t) {
    FiniteSetDescription d;
    const int ni = static_cast<int>(rng() % 6), np = static_cast<int>(rng() % 4);
    for (int i = 0; i < ni; ++i) {
      double a = u(rng), b = (rng() % 4 == 0) ? a : u(rng);
      d.intervals.push_back({std::min(a, b), std::max(a, b)});
    }
    for (int i = 0; i < np; ++i) d.points.push_back(u(rng));
    auto once = sets::essential_closure(d);
    if (sets::essential_closure(once) == once && once.points.empty()) ++idem;
  }
  o.pass = example && idem == 100;
  o.measured = {{"example_ok", example}, {"idempotent", idem}, {"trials", 100}};
  o.summary = std::string("[0,1] u {2} -> ") + (example ? "[0,1]" : "wrong") + ", idempotent " +
              std::to_string(idem) + "/100";
  return o;
}

Outcome comb_maps() {
  Outcome o;
  GapSet free;
  auto cd0 = comb::solve_critical_points(free);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> re(-10, 10), im(0.01, 10);
  double dz = 0;
  for (int i = 0; i < 20; ++i) {
    const cplx z(re(rng), im(rng));
    dz = std::max(dz, std::abs(comb::theta_eval(free, cd0, z) - std::sqrt(z)));
  }
  GapSet one;
  one.gaps = {{1, 2}};
  auto cd1 = comb::solve_critical_points(one);
  auto sp = comb::split_integrals(one, cd1, 0);
  const double split = std::fabs(sp.left + sp.right);

  DenjoyParams p;
  p.N = 40;
  auto ds = denjoy::build(p);
  json stages = json::array();
  double worst_ratio = 0;
  bool ratios_ok = true;
  int tested = 0;
  std::vector<denjoy::ConditionC> cc;
  for (int n = 1; n <= 7; ++n) cc.push_back(denjoy::check_condition_c(ds, n));
  for (int n = 1; n <= 6; ++n) {
    const auto& c = cc[n - 1];
    const double ratio = cc[n].omega0 / c.omega0;
    stages.push_back({{"n", n}, {"holds", c.holds}, {"margin", c.margin}, {"omega0", c.omega0}, {"ratio_next", ratio}});
    if (!c.holds) continue;
    ++tested;
    worst_ratio = std::max(worst_ratio, ratio);
    if (!(ratio <= 0.80)) ratios_ok = false;
  }
  o.pass = dz <= 1e-10 && split <= 1e-8 && ratios_ok && tested > 0;
  o.measured = {{"theta_sqrt_max_dev", dz}, {"one_gap_split", split}, {"one_gap_c", cd1.c[0]},
                {"stages", stages}, {"max_omega_ratio", worst_ratio}, {"stages_with_c", tested}};
  o.summary = fmt("|Theta - sqrt z| = %.3g, split = %.3g, max omega ratio = %.4f (<= 0.80)", dz, split, worst_ratio);
  return o;
}

Outcome denjoy_pointmass() {
  Outcome o;
  DenjoyParams p;
  p.N = 60;
  auto ds = denjoy::build(p);
  auto r = denjoy::point_mass_limit(ds);
  const double z = -1e-6;
  const double v = -z * denjoy::r0_eval(ds, cplx(z, 0), p.N).real();
  const bool converged = r.bound.tail_bound <= 1e-6;
  o.pass = v >= 0.99 * r.bound.value && converged;
  o.measured = {{"value_at_z", v}, {"z", z}, {"lower_bound", r.bound.value}, {"bound_tail", r.bound.tail_bound},
                {"bound_terms", r.bound.terms}, {"margin", v - 0.99 * r.bound.value}, {"listed_gaps", ds.listed},
                {"estimate", r.estimate}, {"estimate_error", r.error}};
  o.summary = fmt("(-z) r0(z) = %.10f >= 0.99 x %.10f (margin %.3g)", v, r.bound.value, v - 0.99 * r.bound.value);
  return o;
}

Outcome expansion() {
  Outcome o;
  DenjoyParams p;
  p.N = 40;
  auto ds = denjoy::build(p);
  GapSet full = denjoy::finite_truncation(ds, 40);
  const int n = static_cast<int>(full.size());
  // The ten largest gaps are gaps 1..10, the top ten of the ascending list.
  std::vector<int> subset;
  for (int k = n - 10; k < n; ++k) subset.push_back(k);
  comb::PhiMap phi(full, subset);
  double worst = std::numeric_limits<double>::infinity(), sum = 0;
  json per = json::array();
  bool each = true;
  for (int j : subset) {
    const auto& g = full.gaps[static_cast<std::size_t>(j)];
    const double img = phi.upper_edge_image(j) - phi.lower_edge_image(j);
    const double ratio = img / g.length();
    worst = std::min(worst, ratio);
    sum += img;
    if (!(img >= g.length() * (1 - 1e-6))) each = false;
    per.push_back({{"gap", n - j}, {"image_length", img}, {"length", g.length()}, {"ratio", ratio}});
  }
  const double all = sets::gap_length(denjoy::truncation(ds, 40));
  const bool total = sum <= all * (1 + 1e-6);
  o.pass = each && total;
  o.measured = {{"gaps", per}, {"min_ratio", worst}, {"image_sum", sum}, {"all_gap_sum", all},
                {"mismatch", phi.mismatch()}, {"iterations", phi.iterations()}, {"listed_gaps", n}};
  o.summary = fmt("min image/length = %.12f (>= 1-1e-6), image sum / all = %.12f (<= 1+1e-6)", worst, sum / all);
  return o;
}

Outcome homogeneity() {
  Outcome o;
  auto one = one_gap().set;
  auto h = sets::homogeneity_scan(one);
  DenjoyParams p;
  p.N = 40;
  auto ds = denjoy::build(p);
  std::vector<double> r;
  double oracle_dev = 0;
  for (int n = 1; n <= 10; ++n) {
    r.push_back(sets::carleson_ratio(ds.set, 0.0, ds.b(n)));
    double tail = 0;
    for (int j = ds.N(); j >= n; --j) tail += ds.band(j);
    oracle_dev = std::max(oracle_dev, std::fabs(r.back() - tail / ds.b(n)) / (tail / ds.b(n)));
  }
  bool mono = true;
  for (std::size_t i = 1; i < r.size(); ++i) mono = mono && r[i] < r[i - 1];
  o.pass = h.inf_ratio >= 0.99 && r[4] < 0.1 && mono;
  o.measured = {{"one_gap_inf_ratio", h.inf_ratio}, {"one_gap_evaluated", h.evaluated},
                {"denjoy_ratios", r}, {"monotone", mono}, {"oracle_relative_dev", oracle_dev}};
  o.summary = fmt("one-gap inf ratio %.6f (>= 0.99); Denjoy ratio at b5 %.3g (< 0.1)", h.inf_ratio, r[4]) +
              (mono ? ", decreasing" : ", NOT decreasing");
  return o;
}

Outcome gl_phi() {
  Outcome o;
  DenjoyParams p;
  p.N = 40;
  auto ds = denjoy::build(p);
  std::vector<double> xs;
  for (int i = 0; i <= 100; ++i) xs.push_back(0.05 * i);
  std::vector<std::vector<double>> runs;
  double vmax = 0;
  bool finite = true;
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    denjoy::GlPhiOptions opt;
    opt.quad = {1e-13, tol, 4000};
    std::vector<double> v;
    for (double x : xs) {
      double f = denjoy::gl_phi(ds, x, p.N, opt).value;
      finite = finite && std::isfinite(f);
      vmax = std::max(vmax, std::fabs(f));
      v.push_back(f);
    }
    runs.push_back(std::move(v));
  }
  double drift = 0;
  for (std::size_t k = 1; k < runs.size(); ++k)
    for (std::size_t i = 0; i < xs.size(); ++i) drift = std::max(drift, std::fabs(runs[k][i] - runs[k - 1][i]));
  auto small = denjoy::gl_phi(ds, 1e-3, p.N);
  double half_gaps = 0;
  for (const auto& g : ds.set.gaps) half_gaps += 0.5 * g.length();
  const bool near_zero = std::fabs(small.value) <= 1e-2;
  o.pass = finite && drift < 1e-3 && near_zero;
  o.measured = {{"sup_abs_phi", vmax}, {"refinement_drift", drift}, {"phi_at_1e-3", small.value},
                {"phi1_at_1e-3", small.phi1}, {"phi2_at_1e-3", small.phi2}, {"half_gap_sum", half_gaps},
                {"bounded", finite}};
  o.summary = fmt("sup|Phi| = %.4f, refinement drift %.3g (< 1e-3), |Phi(1e-3)| = %.6f (<= 1e-2)", vmax, drift,
                  std::fabs(small.value));
  if (!near_zero) o.summary += fmt("; Phi(0+) -> sum(b-a)/2 = %.6f", half_gaps);
  return o;
}

Outcome positivity() {
  Outcome o;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> re(-10, 20), lg(-6, 2), u(0, 1);
  double worst = std::numeric_limits<double>::infinity();
  const char* names[] = {"g", "h", "g+h", "r0", "-1/r0"};
  double per[5];
  std::fill(per, per + 5, std::numeric_limits<double>::infinity());
  for (int t = 0; t < 20; ++t) {
    auto e = random_example(rng);
    DenjoyParams p;
    p.b1 = 0.5 + 2.0 * u(rng);
    p.ell.l1 = 0.05 + 0.4 * u(rng);
    p.ell.q = 0.1 + 0.8 * u(rng);
    p.N = 20;
    auto ds = denjoy::build(p);
    for (int i = 0; i < 1000; ++i) {
      const cplx z(re(rng), std::pow(10.0, lg(rng)));
      const cplx g = greens::g_eval(e.set, e.mu, z);
      const cplx h = greens::h_eval(e.set, e.nu, z);
      const cplx r0 = denjoy::r0_eval(ds, z, p.N);
      const double v[5] = {g.imag(), h.imag(), (g + h).imag(), r0.imag(), (-1.0 / r0).imag()};
      for (int k = 0; k < 5; ++k) per[k] = std::min(per[k], v[k]);
    }
  }
  json m;
  for (int k = 0; k < 5; ++k) {
    m[std::string("min_im_") + names[k]] = per[k];
    worst = std::min(worst, per[k]);
  }
  m["divisors"] = 20;
  m["points_each"] = 1000;
  o.pass = worst >= -1e-12;
  o.measured = m;
  o.summary = fmt("min Im over g, h, g+h, r0, -1/r0 = %.3g (>= -1e-12)", worst);
  return o;
}

struct Entry {
  const char* name;
  double budget;
  std::function<Outcome()> fn;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = {
      {"reflectionless", 1, reflectionless},  {"asymptotics", 1, asymptotics},
      {"xi", 5, xi},                          {"trace", 1, trace},
      {"stieltjes", 10, stieltjes},           {"compactify", 1, compactification},
      {"essential-closure", 1, essential_closure}, {"comb", 60, comb_maps},
      {"denjoy-pointmass", 5, denjoy_pointmass}, {"expansion", 60, expansion},
      {"homogeneity", 5, homogeneity},        {"gl-phi", 120, gl_phi},
      {"positivity", 10, positivity},
  };
  return e;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> n = [] {
    std::vector<std::string> v;
    for (const auto& e : entries()) v.push_back(e.name);
    return v;
  }();
  return n;
}

Outcome run(const std::string& name) {
  const auto& es = entries();
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (name != es[i].name) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = es[i].fn();
    } catch (const Error& e) {
      o.pass = false;
      o.summary = std::string("error: ") + e.what();
      o.measured = {{"error", e.what()}};
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.id = static_cast<int>(i) + 1;
    o.name = name;
    o.budget = es[i].budget;
    if (o.seconds > o.budget) {
      o.pass = false;
      o.summary += fmt(" [over time budget %.0f s]", o.budget);
    }
    return o;
  }
  throw ConfigError("unknown suite '" + name + "'");
}

std::vector<Outcome> run_all() {
  std::vector<Outcome> out;
  for (const auto& n : suite_names()) out.push_back(run(n));
  return out;
}

std::string format_line(const Outcome& o) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d %-18s", o.pass ? "PASS" : "FAIL", o.id, o.name.c_str());
  return std::string(head) + o.summary + fmt(" (%.2f s)", o.seconds);
}

io::json to_json(const Outcome& o) {
  return {{"id", o.id},           {"suite", o.name},     {"pass", o.pass},
          {"measured", o.measured}, {"seconds", o.seconds}, {"budget_seconds", o.budget}};
}

}  // namespace gapspec::acceptance
