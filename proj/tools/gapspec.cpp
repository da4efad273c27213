#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gapspec/acceptance.hpp"
#include "gapspec/comb.hpp"
#include "gapspec/denjoy.hpp"
#include "gapspec/errors.hpp"
#include "gapspec/gapset.hpp"
#include "gapspec/greens.hpp"
#include "gapspec/herglotz.hpp"
#include "gapspec/io.hpp"

using namespace gapspec;
using io::json;

namespace {

// Exit status for a failed check inside an otherwise successful run.
struct AssertionFailed {
  std::string what;
};

struct Options {
  std::string set_path, divisor_path, measure_path, out_path, format;
  std::string grid, lambda_grid, delta_grid, x_grid;
  std::vector<std::string> z;
  double lambda = 0, lambda0 = -1, l1 = 0, l2 = 1, y = 1e4, eps = 0, c = 0, d = 0;
  std::uint64_t seed = 0;
  int samples = 100;
  // denjoy
  double b1 = 1;
  std::string ell = "geometric:0.25,0.25";
  int N = 40, n_max = 6, truncN = -1, K = 8;
  double R = 0, tol = 0;
  std::string subset, intervals, points, input_path, suite;
  std::vector<std::string> argv;
};

std::ostream* out_stream(const Options& o, std::ofstream& file) {
  if (o.out_path.empty()) return &std::cout;
  file.open(o.out_path);
  if (!file) throw ConfigError("cannot write " + o.out_path);
  return &file;
}

json config_of(const Options& o) {
  json c;
  c["args"] = o.argv;
  json inputs = json::object();
  for (const auto* p : {&o.set_path, &o.divisor_path, &o.measure_path, &o.input_path})
    if (!p->empty()) inputs[*p] = io::read_json_file(*p);
  c["inputs"] = inputs;
  c["seed"] = o.seed;
  return c;
}

void emit(const Options& o, const std::string& command, json result) {
  std::ofstream f;
  auto* os = out_stream(o, f);
  *os << io::dump(io::certificate(command, config_of(o), std::move(result))) << '\n';
}

GapSet load_set(const Options& o) {
  if (o.set_path.empty()) throw ConfigError("--set is required");
  return io::gapset_from_json(io::read_json_file(o.set_path));
}

io::Divisor load_divisor(const Options& o) {
  if (o.divisor_path.empty()) throw ConfigError("--divisor is required");
  return io::divisor_from_json(io::read_json_file(o.divisor_path));
}

NuDivisor require_nu(const io::Divisor& d) {
  if (!d.nu) throw ConfigError("divisor file needs nu0 and nu for this command");
  return *d.nu;
}

cplx parse_z(const std::string& s) {
  auto k = s.find(',');
  try {
    if (k == std::string::npos) return {std::stod(s), 0.0};
    return {std::stod(s.substr(0, k)), std::stod(s.substr(k + 1))};
  } catch (const std::exception&) {
    throw ConfigError("bad complex number '" + s + "', expected re,im");
  }
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> v;
  std::stringstream ss(s);
  std::string t;
  while (std::getline(ss, t, ',')) {
    try {
      v.push_back(std::stoi(t));
    } catch (const std::exception&) {
      throw ConfigError("bad index '" + t + "'");
    }
  }
  return v;
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

bool want_csv(const Options& o, bool default_csv) {
  if (o.format.empty()) return default_csv;
  if (o.format == "csv") return true;
  if (o.format == "json") return false;
  throw ConfigError("--format must be json or csv");
}

// Measures name their densities; product forms resolve against --set/--divisor.
SpectralMeasure load_measure(const Options& o) {
  if (o.measure_path.empty()) throw ConfigError("--measure is required");
  io::DensityResolver resolve = [&o](const std::string& form) -> std::function<double(double)> {
    if (form == "gl-tilde-omega") throw ConfigError("gl-tilde-omega is a signed density, not a measure");
    GapSet s = load_set(o);
    if (form == "product-r0") {
      auto d = greens::upper_edge_divisor(s);
      return [s, d](double l) { return greens::g_density(s, d, l); };
    }
    auto dv = load_divisor(o);
    if (form == "product-g") return [s, d = dv.mu](double l) { return greens::g_density(s, d, l); };
    if (form == "product-h") return [s, n = require_nu(dv)](double l) { return greens::h_density(s, n, l); };
    throw ConfigError("unknown density form '" + form + "'");
  };
  return io::measure_from_json(io::read_json_file(o.measure_path), resolve);
}

HerglotzEvaluator load_evaluator(const Options& o) {
  NevanlinnaRep rep;
  rep.c = o.c;
  rep.d = o.d;
  rep.measure = load_measure(o);
  return HerglotzEvaluator::representation(std::move(rep));
}

json extrap(const herglotz::Extrapolated& e) {
  return {{"value", e.value}, {"error", e.error}, {"monotone", e.monotone}, {"samples", e.samples}};
}

DenjoySet load_denjoy(const Options& o) {
  DenjoyParams p;
  if (!o.set_path.empty()) {
    GapSet s = load_set(o);
    if (!s.tail) throw ConfigError("--set needs a denjoy tail for denjoy commands");
    p.b1 = s.tail->b1;
    p.ell = s.tail->ell;
  } else {
    p.b1 = o.b1;
    p.ell = io::parse_ell(o.ell);
  }
  p.N = o.N;
  if (p.ell.kind == EllRule::Kind::List) p.N = std::min(p.N, p.ell.length());
  return denjoy::build(p);
}

// ---- set -------------------------------------------------------------------

void set_validate(const Options& o) {
  GapSet s = load_set(o);
  auto v = sets::validate(s);
  json viol = json::array();
  for (const auto& x : v) viol.push_back({{"index", x.index}, {"message", x.message}});
  emit(o, "set validate", {{"valid", v.empty()}, {"violations", viol}, {"gap_length", v.empty() ? sets::gap_length(s) : NAN}});
  if (!v.empty()) throw AssertionFailed{"set has " + std::to_string(v.size()) + " violation(s)"};
}

void set_homogeneity(const Options& o) {
  GapSet s = load_set(o);
  sets::require_valid(s);
  auto lam = o.lambda_grid.empty() ? sets::default_lambda_grid(s) : io::parse_grid(o.lambda_grid).points();
  auto del = o.delta_grid.empty() ? sets::default_delta_grid(s) : io::parse_grid(o.delta_grid).points();
  auto h = sets::homogeneity_scan(s, lam, del);
  emit(o, "set homogeneity",
       {{"inf_ratio", h.inf_ratio}, {"witness", {{"lambda", h.witness_lambda}, {"delta", h.witness_delta}}},
        {"evaluated", h.evaluated}});
}

void set_compactify(const Options& o) {
  GapSet s = load_set(o);
  sets::require_valid(s);
  auto c = sets::compactify(s, o.lambda0);
  json r = {{"lambda0", o.lambda0}, {"set", io::to_json(c.set)}};
  if (!o.divisor_path.empty()) {
    auto d = load_divisor(o);
    r["divisor"] = io::to_json(greens::compactify_divisor(d.mu, o.lambda0));
    r["constant"] = greens::compact_constant(s, d.mu, o.lambda0);
  }
  emit(o, "set compactify", r);
}

void set_closure(const Options& o) {
  FiniteSetDescription d;
  if (!o.input_path.empty()) {
    auto j = io::read_json_file(o.input_path);
    for (const auto& iv : j.value("intervals", json::array())) d.intervals.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    for (const auto& p : j.value("points", json::array())) d.points.push_back(p.get<double>());
  } else {
    std::stringstream ss(o.intervals);
    std::string t;
    while (std::getline(ss, t, ',')) {
      auto k = t.find(':');
      if (k == std::string::npos) throw ConfigError("intervals look like l:u,l:u");
      d.intervals.push_back({std::stod(t.substr(0, k)), std::stod(t.substr(k + 1))});
    }
    std::stringstream ps(o.points);
    while (std::getline(ps, t, ',')) d.points.push_back(std::stod(t));
  }
  for (const auto& iv : d.intervals)
    if (!(iv.first <= iv.second)) throw ConfigError("interval with l > u");
  auto r = sets::essential_closure(d);
  json iv = json::array();
  for (const auto& p : r.intervals) iv.push_back({p.first, p.second});
  emit(o, "set essential-closure", {{"intervals", iv}, {"points", r.points}});
}

// ---- herglotz --------------------------------------------------------------

void herglotz_eval(const Options& o) {
  auto m = load_evaluator(o);
  if (o.z.empty()) throw ConfigError("--z is required");
  json vals = json::array();
  for (const auto& zs : o.z) {
    cplx z = parse_z(zs);
    if (z.imag() == 0) throw DomainError("eval needs Im z != 0");
    vals.push_back({{"z", cjson(z)}, {"m", cjson(m(z))}});
  }
  emit(o, "herglotz eval", {{"values", vals}});
}

void herglotz_invert(const Options& o) {
  auto m = load_evaluator(o);
  emit(o, "herglotz invert", {{"l1", o.l1}, {"l2", o.l2}, {"mass", extrap(herglotz::stieltjes_invert(m, o.l1, o.l2))}});
}

void herglotz_pointmass(const Options& o) {
  auto m = load_evaluator(o);
  emit(o, "herglotz pointmass", {{"lambda", o.lambda}, {"weight", extrap(herglotz::point_mass(m, o.lambda))}});
}

void herglotz_xi(const Options& o) {
  auto m = load_evaluator(o);
  emit(o, "herglotz xi", {{"lambda", o.lambda}, {"xi", extrap(herglotz::xi_boundary(m, o.lambda))}});
}

// ---- greens ----------------------------------------------------------------

void greens_eval(const Options& o) {
  GapSet s = load_set(o);
  auto d = load_divisor(o);
  if (o.grid.empty()) throw ConfigError("--grid is required");
  auto pts = io::parse_grid(o.grid).points();
  std::vector<std::vector<double>> rows;
  int skipped = 0;
  for (double l : pts) {
    try {
      cplx g = o.eps > 0 ? greens::g_eval(s, d.mu, cplx(l, o.eps)) : greens::g_boundary(s, d.mu, l);
      rows.push_back({l, g.real(), g.imag(), greens::xi_profile(s, d.mu, l)});
    } catch (const DomainError&) {
      ++skipped;  // band edges
    }
  }
  if (skipped) std::fprintf(stderr, "skipped %d grid point(s) at band edges\n", skipped);
  if (want_csv(o, true)) {
    std::ofstream f;
    io::CsvWriter w(*out_stream(o, f), {"lambda", "re_g", "im_g", "xi"});
    for (const auto& r : rows) w.row(r);
  } else {
    json t = json::array();
    for (const auto& r : rows) t.push_back(r);
    emit(o, "greens eval", {{"columns", {"lambda", "re_g", "im_g", "xi"}}, {"rows", t}, {"skipped", skipped}});
  }
}

void greens_xi(const Options& o) {
  GapSet s = load_set(o);
  auto d = load_divisor(o);
  auto m = greens::g_evaluator(s, d.mu);
  emit(o, "greens xi", {{"lambda", o.lambda}, {"profile", greens::xi_profile(s, d.mu, o.lambda)},
                        {"boundary", extrap(herglotz::xi_boundary(m, o.lambda))}});
}

void greens_potential(const Options& o) {
  GapSet s = load_set(o);
  auto d = load_divisor(o);
  auto t = greens::trace_potential(s, d.mu);
  emit(o, "greens potential", {{"value", t.value}, {"bound", t.bound}, {"tail_bound", t.tail_bound}});
}

void greens_trace_check(const Options& o) {
  GapSet s = load_set(o);
  auto d = load_divisor(o);
  const double v = greens::trace_potential(s, d.mu).value;
  const double t = greens::trace_limit_check(s, d.mu, o.y);
  emit(o, "greens trace-check", {{"y", o.y}, {"limit", t}, {"potential", v}, {"difference", t - v}});
}

void greens_reflectionless(const Options& o) {
  GapSet s = load_set(o);
  auto d = load_divisor(o);
  std::mt19937_64 rng(o.seed);
  std::vector<std::pair<double, double>> bands;
  double lo = s.E0;
  for (const auto& g : s.gaps) {
    bands.push_back({lo, g.a});
    lo = g.b;
  }
  bands.push_back({lo, lo + 3.0});
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<double> lam;
  for (int i = 0; i < o.samples; ++i) {
    const auto& b = bands[static_cast<std::size_t>(i) % bands.size()];
    lam.push_back(b.first + (b.second - b.first) * u(rng));
  }
  const double exact = greens::reflectionless_check(s, d.mu, lam);
  json r = {{"samples", o.samples}, {"max_abs_re", exact}, {"pass", exact <= 1e-12}};
  if (o.eps > 0) r["max_abs_re_eps"] = greens::reflectionless_check_eps(s, d.mu, lam, o.eps);
  emit(o, "greens reflectionless", r);
  if (exact > 1e-12) throw AssertionFailed{"Re g(lambda+i0) exceeds 1e-12"};
}

// ---- comb ------------------------------------------------------------------

comb::SolveOptions solve_opts(const Options& o) {
  comb::SolveOptions so;
  if (o.tol > 0) so.tol = o.tol;
  return so;
}

void comb_critical(const Options& o) {
  GapSet s = load_set(o);
  auto cd = comb::solve_critical_points(s, solve_opts(o));
  emit(o, "comb critical", io::to_json(cd));
}

void comb_theta(const Options& o) {
  GapSet s = load_set(o);
  auto cd = comb::solve_critical_points(s, solve_opts(o));
  std::vector<cplx> zs;
  for (const auto& z : o.z) zs.push_back(parse_z(z));
  if (!o.grid.empty())
    for (double x : io::parse_grid(o.grid).points()) zs.push_back({x, 0.0});
  if (zs.empty()) throw ConfigError("--z or --grid is required");
  if (want_csv(o, false)) {
    std::ofstream f;
    io::CsvWriter w(*out_stream(o, f), {"re_z", "im_z", "re_theta", "im_theta"});
    for (auto z : zs) {
      cplx t = comb::theta_eval(s, cd, z);
      w.row(std::vector<double>{z.real(), z.imag(), t.real(), t.imag()});
    }
    return;
  }
  json vals = json::array();
  for (auto z : zs) vals.push_back({{"z", cjson(z)}, {"theta", cjson(comb::theta_eval(s, cd, z))}});
  emit(o, "comb theta", {{"values", vals}});
}

void comb_widom(const Options& o) {
  GapSet s = load_set(o);
  auto cd = comb::solve_critical_points(s, solve_opts(o));
  emit(o, "comb widom", {{"sum", comb::widom_sum(cd)}, {"h", cd.h}});
}

void comb_phi_map(const Options& o) {
  GapSet s = load_set(o);
  if (o.subset.empty()) throw ConfigError("--subset is required (1-based gap indices)");
  std::vector<int> sub;
  for (int k : parse_ints(o.subset)) sub.push_back(k - 1);
  comb::PhiMap phi(s, sub);
  json gaps = json::array();
  double sum = 0, all = sets::gap_length(s);
  bool expands = true;
  for (int j : phi.subset()) {
    const auto& g = s.gaps[static_cast<std::size_t>(j)];
    const double a = phi.lower_edge_image(j), b = phi.upper_edge_image(j);
    sum += b - a;
    expands = expands && b - a >= g.length() * (1 - 1e-6);
    gaps.push_back({{"gap", j + 1}, {"a", g.a}, {"b", g.b}, {"phi_a", a}, {"phi_b", b}});
  }
  json pts = json::array();
  for (const auto& z : o.z) {
    const double x = parse_z(z).real();
    pts.push_back({{"x", x}, {"phi", phi(x)}});
  }
  emit(o, "comb phi-map",
       {{"gaps", gaps}, {"points", pts}, {"reduced_set", io::to_json(phi.reduced())}, {"image_sum", sum},
        {"all_gap_sum", all}, {"expanding", expands}, {"contracting_sum", sum <= all * (1 + 1e-6)},
        {"mismatch", phi.mismatch()}, {"iterations", phi.iterations()}});
}

// ---- denjoy ----------------------------------------------------------------

void denjoy_build(const Options& o) {
  auto ds = load_denjoy(o);
  auto rc = denjoy::check_recursion(ds);
  emit(o, "denjoy build",
       {{"b1", ds.params.b1}, {"ell", io::to_json(ds.params.ell)}, {"N", ds.N()}, {"listed", ds.listed},
        {"b", ds.b_}, {"a", ds.a_}, {"ell_sum", ds.ell_sum}, {"set", io::to_json(ds.set)},
        {"gap_length", sets::gap_length(denjoy::truncation(ds, ds.N()))},
        {"recursion", {{"recursion", rc.recursion}, {"symmetric", rc.symmetric}, {"ratio", rc.ratio}, {"ordered", rc.ordered}}}});
  if (rc.worst() > 1e-14 || !rc.ordered) throw AssertionFailed{"recursion identities violated"};
}

void denjoy_condition_c(const Options& o) {
  auto ds = load_denjoy(o);
  std::vector<denjoy::ConditionC> cs;
  for (int n = 1; n <= std::min(o.n_max + 1, ds.listed); ++n) cs.push_back(denjoy::check_condition_c(ds, n));
  if (want_csv(o, false)) {
    std::ofstream f;
    io::CsvWriter w(*out_stream(o, f), {"n", "holds", "margin", "inf_omega", "omega0", "ratio_next"});
    for (std::size_t i = 0; i + 1 < cs.size() || (i < cs.size() && cs.size() == 1); ++i) {
      const double r = i + 1 < cs.size() ? cs[i + 1].omega0 / cs[i].omega0 : NAN;
      w.row(std::vector<double>{double(cs[i].n), cs[i].holds ? 1.0 : 0.0, cs[i].margin, cs[i].inf_omega, cs[i].omega0, r});
    }
    return;
  }
  json st = json::array();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    json e = {{"n", cs[i].n}, {"holds", cs[i].holds}, {"margin", cs[i].margin}, {"inf_omega", cs[i].inf_omega},
              {"witness", cs[i].witness}, {"omega0", cs[i].omega0}};
    if (i + 1 < cs.size()) e["ratio_next"] = cs[i + 1].omega0 / cs[i].omega0;
    st.push_back(e);
  }
  emit(o, "denjoy condition-c", {{"stages", st}});
}

void denjoy_pointmass(const Options& o) {
  auto ds = load_denjoy(o);
  auto r = denjoy::point_mass_limit(ds);
  emit(o, "denjoy pointmass",
       {{"estimate", r.estimate}, {"error", r.error}, {"lower_bound", r.bound.value}, {"pass", r.pass},
        {"ratio", r.ratio}, {"z", r.z}, {"values", r.values}, {"truncN", r.truncN},
        {"truncation_spread", r.truncation_gap}, {"bound_terms", r.bound.terms}, {"bound_tail", r.bound.tail_bound}});
  if (!r.pass) throw AssertionFailed{"point-mass estimate below 0.99 x lower bound"};
}

void denjoy_gl_phi(const Options& o) {
  auto ds = load_denjoy(o);
  denjoy::GlPhiOptions opt;
  opt.R = o.R;
  opt.K = o.K;
  if (o.tol > 0) opt.quad.rel_tol = o.tol;
  const int tn = o.truncN >= 0 ? o.truncN : ds.N();
  auto xs = io::parse_grid(o.x_grid.empty() ? "0:5:0.01" : o.x_grid).points();
  std::vector<denjoy::GlPhiValue> v;
  for (double x : xs) v.push_back(denjoy::gl_phi(ds, x, tn, opt));
  if (want_csv(o, true)) {
    std::ofstream f;
    io::CsvWriter w(*out_stream(o, f), {"x", "phi", "error", "phi1", "phi2"});
    for (std::size_t i = 0; i < xs.size(); ++i) w.row(std::vector<double>{xs[i], v[i].value, v[i].error, v[i].phi1, v[i].phi2});
    return;
  }
  json rows = json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) rows.push_back({xs[i], v[i].value, v[i].error, v[i].phi1, v[i].phi2});
  emit(o, "denjoy gl-phi", {{"columns", {"x", "phi", "error", "phi1", "phi2"}}, {"rows", rows}, {"R", v.empty() ? 0.0 : v[0].R}});
}

// ---- verify ----------------------------------------------------------------

void verify(const Options& o) {
  std::vector<std::string> names;
  if (o.suite == "all") {
    names = acceptance::suite_names();
  } else {
    names = {o.suite};
  }
  json res = json::array();
  bool ok = true;
  for (const auto& n : names) {
    auto r = acceptance::run(n);
    std::fprintf(stderr, "%s\n", acceptance::format_line(r).c_str());
    res.push_back(acceptance::to_json(r));
    ok = ok && r.pass;
  }
  emit(o, "verify", {{"suite", o.suite}, {"results", res}, {"pass", ok}});
  if (!ok) throw AssertionFailed{"acceptance suite failed"};
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  o.argv.assign(argv + 1, argv + argc);
  CLI::App app{"Spectral objects of reflectionless Schrodinger operators"};
  app.set_version_flag("--version", std::string(io::version()));
  app.require_subcommand(1);
  std::function<void(const Options&)> action;

  auto common = [&](CLI::App* c) {
    c->add_option("--out,-o", o.out_path, "Output file (default stdout)");
    c->add_option("--format", o.format, "json or csv");
    c->add_option("--seed", o.seed, "Seed for sampled checks");
  };
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& desc, void (*fn)(const Options&)) {
    auto* c = parent->add_subcommand(name, desc);
    common(c);
    c->callback([&action, fn] { action = fn; });
    return c;
  };
  auto with_set = [&](CLI::App* c) { c->add_option("--set", o.set_path, "GapSet JSON"); };
  auto with_div = [&](CLI::App* c) { c->add_option("--divisor", o.divisor_path, "Divisor JSON"); };
  auto with_measure = [&](CLI::App* c) {
    c->add_option("--measure", o.measure_path, "Measure JSON")->required();
    c->add_option("--c", o.c, "Real constant");
    c->add_option("--d", o.d, "Linear coefficient (>= 0)");
    with_set(c);
    with_div(c);
  };
  auto with_denjoy = [&](CLI::App* c) {
    with_set(c);
    c->add_option("--b1", o.b1, "Top edge b1");
    c->add_option("--ell", o.ell, "Ratio rule: geometric:l1,q | power:c,r | list:v,...");
    c->add_option("--N", o.N, "Truncation depth");
  };

  auto* set = app.add_subcommand("set", "Gap set operations");
  set->require_subcommand(1);
  with_set(leaf(set, "validate", "Check gap set invariants", set_validate));
  {
    auto* c = leaf(set, "homogeneity", "Carleson ratio scan", set_homogeneity);
    with_set(c);
    c->add_option("--lambda-grid", o.lambda_grid, "start:stop:count[:geo]");
    c->add_option("--delta-grid", o.delta_grid, "start:stop:count[:geo]");
  }
  {
    auto* c = leaf(set, "compactify", "Map to the compact variant", set_compactify);
    with_set(c);
    with_div(c);
    c->add_option("--lambda0", o.lambda0, "Point below E0");
  }
  {
    auto* c = leaf(set, "essential-closure", "Essential closure of intervals and points", set_closure);
    c->add_option("--input", o.input_path, "JSON {intervals, points}");
    c->add_option("--intervals", o.intervals, "l:u,l:u,...");
    c->add_option("--points", o.points, "p,p,...");
  }

  auto* her = app.add_subcommand("herglotz", "Herglotz representations");
  her->require_subcommand(1);
  {
    auto* c = leaf(her, "eval", "Evaluate the representation", herglotz_eval);
    with_measure(c);
    c->add_option("--z", o.z, "re,im (repeatable)");
  }
  {
    auto* c = leaf(her, "invert", "Stieltjes inversion over [l1, l2]", herglotz_invert);
    with_measure(c);
    c->add_option("--l1", o.l1)->required();
    c->add_option("--l2", o.l2)->required();
  }
  {
    auto* c = leaf(her, "pointmass", "Point mass at lambda", herglotz_pointmass);
    with_measure(c);
    c->add_option("--lambda", o.lambda)->required();
  }
  {
    auto* c = leaf(her, "xi", "Normalized boundary argument at lambda", herglotz_xi);
    with_measure(c);
    c->add_option("--lambda", o.lambda)->required();
  }

  auto* gr = app.add_subcommand("greens", "Diagonal Green's function");
  gr->require_subcommand(1);
  {
    auto* c = leaf(gr, "eval", "g on a real grid (CSV: lambda, re_g, im_g, xi)", greens_eval);
    with_set(c);
    with_div(c);
    c->add_option("--grid", o.grid, "start:stop:count or start:stop:step");
    c->add_option("--eps", o.eps, "Evaluate at lambda + i eps instead of the exact boundary");
  }
  {
    auto* c = leaf(gr, "xi", "xi at lambda", greens_xi);
    with_set(c);
    with_div(c);
    c->add_option("--lambda", o.lambda)->required();
  }
  {
    auto* c = leaf(gr, "potential", "Trace formula potential", greens_potential);
    with_set(c);
    with_div(c);
  }
  {
    auto* c = leaf(gr, "trace-check", "Trace integral at z = iy", greens_trace_check);
    with_set(c);
    with_div(c);
    c->add_option("--y", o.y);
  }
  {
    auto* c = leaf(gr, "reflectionless", "max |Re g(lambda+i0)| on sampled band points", greens_reflectionless);
    with_set(c);
    with_div(c);
    c->add_option("--samples", o.samples);
    c->add_option("--eps", o.eps, "Also report the value at lambda + i eps");
  }

  auto* cb = app.add_subcommand("comb", "Comb maps");
  cb->require_subcommand(1);
  for (auto [name, desc, fn] : {std::tuple{"critical", "Critical points and slit data", comb_critical},
                                std::tuple{"theta", "Theta at points", comb_theta},
                                std::tuple{"widom", "Sum of slit heights", comb_widom},
                                std::tuple{"phi-map", "Expansion map onto a subset of slits", comb_phi_map}}) {
    auto* c = leaf(cb, name, desc, fn);
    with_set(c);
    c->add_option("--tol", o.tol, "Critical point tolerance");
    if (std::string(name) == "theta") {
      c->add_option("--z", o.z, "re,im (repeatable)");
      c->add_option("--grid", o.grid, "Real grid");
    }
    if (std::string(name) == "phi-map") {
      c->add_option("--subset", o.subset, "1-based gap indices, comma separated");
      c->add_option("--x", o.z, "Points of E to map (repeatable)");
    }
  }

  auto* dj = app.add_subcommand("denjoy", "Accumulating interval construction");
  dj->require_subcommand(1);
  with_denjoy(leaf(dj, "build", "Build the interval system", denjoy_build));
  {
    auto* c = leaf(dj, "condition-c", "Condition (c) by stage", denjoy_condition_c);
    with_denjoy(c);
    c->add_option("--n-max", o.n_max, "Last stage");
  }
  with_denjoy(leaf(dj, "pointmass", "Point mass of r0 at 0", denjoy_pointmass));
  {
    auto* c = leaf(dj, "gl-phi", "Gelfand-Levitan input Phi on an x grid", denjoy_gl_phi);
    with_denjoy(c);
    c->add_option("--x-grid", o.x_grid, "start:stop:step (default 0:5:0.01)");
    c->add_option("--truncN", o.truncN, "Gaps used (default N)");
    c->add_option("--R", o.R, "Tail start (default max(4 b1, a1 + 1))");
    c->add_option("--K", o.K, "Tail series order");
    c->add_option("--tol", o.tol, "Relative quadrature tolerance");
  }

  {
    auto* c = app.add_subcommand("verify", "Run an acceptance suite (or all)");
    common(c);
    c->add_option("suite", o.suite, "Suite name or all")->required();
    c->callback([&action] { action = verify; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    action(o);
  } catch (const AssertionFailed& e) {
    std::fprintf(stderr, "assertion failed: %s\n", e.what.c_str());
    return 1;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const nlohmann::ordered_json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
  return 0;
}
