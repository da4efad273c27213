#include "gapspec/gapset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gapspec/errors.hpp"

namespace gapspec {

double EllRule::operator()(int n) const {
  if (n < 1) throw ConfigError("ell rule index starts at 1");
  switch (kind) {
    case Kind::List:
      if (n > static_cast<int>(values.size())) throw ConfigError("ell list exhausted at n=" + std::to_string(n));
      return values[n - 1];
    case Kind::Geometric:
      return l1 * std::pow(q, n - 1);
    case Kind::Power:
      return c * std::pow(r, -n);
  }
  return 0;
}

double EllRule::sum() const {
  switch (kind) {
    case Kind::List: {
      double s = 0;
      for (double v : values) s += v;
      return s;
    }
    case Kind::Geometric:
      return q < 1 ? l1 / (1 - q) : std::numeric_limits<double>::infinity();
    case Kind::Power:
      return r > 1 ? c / (r - 1) : std::numeric_limits<double>::infinity();
  }
  return 0;
}

std::string EllRule::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::List:
      os << "list:";
      for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i];
      break;
    case Kind::Geometric:
      os << "geometric:" << l1 << "," << q;
      break;
    case Kind::Power:
      os << "power:" << c << "," << r;
      break;
  }
  return os.str();
}

double DenjoyTail::gap_length_sum() const {
  double s = 0;
  for_each_gap(0.0, [&](int, Gap g) { s += g.length(); });
  return s;
}

namespace sets {

std::vector<Violation> validate(const GapSet& s) {
  std::vector<Violation> v;
  if (!std::isfinite(s.E0)) v.push_back({-1, "E0 not finite"});
  for (std::size_t j = 0; j < s.gaps.size(); ++j) {
    const int idx = static_cast<int>(j) + 1;
    const Gap& g = s.gaps[j];
    if (!std::isfinite(g.a) || !std::isfinite(g.b)) {
      v.push_back({idx, "non-finite edge at j=" + std::to_string(idx)});
      continue;
    }
    if (!(g.a < g.b)) v.push_back({idx, "a>=b at j=" + std::to_string(idx)});
    if (!(g.a > s.E0)) v.push_back({idx, "gap below E0 at j=" + std::to_string(idx)});
    if (j > 0 && !(s.gaps[j - 1].b < g.a))
      v.push_back({idx, "gaps overlap or unsorted at j=" + std::to_string(idx)});
  }
  if (s.cap) {
    double top = s.gaps.empty() ? s.E0 : s.gaps.back().b;
    if (!(*s.cap > top)) v.push_back({-1, "cap not above the last gap"});
  }
  if (s.tail) {
    const auto& t = *s.tail;
    if (!(t.b_first > 0)) v.push_back({-1, "tail start must be positive"});
    if (!(s.E0 <= t.accumulation_point())) v.push_back({-1, "tail accumulates below E0"});
    if (!s.gaps.empty() && !(t.b_first < s.gaps.front().a))
      v.push_back({-1, "tail overlaps the listed gaps"});
    int checked = 0;
    t.for_each_gap(0.0, [&](int n, Gap) {
      if (checked++ > 64) return;
      double l = t.ell(n);
      if (!(l > 0 && l < 0.5)) v.push_back({n, "ell outside (0,1/2) at n=" + std::to_string(n)});
    });
    if (!std::isfinite(t.ell.sum())) v.push_back({-1, "ell rule not summable"});
  }
  return v;
}

void require_valid(const GapSet& s) {
  auto v = validate(s);
  if (v.empty()) return;
  std::string msg = "invalid gap set:";
  for (const auto& x : v) msg += " " + x.message + ";";
  throw InvariantViolation(msg);
}

double gap_length(const GapSet& s) {
  double sum = 0;
  for (const auto& g : s.gaps) sum += g.length();
  if (s.tail) sum += s.tail->gap_length_sum();
  return sum;
}

bool contains(const GapSet& s, double lambda) {
  constexpr double slack = 1e-12;
  if (lambda < s.E0 - slack) return false;
  if (s.cap && lambda > *s.cap + slack) return false;
  for (const auto& g : s.gaps)
    if (lambda > g.a + slack && lambda < g.b - slack) return false;
  if (s.tail && lambda > 0) {
    bool inside = false;
    s.tail->for_each_gap(0.25 * lambda, [&](int, Gap g) {
      if (lambda > g.a + slack && lambda < g.b - slack) inside = true;
    });
    if (inside) return false;
  }
  return true;
}

double measure_in(const GapSet& s, double lo, double hi) {
  double l = std::max(lo, s.E0);
  double h = s.cap ? std::min(hi, *s.cap) : hi;
  if (!(h > l)) return 0.0;
  double m = h - l;
  auto cut = [&](Gap g) { m -= std::max(0.0, std::min(g.b, h) - std::max(g.a, l)); };
  for (const auto& g : s.gaps) cut(g);
  if (s.tail) s.tail->for_each_gap(std::max(l, 0.0), [&](int, Gap g) { cut(g); });
  return std::max(m, 0.0);
}

double carleson_ratio(const GapSet& s, double lambda, double delta) {
  if (!(delta > 0)) throw DomainError("carleson_ratio needs delta > 0");
  if (!contains(s, lambda)) throw DomainError("carleson_ratio: lambda not in E");
  return measure_in(s, lambda - delta, lambda + delta) / delta;
}

namespace {

// Lengths of listed gaps and of bounded bands between listed edges. The band
// under the lowest listed gap only counts when no tail lives there.
double min_feature(const GapSet& s) {
  double f = std::numeric_limits<double>::infinity();
  double prev = s.E0;
  for (std::size_t j = 0; j < s.gaps.size(); ++j) {
    const auto& g = s.gaps[j];
    if (j > 0 || !s.tail) f = std::min(f, g.a - prev);
    f = std::min(f, g.length());
    prev = g.b;
  }
  if (s.cap) f = std::min(f, *s.cap - prev);
  if (!std::isfinite(f)) f = 1.0;
  return f;
}

}  // namespace

std::vector<double> default_lambda_grid(const GapSet& s) {
  std::vector<double> g{s.E0};
  double prev = s.E0;
  for (std::size_t j = 0; j < s.gaps.size(); ++j) {
    const auto& gap = s.gaps[j];
    if (j > 0 || !s.tail) g.push_back(0.5 * (prev + gap.a));
    g.push_back(gap.a);
    g.push_back(gap.b);
    prev = gap.b;
  }
  const double f = min_feature(s);
  if (s.cap) {
    g.push_back(0.5 * (prev + *s.cap));
    g.push_back(*s.cap);
  } else {
    for (int k = 1; k <= 3; ++k) g.push_back(prev + k * f);
  }
  if (s.tail) g.push_back(s.tail->accumulation_point());
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

std::vector<double> default_delta_grid(const GapSet& s) {
  const double f = min_feature(s);
  std::vector<double> d;
  const int n = 16;
  for (int k = 0; k < n; ++k) d.push_back(f * std::pow(10.0, -3.0 * (n - 1 - k) / (n - 1)));
  if (s.tail) {
    // Scales set by the accumulation: distances from it to each right edge.
    const double acc = s.tail->accumulation_point();
    for (const auto& g : s.gaps) d.push_back(g.b - acc);
    s.tail->for_each_gap(0.0, [&](int, Gap g) { d.push_back(g.b - acc); });
  }
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  return d;
}

HomogeneityResult homogeneity_scan(const GapSet& s, const std::vector<double>& lambdas,
                                   const std::vector<double>& deltas) {
  if (lambdas.empty() || deltas.empty()) throw ConfigError("homogeneity scan needs nonempty grids");
  HomogeneityResult r;
  r.inf_ratio = std::numeric_limits<double>::infinity();
  for (double l : lambdas) {
    if (!contains(s, l)) continue;
    for (double d : deltas) {
      if (!(d > 0)) continue;
      double v = measure_in(s, l - d, l + d) / d;
      ++r.evaluated;
      if (v < r.inf_ratio) {
        r.inf_ratio = v;
        r.witness_lambda = l;
        r.witness_delta = d;
      }
    }
  }
  if (r.evaluated == 0) throw ConfigError("homogeneity scan: no grid point lies in E");
  return r;
}

HomogeneityResult homogeneity_scan(const GapSet& s) {
  return homogeneity_scan(s, default_lambda_grid(s), default_delta_grid(s));
}

Compactified compactify(const GapSet& s, double lambda0) {
  if (!(lambda0 < s.E0)) throw DomainError("compactify needs lambda0 < E0");
  if (s.tail) throw ConfigError("compactify works on finite gap lists; truncate the tail first");
  if (s.cap) throw ConfigError("set is already compact");
  Compactified c;
  c.lambda0 = lambda0;
  c.set.E0 = 1.0 / (lambda0 - s.E0);
  for (const auto& g : s.gaps) c.set.gaps.push_back({1.0 / (lambda0 - g.a), 1.0 / (lambda0 - g.b)});
  c.set.cap = 0.0;
  return c;
}

SpectralMeasure pullback_measure(const SpectralMeasure& mu, double lambda0) {
  SpectralMeasure out;
  for (const auto& p : mu.pp) {
    if (p.loc == lambda0) throw DomainError("point mass at the compactification point");
    double d = lambda0 - p.loc;
    out.pp.push_back({1.0 / d, p.weight / (d * d)});
  }
  for (const auto& p : mu.ac) {
    if (p.l < lambda0 && lambda0 < p.u) throw DomainError("a.c. piece straddles the compactification point");
    if (p.u == lambda0 || p.l == lambda0)
      throw DomainError("a.c. piece touches the compactification point");
    AcPiece q = p;
    q.l = 1.0 / (lambda0 - p.l);
    q.u = 1.0 / (lambda0 - p.u);
    auto rho = p.density;
    q.density = [rho, lambda0](double eta) { return rho(lambda0 - 1.0 / eta); };
    q.form = "pullback(" + p.form + ")";
    out.ac.push_back(std::move(q));
  }
  std::sort(out.ac.begin(), out.ac.end(), [](const AcPiece& x, const AcPiece& y) { return x.l < y.l; });
  std::sort(out.pp.begin(), out.pp.end(), [](const PointMass& x, const PointMass& y) { return x.loc < y.loc; });
  return out;
}

FiniteSetDescription essential_closure(const FiniteSetDescription& d) {
  std::vector<std::pair<double, double>> iv;
  for (auto [l, u] : d.intervals)
    if (u > l) iv.push_back({l, u});
  std::sort(iv.begin(), iv.end());
  FiniteSetDescription out;
  for (auto [l, u] : iv) {
    if (!out.intervals.empty() && l <= out.intervals.back().second)
      out.intervals.back().second = std::max(out.intervals.back().second, u);
    else
      out.intervals.push_back({l, u});
  }
  return out;
}

}  // namespace sets
}  // namespace gapspec
