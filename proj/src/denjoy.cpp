#include "gapspec/denjoy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "gapspec/errors.hpp"
#include "gapspec/greens.hpp"
#include "gapspec/special.hpp"
#include "segment.hpp"

namespace gapspec::denjoy {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Below this the next band edge is too close to underflow for the kernels.
constexpr double kTinyEdge = 1e-280;

void check_rule(const EllRule& ell, int N) {
  if (ell.kind == EllRule::Kind::List && N > ell.length())
    throw ConfigError("ell list has " + std::to_string(ell.length()) + " terms, depth " + std::to_string(N) +
                      " requested");
  if (ell.kind == EllRule::Kind::Geometric && !(ell.q > 0 && ell.q < 1))
    throw InvariantViolation("geometric ell rule needs q in (0,1) for a finite sum");
  if (ell.kind == EllRule::Kind::Power && !(ell.r > 1))
    throw InvariantViolation("power ell rule needs r > 1 for a finite sum");
}

// int_0^B sin(sqrt(lambda) x) dlambda = (2/x^2)(sin t - t cos t), t = sqrt(B) x.
double free_sine_integral(double B, double x) {
  const double t = std::sqrt(B) * x;
  if (t < 0.5) {
    // sin t - t cos t = sum_{n>=1} (-1)^(n+1) 2n t^(2n+1)/(2n+1)!
    double term = t, sum = 0, t2 = t * t;
    for (int n = 1; n <= 12; ++n) {
      term *= t2 / ((2.0 * n) * (2.0 * n + 1));
      sum += (n % 2 ? 1.0 : -1.0) * 2.0 * n * term;
    }
    return 2.0 * sum / (x * x);
  }
  return 2.0 * (std::sin(t) - t * std::cos(t)) / (x * x);
}

}  // namespace

double symmetric_interval(double b_prev, double b_next) {
  if (!(b_next > 0 && b_prev > 0 && b_next < 0.5 * b_prev))
    throw DomainError("symmetric interval needs 0 < b_next < b_prev/2");
  return 1.0 / (1.0 / b_next - 1.0 / b_prev);
}

DenjoySet build(const DenjoyParams& p) {
  if (!(p.b1 > 0) || !std::isfinite(p.b1)) throw ConfigError("b1 must be positive");
  if (p.N < 0) throw ConfigError("truncation depth must be >= 0");
  check_rule(p.ell, p.N);
  DenjoySet ds;
  ds.params = p;
  ds.b_.push_back(p.b1);
  for (int n = 1; n <= p.N; ++n) {
    const double l = p.ell(n);
    if (!(l > 0 && l < 0.5))
      throw InvariantViolation("l_" + std::to_string(n) + " = " + std::to_string(l) + " outside (0, 1/2)");
    const double bn = ds.b_.back();
    const double bnext = l * bn;
    ds.ell_.push_back(l);
    ds.b_.push_back(bnext);
    ds.a_.push_back(bnext / (1.0 - l));
    ds.band_.push_back(bnext * l / (1.0 - l));
    ds.gap_.push_back(bn * (1.0 - 2.0 * l) / (1.0 - l));
  }
  // The closed-form rules decrease, so l_1 < 1/2 covers every later term.
  if (p.ell.kind != EllRule::Kind::List) {
    const double l1 = p.ell(1);
    if (!(l1 > 0 && l1 < 0.5)) throw InvariantViolation("l_1 outside (0, 1/2)");
  }
  ds.ell_sum = p.ell.sum();
  if (!std::isfinite(ds.ell_sum)) throw InvariantViolation("sum of l_n is not finite");

  int listed = 0;
  for (int n = 1; n <= p.N; ++n) {
    const double a = ds.a(n), b = ds.b(n), bn = ds.b(n + 1);
    if (!(a < b && bn < a && bn > kTinyEdge)) break;
    listed = n;
  }
  ds.listed = listed;

  GapSet& s = ds.set;
  s.E0 = 0;
  for (int n = listed; n >= 1; --n) s.gaps.push_back({ds.a(n), ds.b(n)});
  const bool exhausted = p.ell.kind == EllRule::Kind::List && listed >= p.ell.length();
  if (!exhausted && ds.b(listed + 1) > 0) {
    DenjoyTail t;
    t.b1 = p.b1;
    t.ell = p.ell;
    t.first_index = listed + 1;
    t.b_first = ds.b(listed + 1);
    s.tail = t;
  }
  return ds;
}

GapSet truncation(const DenjoySet& ds, int N) {
  if (N < 0 || N > ds.N()) throw ConfigError("truncation depth outside 0.." + std::to_string(ds.N()));
  GapSet s = finite_truncation(ds, N);
  if (N > ds.listed && ds.b(ds.listed + 1) > 0) {
    DenjoyTail t;
    t.b1 = ds.params.b1;
    t.ell.kind = EllRule::Kind::List;
    t.ell.values.assign(ds.ell_.begin(), ds.ell_.begin() + N);
    t.first_index = ds.listed + 1;
    t.b_first = ds.b(ds.listed + 1);
    s.tail = t;
  }
  return s;
}

GapSet finite_truncation(const DenjoySet& ds, int N) {
  if (N < 0) throw ConfigError("truncation depth must be >= 0");
  const int m = std::min(N, ds.listed);
  GapSet s;
  s.E0 = 0;
  for (int n = m; n >= 1; --n) s.gaps.push_back({ds.a(n), ds.b(n)});
  return s;
}

GapSet stage_set(const DenjoySet& ds, int n) {
  if (n < 1 || n > ds.listed + 1 || n > ds.N() + 1)
    throw ConfigError("stage index " + std::to_string(n) + " outside the resolvable range");
  GapSet s;
  s.E0 = ds.b(n);
  for (int j = n - 1; j >= 1; --j) s.gaps.push_back({ds.a(j), ds.b(j)});
  return s;
}

double RecursionCheck::worst() const { return std::max({recursion, symmetric, ratio}); }

RecursionCheck check_recursion(const DenjoySet& ds) {
  RecursionCheck r;
  for (int n = 1; n <= ds.N(); ++n) {
    const double bn = ds.b(n), bnext = ds.b(n + 1), a = ds.a(n), l = ds.ell(n);
    if (!(bnext > std::numeric_limits<double>::min())) break;
    r.recursion = std::max(r.recursion, std::fabs(bnext - l * bn) / bnext);
    // 1/b_{n+1} - 1/a_n = (a_n - b_{n+1})/(b_{n+1} a_n). The difference of
    // reciprocals cancels about log10(1/l_n) digits, so the band length
    // enters in closed form.
    r.symmetric = std::max(r.symmetric, std::fabs(ds.band(n) / bnext / a * bn - 1.0));
    r.ratio = std::max(r.ratio, std::fabs(bnext / a - (1.0 - l)));
  }
  for (int n = 1; n <= ds.listed; ++n) {
    if (!(ds.b(n + 1) < ds.a(n) && ds.a(n) < ds.b(n))) r.ordered = false;
  }
  return r;
}

double omega_zero(const DenjoySet& ds, int n, const comb::SolveOptions& opt) {
  GapSet En = stage_set(ds, n);
  CombData cd = comb::solve_critical_points(En, opt);
  return comb::omega_at(En, cd, cplx(0.0, 0.0), opt.quad);
}

ConditionC check_condition_c(const DenjoySet& ds, int n, int grid, const comb::SolveOptions& opt) {
  ConditionC r;
  r.n = n;
  if (n <= 0) return r;
  if (n > ds.listed) throw ConfigError("condition (c) needs gap " + std::to_string(n) + " to be resolvable");
  if (grid < 2) throw ConfigError("condition (c) grid needs at least 2 points");
  GapSet En = stage_set(ds, n);
  CombData cd = comb::solve_critical_points(En, opt);
  r.omega0 = comb::omega_at(En, cd, cplx(0.0, 0.0), opt.quad);
  const double lo = ds.b(n + 1), hi = ds.a(n);
  r.inf_omega = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    double x = i + 1 == grid ? hi : lo + (hi - lo) * i / (grid - 1);
    double w = comb::omega_at(En, cd, cplx(x, 0.0), opt.quad);
    if (w < r.inf_omega) {
      r.inf_omega = w;
      r.witness = x;
    }
  }
  r.margin = r.inf_omega - 0.5 * r.omega0;
  r.holds = r.margin >= 0;
  return r;
}

cplx r0_eval(const DenjoySet& ds, cplx z, int truncN) {
  GapSet s = finite_truncation(ds, truncN);
  return greens::g_eval(s, greens::upper_edge_divisor(s), z);
}

cplx minus_inverse_g(const DenjoySet& ds, cplx z, int truncN) { return -1.0 / r0_eval(ds, z, truncN); }

ProductBound lower_bound(double b1, const EllRule& ell, double rel_tol) {
  if (!(b1 > 0)) throw ConfigError("b1 must be positive");
  ProductBound pb;
  double logp = 0;
  const int cap = ell.kind == EllRule::Kind::List ? ell.length() : 100000;
  int j = 1;
  for (; j <= cap; ++j) {
    const double l = ell(j);
    if (!(l > 0 && l < 0.5)) throw InvariantViolation("l_" + std::to_string(j) + " outside (0, 1/2)");
    logp += 0.5 * std::log1p(-l);
    // -log(1 - l)/2 <= l for l <= 1/2, so the omitted factors are bounded by
    // the remaining sum of l.
    double rest = 0;
    switch (ell.kind) {
      case EllRule::Kind::List:
        rest = j < cap ? std::numeric_limits<double>::infinity() : 0.0;
        break;
      case EllRule::Kind::Geometric:
        rest = ell(j + 1) / (1.0 - ell.q);
        break;
      case EllRule::Kind::Power:
        rest = ell(j + 1) / (1.0 - 1.0 / ell.r);
        break;
    }
    pb.tail_bound = rest;
    if (rest < rel_tol) break;
  }
  pb.terms = std::min(j, cap);
  if (!(pb.tail_bound < rel_tol)) throw NumericError("lower bound product did not converge", pb.tail_bound);
  pb.value = 0.5 * std::sqrt(b1) * std::exp(logp);
  return pb;
}

double partial_bound(const DenjoySet& ds, int N, double z) {
  if (!(z < 0)) throw DomainError("partial bound needs z < 0");
  double logp = 0;
  for (int j = 1; j <= std::min(N, ds.N()); ++j) logp += 0.5 * std::log1p(-ds.ell(j));
  return 0.5 * std::exp(logp) * std::sqrt(ds.params.b1 - z);
}

std::vector<double> default_z_schedule() {
  std::vector<double> z;
  for (int k = 2; k <= 6; ++k) z.push_back(-std::pow(10.0, -k));
  return z;
}

PointMassResult point_mass_limit(const DenjoySet& ds, std::span<const double> z, std::vector<int> truncN) {
  PointMassResult r;
  r.z = z.empty() ? default_z_schedule() : std::vector<double>(z.begin(), z.end());
  for (double v : r.z)
    if (!(v < 0)) throw ConfigError("point-mass schedule needs z < 0");
  std::sort(r.z.begin(), r.z.end());
  if (r.z.size() < 2) throw NumericError("z schedule too short for extrapolation", static_cast<double>(r.z.size()));
  const int top = std::min(ds.N(), ds.listed);
  if (truncN.empty()) truncN = {std::max(top / 2, std::min(top, 1)), top};
  for (int& n : truncN) n = std::min(n, top);
  std::sort(truncN.begin(), truncN.end());
  truncN.erase(std::unique(truncN.begin(), truncN.end()), truncN.end());
  r.truncN = truncN;

  for (double zk : r.z) r.values.push_back(-zk * r0_eval(ds, cplx(zk, 0.0), truncN.back()).real());
  r.estimate = r.values.back();
  r.error = std::fabs(r.values.back() - r.values[r.values.size() - 2]);
  for (int n : truncN) {
    double v = -r.z.back() * r0_eval(ds, cplx(r.z.back(), 0.0), n).real();
    r.truncation_gap = std::max(r.truncation_gap, std::fabs(v - r.estimate));
  }
  if (!std::isfinite(r.estimate)) throw NumericError("point-mass estimate is not finite", r.estimate);
  r.bound = lower_bound(ds.params.b1, ds.params.ell, 1e-12);
  r.ratio = r.estimate / r.bound.value;
  r.pass = r.estimate >= 0.99 * r.bound.value;
  return r;
}

GlPhiValue gl_phi(const GapSet& s, double x, const GlPhiOptions& opt) {
  if (s.tail) throw ConfigError("Phi needs a finite gap list; truncate the tail first");
  if (s.cap) throw ConfigError("Phi is defined for half-line sets");
  sets::require_valid(s);
  if (s.E0 < 0) throw ConfigError("Phi needs E0 >= 0");
  if (!(x >= 0) || !std::isfinite(x)) throw DomainError("Phi needs x >= 0");
  if (opt.K < 1) throw ConfigError("tail order K must be >= 1");
  const std::size_t n = s.size();
  const double B = n ? s.gaps.back().b : s.E0;
  const double A1 = n ? s.gaps.back().a : s.E0;
  const double R = opt.R > 0 ? opt.R : std::max(4.0 * B, A1 + 1.0);
  if (R < B) throw ConfigError("tail start R must be >= b1");

  GlPhiValue out;
  out.R = R;

  // Tail coefficients in 1/lambda, scaled by R^k.
  const int kmax = opt.K + 200;
  std::vector<double> Lk(kmax + 1, 0.0), ek(kmax + 1, 0.0);
  double rho = 0;
  for (const auto& g : s.gaps) {
    const double al = g.a / R, be = g.b / R;
    rho = std::max(rho, be);
    double pa = 1, pb = 1;
    for (int k = 1; k <= kmax; ++k) {
      pa *= al;
      pb *= be;
      Lk[k] += 0.5 * (pb - pa) / k;
    }
  }
  ek[0] = 1;
  for (int k = 1; k <= kmax; ++k) {
    double acc = 0;
    for (int i = 1; i <= k; ++i) acc += i * Lk[i] * ek[k - i];
    ek[k] = acc / k;
  }
  // |int_R^inf (P - 1 - sum_{k<=K} e_k lambda^-k) sin| <= (R/pi) sum_{k>K} |e~_k|/(k - 1).
  double rem = 0;
  for (int k = opt.K + 1; k <= kmax; ++k) rem += std::fabs(ek[k]) / (k - 1);
  if (rho >= 1) {
    rem = std::numeric_limits<double>::infinity();
  } else {
    rem += std::fabs(ek[kmax]) * rho / (1.0 - rho) / kmax;
  }
  out.tail_bound = R / kPi * rem;
  if (!(out.tail_bound <= opt.tail_tol))
    throw NumericError("tail order K=" + std::to_string(opt.K) + " misses the tail tolerance", out.tail_bound);
  if (x == 0) {
    out.error = out.tail_bound;
    return out;
  }

  detail::Layout L;
  L.E0 = s.E0;
  L.with_e0 = false;
  for (const auto& g : s.gaps) {
    L.a.push_back(g.a);
    L.b.push_back(g.b);
  }
  L.c = L.a;
  double qerr = 0;
  // int_lo^hi (P - minus_one) sin(sqrt(lambda) x) dlambda over a segment inside a band.
  auto band = [&](double lo, double hi, bool minus_one) {
    if (!(hi > lo)) return 0.0;
    detail::Segment seg(L, lo, hi);
    const double len = hi - lo;
    auto f = [&](std::span<const double> th, std::span<double> y) {
      std::array<double, 15> lam, w;
      const std::size_t m = th.size();
      seg.eval(th, std::span<double>(lam.data(), m), std::span<double>(w.data(), m));
      for (std::size_t i = 0; i < m; ++i) {
        double v = minus_one ? w[i] - len * std::sin(2.0 * th[i]) : w[i];
        y[i] = v * std::sin(std::sqrt(lam[i]) * x);
      }
    };
    auto q = integrate_batch<double>(f, 0.0, kHalfPi, opt.quad);
    if (!std::isfinite(q.value)) throw NumericError("Phi band integral is not finite", q.value);
    qerr += q.error;
    return q.value;
  };

  double p1 = 0;
  if (n) {
    p1 += band(s.E0, s.gaps.front().a, false);
    for (std::size_t k = 0; k + 1 < n; ++k) p1 += band(s.gaps[k].b, s.gaps[k + 1].a, false);
  }
  p1 -= free_sine_integral(B, x);
  out.phi1 = p1 / kPi;

  double mid = band(B, R, true) / kPi;

  const double sR = std::sqrt(R) * x;
  std::vector<double> J(2 * opt.K);
  special::sine_tail_integrals(sR, J);
  double tail = 0, sp = 1;  // sp = s^(2k-2)
  for (int k = 1; k <= opt.K; ++k) {
    tail += ek[k] * sp * J[2 * k - 2];
    sp *= sR * sR;
  }
  out.tail = 2.0 * R / kPi * tail;
  out.phi2 = mid + out.tail;
  out.value = out.phi1 + out.phi2;
  out.error = qerr / kPi + out.tail_bound;
  return out;
}

GlPhiValue gl_phi(const DenjoySet& ds, double x, int truncN, const GlPhiOptions& opt) {
  return gl_phi(finite_truncation(ds, truncN), x, opt);
}

}  // namespace denjoy
