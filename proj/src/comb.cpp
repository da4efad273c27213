#include "gapspec/comb.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "gapspec/errors.hpp"
#include "gapspec/greens.hpp"
#include "gapspec/kernels.hpp"
#include "segment.hpp"

namespace gapspec::comb {

namespace {

using detail::Layout;
using detail::Segment;


Layout make_layout(const GapSet& s, std::span<const double> c) {
  Layout L;
  L.E0 = s.E0;
  for (const auto& g : s.gaps) {
    L.a.push_back(g.a);
    L.b.push_back(g.b);
  }
  L.c.assign(c.begin(), c.end());
  return L;
}

void require_finite(const GapSet& s) {
  if (s.tail) throw ConfigError("comb maps need a finite gap list; truncate the tail first");
  if (s.cap) throw ConfigError("comb maps are defined for half-line sets");
  sets::require_valid(s);
}

// int_lo^hi |m(lambda)| dlambda over a segment free of band edges in its interior.
Quad<double> abs_m(const Layout& L, double lo, double hi, const QuadOptions& q) {
  if (!(hi > lo)) return {};
  Segment seg(L, lo, hi);
  auto f = [&](std::span<const double> th, std::span<double> out) {
    std::array<double, 15> lam;
    seg.eval(th, std::span<double>(lam.data(), th.size()), out);
  };
  return integrate_batch<double>(f, 0.0, kHalfPi, q);
}

struct GapMoments {
  double D = 0;                // int Q_j
  double F = 0;                // int (lambda - c_j) Q_j
  Eigen::VectorXd cross;       // int (lambda - c_j) Q_j/(lambda - c_k), zero at k = j
  double error = 0;
};

GapMoments gap_moments(const Layout& L, std::size_t j, const QuadOptions& q) {
  const std::size_t n = L.n();
  Segment seg(L, L.a[j], L.b[j], static_cast<int>(j));
  const double cj = L.c[j];
  auto f = [&](std::span<const double> th, std::span<Eigen::VectorXd> out) {
    std::array<double, 15> lam, w;
    const std::size_t m = th.size();
    seg.eval(th, std::span<double>(lam.data(), m), std::span<double>(w.data(), m));
    for (std::size_t i = 0; i < m; ++i) {
      Eigen::VectorXd v(n + 2);
      double t = (lam[i] - cj) * w[i];
      v[0] = w[i];
      v[1] = t;
      for (std::size_t k = 0; k < n; ++k) v[2 + k] = k == j ? 0.0 : t / (lam[i] - L.c[k]);
      out[i] = std::move(v);
    }
  };
  auto r = integrate_batch<Eigen::VectorXd>(f, 0.0, kHalfPi, q);
  GapMoments g;
  g.D = r.value[0];
  g.F = r.value[1];
  g.cross = r.value.tail(n);
  g.error = r.error;
  return g;
}

struct Residual {
  std::vector<GapMoments> mom;
  double scaled = 0;  // max_j |F_j| / (D_j L_j)
  double raw = 0;     // max_j |F_j|
};

Residual residual(const Layout& L, const QuadOptions& q) {
  Residual r;
  for (std::size_t j = 0; j < L.n(); ++j) {
    r.mom.push_back(gap_moments(L, j, q));
    const auto& g = r.mom.back();
    double sc = std::fabs(g.F) / (g.D * (L.b[j] - L.a[j]));
    if (!std::isfinite(sc) || !std::isfinite(g.F))
      throw NumericError("gap integral not finite at j=" + std::to_string(j + 1), sc);
    r.scaled = std::max(r.scaled, sc);
    r.raw = std::max(r.raw, std::fabs(g.F));
  }
  return r;
}

bool inside(const Layout& L, const std::vector<double>& c) {
  for (std::size_t j = 0; j < L.n(); ++j)
    if (!(c[j] > L.a[j] && c[j] < L.b[j])) return false;
  return true;
}

// Band k runs from lo_k (E0 or b_{k-1}) to hi_k (a_k, or +inf for k = n).
double band_lo(const Layout& L, std::size_t k) { return k == 0 ? L.E0 : L.b[k - 1]; }
double band_hi(const Layout& L, std::size_t k) {
  return k < L.n() ? L.a[k] : std::numeric_limits<double>::infinity();
}
// Theta at the lower end of band k.
double band_base(const CombData& cd, std::size_t k) { return k == 0 ? 0.0 : cd.u[k - 1]; }

void check_comb(const GapSet& s, const CombData& cd) {
  if (cd.c.size() != s.gaps.size() || cd.u.size() != s.gaps.size() || cd.h.size() != s.gaps.size())
    throw ConfigError("comb data does not match the gap count");
  if (cd.E0 != s.E0) throw ConfigError("comb data was solved for a different E0");
}

// Theta on the real axis, approached from the upper half-plane.
cplx theta_real(const Layout& L, const CombData& cd, double x, const QuadOptions& q) {
  if (x <= L.E0) return {0.0, abs_m(L, x, L.E0, q).value};
  for (std::size_t j = 0; j < L.n(); ++j) {
    if (x < L.a[j]) break;
    if (x > L.b[j]) continue;
    if (x == L.a[j] || x == L.b[j]) return {cd.u[j], 0.0};
    double im = x <= L.c[j] ? abs_m(L, L.a[j], x, q).value : abs_m(L, x, L.b[j], q).value;
    return {cd.u[j], im};
  }
  std::size_t k = 0;
  while (k < L.n() && x > L.a[k]) ++k;
  const double lo = band_lo(L, k), hi = band_hi(L, k);
  if (std::isfinite(hi) && x - lo > hi - x) return {cd.u[k] - abs_m(L, x, hi, q).value, 0.0};
  return {band_base(cd, k) + abs_m(L, lo, x, q).value, 0.0};
}

double abs_m_point(const Layout& L, double y) {
  double p = 1.0 / (2.0 * std::sqrt(std::fabs(y - L.E0)));
  for (std::size_t k = 0; k < L.n(); ++k)
    p *= std::fabs(y - L.c[k]) / (std::sqrt(std::fabs(y - L.a[k])) * std::sqrt(std::fabs(y - L.b[k])));
  return p;
}

// int_0^y m(x + i t) dt with t = y s^2.
cplx vertical_leg(const Layout& L, double x, double y, const QuadOptions& q) {
  kernels::GapView view{L.a, L.b, L.c};
  auto f = [&](std::span<const double> s, std::span<cplx> out) {
    std::array<cplx, 15> z, p;
    const std::size_t m = s.size();
    for (std::size_t i = 0; i < m; ++i) z[i] = {x, y * s[i] * s[i]};
    kernels::upper_ratio_product(std::span<const cplx>(z.data(), m), view, std::span<cplx>(p.data(), m));
    for (std::size_t i = 0; i < m; ++i) {
      cplx mz = cplx(0, 1) / (2.0 * std::sqrt(z[i] - L.E0)) * p[i];
      out[i] = mz * (2.0 * y * s[i]);
    }
  };
  return integrate_batch<cplx>(f, 0.0, 1.0, q).value;
}

}  // namespace

cplx m_comb_eval(const GapSet& s, std::span<const double> c, cplx z) {
  DirichletDivisor d;
  d.mu.assign(c.begin(), c.end());
  return greens::g_eval(s, d, z);
}

CombData solve_critical_points(const GapSet& s, const SolveOptions& opt) {
  require_finite(s);
  const std::size_t n = s.gaps.size();
  CombData cd;
  cd.E0 = s.E0;
  if (n == 0) return cd;

  std::vector<double> c;
  if (!opt.initial.empty()) {
    if (opt.initial.size() != n) throw ConfigError("initial critical points do not match the gap count");
    c = opt.initial;
  } else {
    for (const auto& g : s.gaps) c.push_back(0.5 * (g.a + g.b));
  }
  Layout L = make_layout(s, c);
  if (!inside(L, c)) throw ConfigError("initial critical points must lie inside their gaps");

  Residual r = residual(L, opt.quad);
  int it = 0;
  for (; it < opt.max_iter && r.scaled > opt.tol; ++it) {
    Eigen::MatrixXd J(n, n);
    Eigen::VectorXd F(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto& g = r.mom[j];
      const double scale = 1.0 / (g.D * (L.b[j] - L.a[j]));
      F[j] = g.F * scale;
      for (std::size_t k = 0; k < n; ++k) J(j, k) = -(k == j ? g.D : g.cross[k]) * scale;
    }
    Eigen::VectorXd delta = J.partialPivLu().solve(-F);

    bool accepted = false;
    double t = 1.0;
    for (int half = 0; half < 10 && delta.allFinite(); ++half, t *= 0.5) {
      std::vector<double> trial(n);
      for (std::size_t j = 0; j < n; ++j) trial[j] = c[j] + t * delta[j];
      if (!inside(L, trial)) continue;
      Layout LT = L;
      LT.c = trial;
      Residual rt = residual(LT, opt.quad);
      if (rt.scaled < r.scaled) {
        c = std::move(trial);
        L = std::move(LT);
        r = std::move(rt);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Exact one-dimensional update per gap: F_j is affine in c_j with the
      // others frozen, and its root is a Q_j-weighted mean of the gap.
      for (std::size_t j = 0; j < n; ++j) c[j] += r.mom[j].F / r.mom[j].D;
      L.c = c;
      Residual rt = residual(L, opt.quad);
      if (!(rt.scaled < r.scaled)) {
        r = std::move(rt);
        ++it;
        break;
      }
      r = std::move(rt);
    }
  }
  if (!(r.scaled <= opt.tol))
    throw NumericError("critical point solve stalled after " + std::to_string(it) + " iterations", r.scaled);

  cd.c = c;
  cd.iterations = it;
  cd.residual = r.raw;
  for (std::size_t j = 0; j < n; ++j) {
    auto hq = abs_m(L, c[j], L.b[j], opt.quad);
    cd.h.push_back(hq.value);
    cd.h_error.push_back(hq.error);
  }
  double acc = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double v = abs_m(L, band_lo(L, k), band_hi(L, k), opt.quad).value;
    cd.band.push_back(v);
    acc += v;
    cd.u.push_back(acc);
  }
  return cd;
}

cplx theta_eval(const GapSet& s, const CombData& cd, cplx z, const QuadOptions& q) {
  require_finite(s);
  check_comb(s, cd);
  if (z.imag() < 0) throw DomainError("Theta is evaluated on the closed upper half-plane");
  Layout L = make_layout(s, cd.c);
  cplx t = theta_real(L, cd, z.real(), q);
  if (z.imag() > 0) t += vertical_leg(L, z.real(), z.imag(), q);
  return t;
}

double omega_at(const GapSet& s, const CombData& cd, cplx z, const QuadOptions& q) {
  return theta_eval(s, cd, z, q).imag();
}

double widom_sum(const CombData& cd) {
  double sum = 0;
  for (double v : cd.h) sum += v;
  return sum;
}

SplitIntegrals split_integrals(const GapSet& s, const CombData& cd, std::size_t j, const QuadOptions& q) {
  require_finite(s);
  check_comb(s, cd);
  if (j >= s.gaps.size()) throw ConfigError("gap index out of range");
  Layout L = make_layout(s, cd.c);
  return {-abs_m(L, L.a[j], L.c[j], q).value, abs_m(L, L.c[j], L.b[j], q).value};
}

double theta_inverse(const GapSet& s, const CombData& cd, double t, int side) {
  require_finite(s);
  check_comb(s, cd);
  if (!(t >= 0)) throw DomainError("Theta maps E onto [0, inf)");
  Layout L = make_layout(s, cd.c);
  const std::size_t n = L.n();
  if (t == 0) return L.E0;
  // Band k covers Theta values [base_k, u_k].
  std::size_t k = 0;
  while (k < n && t > cd.u[k]) ++k;
  if (k < n && t == cd.u[k]) {
    if (side < 0) return L.a[k];
    if (side > 0) return L.b[k];
    throw DomainError("Theta value is a slit base; the preimage is a gap edge pair");
  }
  const double base = band_base(cd, k);
  const double lo = band_lo(L, k);
  double hi = band_hi(L, k);
  const QuadOptions q = kCombQuad;
  auto value = [&](double y) {
    if (std::isfinite(hi) && y - lo > hi - y) return cd.u[k] - abs_m(L, y, hi, q).value;
    return base + abs_m(L, lo, y, q).value;
  };
  auto slope = [&](double y) { return abs_m_point(L, y); };
  double top = hi;
  if (!std::isfinite(top)) {
    double step = std::max(1.0, (t - base) * (t - base));
    top = lo + step;
    while (value(top) < t) top = lo + (top - lo) * 2.0;
  }
  double a = lo, b = top;
  // Linear guess in Theta, then safeguarded Newton.
  double y = lo + (top - lo) * std::clamp((t - base) / std::max(value(top) - base, 1e-300), 0.0, 1.0);
  if (!(y > a && y < b)) y = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    double f = value(y) - t;
    if (f == 0) return y;
    if (f > 0)
      b = y;
    else
      a = y;
    if (std::fabs(f) <= 1e-14 * std::max(t, 1e-300) || b - a <= 4 * std::numeric_limits<double>::epsilon() * std::fabs(y))
      return y;
    double yn = y;
    double d = slope(y);
    if (d > 0 && std::isfinite(d)) yn = y - f / d;
    if (!(yn > a && yn < b)) yn = 0.5 * (a + b);
    y = yn;
  }
  return y;
}

namespace {

// E^N is parametrized by log multipliers on its band widths and gap lengths,
// listed bottom up as w_0, g_0, w_1, g_1, ...; positive widths keep the edges
// ordered, and derivatives stay well scaled when a band is much narrower than
// its distance from E0.
std::vector<double> base_widths(const GapSet& full, const std::vector<int>& subset) {
  std::vector<double> w;
  double prev = full.E0;
  for (int j : subset) {
    const Gap& g = full.gaps[j];
    w.push_back(g.a - prev);
    w.push_back(g.length());
    prev = g.b;
  }
  return w;
}

GapSet reduced_set(double E0, const std::vector<double>& base, const Eigen::VectorXd& p) {
  GapSet r;
  r.E0 = E0;
  double x = E0;
  for (std::size_t i = 0; i + 1 < base.size(); i += 2) {
    double a = x + base[i] * std::exp(p[i]);
    double b = a + base[i + 1] * std::exp(p[i + 1]);
    r.gaps.push_back({a, b});
    x = b;
  }
  return r;
}

bool ordered(const GapSet& s) {
  double prev = s.E0;
  for (const auto& g : s.gaps) {
    if (!(g.a > prev && g.b > g.a)) return false;
    prev = g.b;
  }
  return true;
}

// Warm start: keep each critical point at the same relative position in its gap.
std::vector<double> carry_c(const GapSet& from, const CombData& cd, const GapSet& to) {
  std::vector<double> c;
  for (std::size_t j = 0; j < to.gaps.size(); ++j) {
    double r = (cd.c[j] - from.gaps[j].a) / from.gaps[j].length();
    c.push_back(to.gaps[j].a + r * to.gaps[j].length());
  }
  return c;
}

}  // namespace

PhiMap::PhiMap(const GapSet& full, std::vector<int> subset, const PhiOptions& opt)
    : full_(full), subset_(std::move(subset)) {
  require_finite(full_);
  std::sort(subset_.begin(), subset_.end());
  subset_.erase(std::unique(subset_.begin(), subset_.end()), subset_.end());
  for (int j : subset_)
    if (j < 0 || j >= static_cast<int>(full_.gaps.size())) throw ConfigError("subset index out of range");
  full_cd_ = solve_critical_points(full_, opt.solve);

  const std::size_t m = subset_.size();
  const std::vector<double> base = base_widths(full_, subset_);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(2 * m);
  reduced_ = reduced_set(full_.E0, base, p);
  if (m == 0) {
    reduced_cd_ = solve_critical_points(reduced_, opt.solve);
    return;
  }

  std::vector<double> c0;
  for (int j : subset_) c0.push_back(full_cd_.c[j]);

  // Relative mismatch of slit bases and heights.
  auto mismatch = [&](const GapSet& r, const std::vector<double>& start, CombData* out) {
    SolveOptions so = opt.solve;
    so.initial = start;
    CombData cd = solve_critical_points(r, so);
    Eigen::VectorXd v(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
      v[2 * i] = cd.u[i] / full_cd_.u[subset_[i]] - 1.0;
      v[2 * i + 1] = cd.h[i] / full_cd_.h[subset_[i]] - 1.0;
    }
    if (out) *out = std::move(cd);
    return v;
  };

  CombData cur;
  Eigen::VectorXd F = mismatch(reduced_, c0, &cur);
  double err = F.lpNorm<Eigen::Infinity>();
  int it = 0;
  for (; it < opt.max_iter && err > opt.tol; ++it) {
    Eigen::MatrixXd J(2 * m, 2 * m);
    for (std::size_t col = 0; col < 2 * m; ++col) {
      Eigen::VectorXd pp = p;
      pp[col] += opt.fd_step;
      GapSet rs = reduced_set(full_.E0, base, pp);
      if (!ordered(rs)) {
        pp[col] = p[col] - opt.fd_step;
        rs = reduced_set(full_.E0, base, pp);
        J.col(col) = (F - mismatch(rs, carry_c(reduced_, cur, rs), nullptr)) / opt.fd_step;
      } else {
        J.col(col) = (mismatch(rs, carry_c(reduced_, cur, rs), nullptr) - F) / opt.fd_step;
      }
    }
    Eigen::VectorXd step = J.colPivHouseholderQr().solve(-F);
    bool accepted = false;
    double t = 1.0;
    for (int half = 0; half < 12 && step.allFinite(); ++half, t *= 0.5) {
      Eigen::VectorXd pt = p + t * step;
      GapSet rs = reduced_set(full_.E0, base, pt);
      if (!ordered(rs)) continue;
      CombData cdt;
      Eigen::VectorXd Ft = mismatch(rs, carry_c(reduced_, cur, rs), &cdt);
      double et = Ft.lpNorm<Eigen::Infinity>();
      if (et < err) {
        p = pt;
        reduced_ = std::move(rs);
        cur = std::move(cdt);
        F = Ft;
        err = et;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  reduced_cd_ = std::move(cur);
  mismatch_ = err;
  iterations_ = it;
  if (!(err <= opt.tol)) throw NumericError("reduced comb did not match the slits", err);
}

double PhiMap::lower_edge_image(int j) const {
  auto pos = std::lower_bound(subset_.begin(), subset_.end(), j);
  if (pos != subset_.end() && *pos == j) return reduced_.gaps[pos - subset_.begin()].a;
  return (*this)(full_.gaps.at(j).a);
}

double PhiMap::upper_edge_image(int j) const {
  auto pos = std::lower_bound(subset_.begin(), subset_.end(), j);
  if (pos != subset_.end() && *pos == j) return reduced_.gaps[pos - subset_.begin()].b;
  return (*this)(full_.gaps.at(j).b);
}

double PhiMap::operator()(double x) const {
  if (x < full_.E0) throw DomainError("phi_N is evaluated on the closure of E");
  for (std::size_t j = 0; j < full_.gaps.size(); ++j) {
    const Gap& g = full_.gaps[j];
    if (x > g.a && x < g.b) throw DomainError("phi_N: x lies inside a gap; only E-side points are supported");
    if (x == g.a || x == g.b) {
      auto pos = std::lower_bound(subset_.begin(), subset_.end(), static_cast<int>(j));
      if (pos != subset_.end() && *pos == static_cast<int>(j)) {
        const Gap& r = reduced_.gaps[pos - subset_.begin()];
        return x == g.a ? r.a : r.b;
      }
      return theta_inverse(reduced_, reduced_cd_, full_cd_.u[j]);
    }
  }
  double t = theta_eval(full_, full_cd_, cplx(x, 0)).real();
  return theta_inverse(reduced_, reduced_cd_, t);
}

}  // namespace gapspec::comb
