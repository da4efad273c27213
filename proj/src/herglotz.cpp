#include "gapspec/herglotz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gapspec/errors.hpp"

namespace gapspec {

namespace {

bool exponent_ok(double e) { return e == 0.0 || e == -0.5 || e == 0.5; }

// int_l^u rho(t) [1/(t - z) - corr * t/(1 + t^2)] dt for Im z > 0.
// The pole near Re z is split off: (rho(t) - rho(x))/(t - z) is integrated
// numerically with a breakpoint at x and rho(x) log((u - z)/(l - z)) exactly.
cplx piece_transform(const AcPiece& p, cplx z, bool corr, const QuadOptions& quad) {
  const double x = z.real();
  const bool subtract = x > p.l && x < p.u;
  const double rx = subtract ? p.density(x) : 0.0;
  const double cw = corr ? 1.0 : 0.0;
  auto core = [&](double t) {
    double r = p.density(t);
    return (r - rx) / (t - z) - cw * r * t / (1.0 + t * t);
  };
  Quad<cplx> q;
  if (p.left_exp != 0.0 || p.right_exp != 0.0) {
    SinSquareMap map{p.l, p.u};
    std::vector<double> pts{0.0};
    if (subtract) pts.push_back(map.theta_of(x));
    pts.push_back(kHalfPi);
    q = integrate([&](double th) { return core(map.x(th)) * map.jacobian(th); },
                  std::span<const double>(pts), quad);
  } else {
    std::vector<double> pts{p.l};
    if (subtract) pts.push_back(x);
    pts.push_back(p.u);
    q = integrate(core, std::span<const double>(pts), quad);
  }
  if (!q.converged) throw NumericError("quadrature did not converge on [" + std::to_string(p.l) + ", " +
                                          std::to_string(p.u) + "]", q.error);
  cplx v = q.value;
  if (subtract) v += rx * (std::log(p.u - z) - std::log(p.l - z));
  return v;
}

}  // namespace

void SpectralMeasure::validate() const {
  for (std::size_t k = 0; k < ac.size(); ++k) {
    const auto& p = ac[k];
    if (!(p.l < p.u)) throw InvariantViolation("ac piece " + std::to_string(k) + ": l >= u");
    if (k > 0 && ac[k - 1].u > p.l)
      throw InvariantViolation("ac pieces overlap or are unsorted at " + std::to_string(k));
    if (!exponent_ok(p.left_exp) || !exponent_ok(p.right_exp))
      throw InvariantViolation("ac piece " + std::to_string(k) + ": exponent not in {0, -1/2, 1/2}");
    if (!p.density) throw InvariantViolation("ac piece " + std::to_string(k) + ": missing density");
    for (int s = 1; s <= 7; ++s) {
      double t = p.l + (p.u - p.l) * s / 8.0;
      if (!(p.density(t) >= -1e-14))
        throw InvariantViolation("ac piece " + std::to_string(k) + ": negative density");
    }
  }
  for (std::size_t k = 0; k < pp.size(); ++k)
    if (!(pp[k].weight >= 0)) throw InvariantViolation("point mass " + std::to_string(k) + ": negative weight");
}

HerglotzEvaluator HerglotzEvaluator::representation(NevanlinnaRep rep, QuadOptions quad) {
  if (!(rep.d >= 0)) throw InvariantViolation("Nevanlinna representation with d < 0");
  rep.measure.validate();
  HerglotzEvaluator e;
  e.traits_.linear_term = rep.d != 0;
  e.name_ = "representation";
  e.impl_ = std::move(rep);
  e.quad_ = quad;
  return e;
}

HerglotzEvaluator HerglotzEvaluator::closed_form(std::string name, Fn f, EvaluatorTraits traits) {
  HerglotzEvaluator e;
  e.traits_ = traits;
  e.name_ = name;
  e.impl_ = ClosedForm{std::move(name), std::move(f), traits};
  return e;
}

cplx HerglotzEvaluator::operator()(cplx z) const {
  if (z.imag() == 0) throw DomainError("Herglotz evaluation on the real axis");
  const bool lower = z.imag() < 0;
  cplx w = lower ? std::conj(z) : z;
  cplx v = std::visit(
      [&](const auto& impl) -> cplx {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, NevanlinnaRep>)
          return herglotz::eval_representation(impl, w, quad_);
        else
          return impl.f(w);
      },
      impl_);
  return lower ? std::conj(v) : v;
}

namespace herglotz {

cplx eval_representation(const NevanlinnaRep& rep, cplx z, const QuadOptions& quad) {
  if (z.imag() == 0) throw DomainError("representation evaluated on the real axis");
  if (z.imag() < 0) return std::conj(eval_representation(rep, std::conj(z), quad));
  cplx v = rep.c + rep.d * z;
  for (const auto& p : rep.measure.pp) v += p.weight * (1.0 / (p.loc - z) - p.loc / (1.0 + p.loc * p.loc));
  for (const auto& p : rep.measure.ac) v += piece_transform(p, z, true, quad);
  return v;
}

std::vector<double> default_eps_schedule() { return {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}; }

Extrapolated richardson(std::span<const double> eps, std::span<const double> f) {
  Extrapolated out;
  out.samples.assign(f.begin(), f.end());
  const std::size_t n = f.size();
  if (n == 0) throw ConfigError("empty extrapolation schedule");
  if (n == 1) {
    out.value = f[0];
    return out;
  }
  auto rich = [&](std::size_t k) { return f[k] + (f[k] - f[k - 1]) * eps[k] / (eps[k - 1] - eps[k]); };
  out.value = rich(n - 1);
  out.error = n >= 3 ? std::fabs(out.value - rich(n - 2)) : std::fabs(f[n - 1] - f[n - 2]);
  double scale = 0;
  for (double v : f) scale = std::max(scale, std::fabs(v));
  const double noise = 1e-12 * std::max(scale, 1.0);
  int sign = 0;
  for (std::size_t k = 1; k < n; ++k) {
    double d = f[k] - f[k - 1];
    if (std::fabs(d) <= noise) continue;
    int s = d > 0 ? 1 : -1;
    if (sign != 0 && s != sign) out.monotone = false;
    sign = s;
  }
  return out;
}

namespace {

std::vector<double> schedule_or_default(std::span<const double> eps) {
  std::vector<double> e(eps.begin(), eps.end());
  if (e.empty()) e = default_eps_schedule();
  if (e.size() < 3) throw ConfigError("epsilon schedule needs at least 3 entries");
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (!(e[k] > 0)) throw ConfigError("epsilon schedule entries must be positive");
    if (k > 0 && !(e[k] < e[k - 1])) throw ConfigError("epsilon schedule must decrease");
  }
  return e;
}

}  // namespace

Extrapolated stieltjes_invert(const HerglotzEvaluator& m, double l1, double l2, std::span<const double> eps_in) {
  if (!(l1 < l2)) throw ConfigError("stieltjes_invert needs l1 < l2");
  auto eps = schedule_or_default(eps_in);
  // The segment integral at height eps equals the integral over the path
  // l1+i eps -> l1+iY -> l2+iY -> l2+i eps since m is analytic in between.
  // The vertical legs are integrated in log t, where t m(l+it) stays bounded.
  const double Y = std::max(l2 - l1, 10.0 * eps.front());
  const QuadOptions q{1e-11, 1e-11, 8000};
  auto horiz = integrate([&](double t) { return m(cplx(t, Y)); }, l1, l2, q);
  std::vector<double> f;
  for (double e : eps) {
    auto leg = [&](double l) {
      auto r = integrate(
          [&](double u) {
            double t = std::exp(u);
            return m(cplx(l, t)) * t;
          },
          std::log(e), std::log(Y), q);
      if (!r.converged) throw NumericError("stieltjes leg quadrature", r.error);
      return r.value;
    };
    cplx total = cplx(0, 1) * leg(l1) + horiz.value - cplx(0, 1) * leg(l2);
    f.push_back(total.imag() / kPi);
  }
  if (!horiz.converged) throw NumericError("stieltjes quadrature", horiz.error);
  return richardson(eps, f);
}

DensityEstimate ac_density(const HerglotzEvaluator& m, double lambda, std::span<const double> eps_in) {
  auto eps = schedule_or_default(eps_in);
  std::vector<double> f;
  for (double e : eps) f.push_back(m(cplx(lambda, e)).imag() / kPi);
  const std::size_t n = f.size();
  DensityEstimate out;
  if (f[n - 1] > 0 && f[n - 1] > 2.0 * f[n - 2] && f[n - 2] > 2.0 * f[n - 3]) {
    out.singular = true;
    out.value = f[n - 1];
    return out;
  }
  auto r = richardson(eps, f);
  out.value = std::max(r.value, 0.0);
  out.error = r.error;
  return out;
}

Extrapolated point_mass(const HerglotzEvaluator& m, double lambda, std::span<const double> eps_in) {
  auto eps = schedule_or_default(eps_in);
  std::vector<double> f;
  for (double e : eps) f.push_back(e * m(cplx(lambda, e)).imag());
  auto r = richardson(eps, f);
  r.value = std::max(r.value, 0.0);
  return r;
}

Extrapolated xi_boundary(const HerglotzEvaluator& m, double lambda, std::span<const double> eps_in) {
  auto eps = schedule_or_default(eps_in);
  std::vector<double> f;
  for (double e : eps) f.push_back(std::arg(m(cplx(lambda, e))) / kPi);
  auto r = richardson(eps, f);
  const double tol = 1e-4;
  if (r.value < -tol || r.value > 1 + tol) throw NumericError("xi extrapolated outside [0,1]", r.value);
  r.value = std::clamp(r.value, 0.0, 1.0);
  return r;
}

cplx exp_representation_roundtrip(const HerglotzEvaluator& m, const XiProfile& xi, cplx z) {
  if (m.traits().linear_term)
    throw ConfigError("exponential representation needs a function without linear term");
  if (m.traits().unbounded_support && !xi.tail_value)
    throw ConfigError("xi profile lacks a tail value for unbounded support");
  if (xi.breaks.size() != xi.values.size()) throw ConfigError("xi profile breaks/values size mismatch");
  if (z.imag() <= 0) throw DomainError("reconstruction point must lie in the upper half-plane");
  auto F = [&](double t) { return std::log(t - z) - 0.5 * std::log1p(t * t); };
  cplx v = std::log(std::abs(m(cplx(0, 1))));
  for (std::size_t k = 0; k < xi.breaks.size(); ++k) {
    double p = xi.breaks[k];
    double q = k + 1 < xi.breaks.size() ? xi.breaks[k + 1] : xi.cutoff;
    if (!(q > p)) {
      if (q < p) throw ConfigError("xi profile breaks must increase up to the cutoff");
      continue;
    }
    if (xi.values[k] != 0) v += xi.values[k] * (F(q) - F(p));
  }
  if (xi.tail_value && *xi.tail_value != 0) v -= *xi.tail_value * F(xi.cutoff);
  return v;
}

}  // namespace herglotz

namespace herglotz {

cplx cauchy_transform(const SpectralMeasure& mu, cplx z, const QuadOptions& quad) {
  if (z.imag() == 0) throw DomainError("Cauchy transform on the real axis");
  if (z.imag() < 0) return std::conj(cauchy_transform(mu, std::conj(z), quad));
  cplx v = 0;
  for (const auto& p : mu.pp) v += p.weight / (p.loc - z);
  for (const auto& p : mu.ac) v += piece_transform(p, z, false, quad);
  return v;
}

}  // namespace herglotz

}  // namespace gapspec
