#include "gapspec/greens.hpp"

#include <algorithm>
#include <cmath>

#include "gapspec/errors.hpp"
#include "gapspec/kernels.hpp"

namespace gapspec::greens {

namespace {

const cplx I(0, 1);

void require_open(const GapSet& s) {
  if (s.cap) throw ConfigError("compact sets are evaluated with g_eval_compact");
}

void guard_edges(const GapSet& s, double lambda) {
  auto near = [&](double e) { return std::fabs(lambda - e) < kEdgeGuard; };
  if (near(s.E0)) throw DomainError("evaluation at the band edge E0");
  for (std::size_t j = 0; j < s.gaps.size(); ++j)
    if (near(s.gaps[j].a) || near(s.gaps[j].b))
      throw DomainError("evaluation at a band edge of gap " + std::to_string(j + 1));
}

bool in_E_interior(const GapSet& s, double lambda) {
  if (lambda <= s.E0) return false;
  for (const auto& g : s.gaps)
    if (lambda >= g.a && lambda <= g.b) return false;
  return true;
}

cplx quarter_turns(double mag, int q) {
  switch (((q % 4) + 4) % 4) {
    case 0: return {mag, 0.0};
    case 1: return {0.0, mag};
    case 2: return {-mag, 0.0};
    default: return {0.0, -mag};
  }
}

// prefactor * prod (lambda - c_j)/bracket(lambda + i0) with the phase kept
// as an integer number of quarter turns, so values on E come out exactly
// imaginary.
cplx boundary_product(const GapSet& s, std::span<const double> c, double lambda, double mag, int q) {
  if (lambda > s.E0) {
    mag /= std::sqrt(lambda - s.E0);
  } else {
    mag /= std::sqrt(s.E0 - lambda);
    q -= 1;
  }
  for (std::size_t j = 0; j < s.gaps.size(); ++j) {
    const double a = s.gaps[j].a, b = s.gaps[j].b;
    double den;
    if (lambda > b) {
      den = std::sqrt(lambda - a) * std::sqrt(lambda - b);
    } else if (lambda < a) {
      den = std::sqrt(a - lambda) * std::sqrt(b - lambda);
      q -= 2;
    } else {
      den = std::sqrt(lambda - a) * std::sqrt(b - lambda);
      q -= 1;
    }
    mag *= (lambda - c[j]) / den;
  }
  return quarter_turns(mag, q);
}

cplx upper_product(const GapSet& s, std::span<const double> c, cplx z) {
  cplx p = 1.0;
  for (std::size_t j = 0; j < s.gaps.size(); ++j) p *= (z - c[j]) / bracket(z, s.gaps[j].a, s.gaps[j].b);
  return p;
}

std::vector<double> edges_a(const GapSet& s) {
  std::vector<double> v;
  for (const auto& g : s.gaps) v.push_back(g.a);
  return v;
}
std::vector<double> edges_b(const GapSet& s) {
  std::vector<double> v;
  for (const auto& g : s.gaps) v.push_back(g.b);
  return v;
}

// Shared batch path: Im z > 0 points go through the vector kernel.
void batch_eval(const GapSet& s, std::span<const double> c, std::span<const cplx> z, std::span<cplx> out,
                bool h_form, double nu0, const std::function<cplx(cplx)>& fallback) {
  std::vector<cplx> zu;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i].imag() > 0) {
      zu.push_back(z[i]);
      idx.push_back(i);
    } else {
      out[i] = fallback(z[i]);
    }
  }
  if (zu.empty()) return;
  auto A = edges_a(s), B = edges_b(s);
  std::vector<cplx> prod(zu.size());
  kernels::upper_ratio_product(zu, {A, B, c}, prod);
  for (std::size_t k = 0; k < zu.size(); ++k) {
    cplx r = std::sqrt(zu[k] - s.E0);
    cplx pre = h_form ? 0.5 * I * (zu[k] - nu0) / r : I / (2.0 * r);
    out[idx[k]] = pre * prod[k];
  }
}

}  // namespace

void check_divisor(const GapSet& s, const DirichletDivisor& d) {
  if (d.mu.size() != s.gaps.size())
    throw ConfigError("divisor has " + std::to_string(d.mu.size()) + " entries for " +
                      std::to_string(s.gaps.size()) + " gaps");
  if (!d.sigma.empty() && d.sigma.size() != d.mu.size()) throw ConfigError("sigma/mu size mismatch");
  for (std::size_t j = 0; j < d.mu.size(); ++j) {
    if (!(d.mu[j] >= s.gaps[j].a && d.mu[j] <= s.gaps[j].b))
      throw InvariantViolation("mu_" + std::to_string(j + 1) + " outside its gap");
    if (!d.sigma.empty() && d.sigma[j] != 1 && d.sigma[j] != -1)
      throw InvariantViolation("sigma_" + std::to_string(j + 1) + " not in {+1,-1}");
  }
}

void check_divisor(const GapSet& s, const NuDivisor& n) {
  if (n.nu.size() != s.gaps.size()) throw ConfigError("nu divisor size does not match the gap count");
  if (!(n.nu0 <= s.E0)) throw InvariantViolation("nu0 > E0");
  for (std::size_t j = 0; j < n.nu.size(); ++j)
    if (!(n.nu[j] >= s.gaps[j].a && n.nu[j] <= s.gaps[j].b))
      throw InvariantViolation("nu_" + std::to_string(j + 1) + " outside its gap");
}

DirichletDivisor upper_edge_divisor(const GapSet& s) {
  DirichletDivisor d;
  for (const auto& g : s.gaps) {
    d.mu.push_back(g.b);
    d.sigma.push_back(1);
  }
  return d;
}

cplx g_boundary(const GapSet& s, const DirichletDivisor& d, double lambda) {
  require_open(s);
  check_divisor(s, d);
  guard_edges(s, lambda);
  return boundary_product(s, d.mu, lambda, 0.5, 1);
}

cplx g_eval(const GapSet& s, const DirichletDivisor& d, cplx z) {
  require_open(s);
  check_divisor(s, d);
  if (z.imag() == 0) {
    if (in_E_interior(s, z.real())) throw DomainError("g on E is two-valued; use the boundary mode");
    return g_boundary(s, d, z.real());
  }
  return I / (2.0 * sqrt2pi(z - s.E0)) * upper_product(s, d.mu, z);
}

void g_eval_batch(const GapSet& s, const DirichletDivisor& d, std::span<const cplx> z, std::span<cplx> out) {
  require_open(s);
  check_divisor(s, d);
  batch_eval(s, d.mu, z, out, false, 0.0, [&](cplx w) { return g_eval(s, d, w); });
}

void g_boundary_batch(const GapSet& s, const DirichletDivisor& d, std::span<const double> lambda,
                      std::span<cplx> out) {
  require_open(s);
  check_divisor(s, d);
  for (double l : lambda) guard_edges(s, l);
  auto A = edges_a(s), B = edges_b(s);
  std::vector<double> mag(lambda.size());
  kernels::real_ratio_product(lambda, {A, B, d.mu}, mag);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double l = lambda[i];
    int q = 1;
    bool neg = false;
    double m = 0.5 * mag[i];
    if (l > s.E0) {
      m /= std::sqrt(l - s.E0);
    } else {
      m /= std::sqrt(s.E0 - l);
      q -= 1;
    }
    for (std::size_t j = 0; j < s.gaps.size(); ++j) {
      if (l < s.gaps[j].a)
        q -= 2;
      else if (l < s.gaps[j].b)
        q -= 1;
      if (l < d.mu[j]) neg = !neg;
    }
    out[i] = quarter_turns(neg ? -m : m, q);
  }
}

cplx h_boundary(const GapSet& s, const NuDivisor& n, double lambda) {
  require_open(s);
  check_divisor(s, n);
  guard_edges(s, lambda);
  return boundary_product(s, n.nu, lambda, 0.5 * (lambda - n.nu0), 1);
}

cplx h_eval(const GapSet& s, const NuDivisor& n, cplx z) {
  require_open(s);
  check_divisor(s, n);
  if (z.imag() == 0) {
    if (in_E_interior(s, z.real())) throw DomainError("h on E is two-valued; use the boundary mode");
    return h_boundary(s, n, z.real());
  }
  return 0.5 * I * (z - n.nu0) / sqrt2pi(z - s.E0) * upper_product(s, n.nu, z);
}

void h_eval_batch(const GapSet& s, const NuDivisor& n, std::span<const cplx> z, std::span<cplx> out) {
  require_open(s);
  check_divisor(s, n);
  batch_eval(s, n.nu, z, out, true, n.nu0, [&](cplx w) { return h_eval(s, n, w); });
}

cplx m_trace_eval(const GapSet& s, const DirichletDivisor& d, const NuDivisor& n, cplx z) {
  return g_eval(s, d, z) + h_eval(s, n, z);
}

double xi_profile(const GapSet& s, const DirichletDivisor& d, double lambda) {
  check_divisor(s, d);
  if (lambda < s.E0) return 0.0;
  for (std::size_t j = 0; j < s.gaps.size(); ++j) {
    const auto& g = s.gaps[j];
    if (lambda > g.a && lambda < g.b) {
      if (lambda < d.mu[j]) return 1.0;
      if (lambda > d.mu[j]) return 0.0;
      return 0.5;
    }
  }
  if (s.tail && lambda > 0 && !sets::contains(s, lambda)) throw DomainError("xi requested inside a tail gap");
  return 0.5;
}

herglotz::XiProfile xi_step_profile(const GapSet& s, const DirichletDivisor& d, double cutoff) {
  check_divisor(s, d);
  herglotz::XiProfile p;
  p.breaks.push_back(s.E0);
  p.values.push_back(0.5);
  for (std::size_t j = 0; j < s.gaps.size(); ++j) {
    const auto& g = s.gaps[j];
    p.breaks.insert(p.breaks.end(), {g.a, d.mu[j], g.b});
    p.values.insert(p.values.end(), {1.0, 0.0, 0.5});
  }
  double top = s.gaps.empty() ? s.E0 : s.gaps.back().b;
  if (!(cutoff > top)) throw ConfigError("xi cutoff must lie above the last gap");
  p.cutoff = cutoff;
  p.tail_value = 0.5;
  return p;
}

TracePotential trace_potential(const GapSet& s, const DirichletDivisor& d) {
  check_divisor(s, d);
  TracePotential t;
  t.value = s.E0;
  t.bound = std::fabs(s.E0);
  for (std::size_t j = 0; j < s.gaps.size(); ++j) {
    t.value += s.gaps[j].a + s.gaps[j].b - 2.0 * d.mu[j];
    t.bound += s.gaps[j].length();
  }
  if (s.tail) {
    t.tail_bound = s.tail->gap_length_sum();
    t.bound += t.tail_bound;
  }
  return t;
}

double trace_limit_check(const GapSet& s, const DirichletDivisor& d, double y) {
  check_divisor(s, d);
  if (!(y > 0)) throw DomainError("trace_limit_check needs y > 0");
  const cplx z(0, y);
  // int_p^q z^2 (l - z)^-2 dl in closed form.
  auto F = [&](double p, double q) { return z * z * (q - p) / ((p - z) * (q - z)); };
  cplx v = s.E0;
  for (std::size_t j = 0; j < s.gaps.size(); ++j) {
    const double a = s.gaps[j].a, b = s.gaps[j].b, mu = d.mu[j];
    v += -F(a, mu) + F(mu, b);
  }
  return v.real();
}

double im_m_on_E(const GapSet& s, const DirichletDivisor& d, double lambda) {
  if (!in_E_interior(s, lambda)) throw DomainError("im_m_on_E needs lambda in the interior of E");
  cplx g = g_boundary(s, d, lambda);
  if (!(g.imag() > 0)) throw NumericError("Im g(lambda+i0) is not positive", g.imag());
  return 1.0 / (2.0 * g.imag());
}

double reflectionless_check(const GapSet& s, const DirichletDivisor& d, std::span<const double> lambdas) {
  for (double l : lambdas)
    if (!in_E_interior(s, l)) throw DomainError("reflectionless_check sample outside the interior of E");
  std::vector<cplx> v(lambdas.size());
  g_boundary_batch(s, d, lambdas, v);
  double worst = 0;
  for (const auto& x : v) worst = std::max(worst, std::fabs(x.real()));
  return worst;
}

double reflectionless_check_eps(const GapSet& s, const DirichletDivisor& d, std::span<const double> lambdas,
                                double eps) {
  std::vector<cplx> z;
  for (double l : lambdas) z.emplace_back(l, eps);
  std::vector<cplx> v(z.size());
  g_eval_batch(s, d, z, v);
  double worst = 0;
  for (const auto& x : v) worst = std::max(worst, std::fabs(x.real()));
  return worst;
}

HerglotzEvaluator g_evaluator(const GapSet& s, const DirichletDivisor& d) {
  check_divisor(s, d);
  return HerglotzEvaluator::closed_form("product-g", [s, d](cplx z) { return g_eval(s, d, z); },
                                        {.unbounded_support = true, .linear_term = false});
}

HerglotzEvaluator h_evaluator(const GapSet& s, const NuDivisor& n) {
  check_divisor(s, n);
  return HerglotzEvaluator::closed_form("product-h", [s, n](cplx z) { return h_eval(s, n, z); },
                                        {.unbounded_support = true, .linear_term = false});
}

HerglotzEvaluator m_trace_evaluator(const GapSet& s, const DirichletDivisor& d, const NuDivisor& n) {
  check_divisor(s, d);
  check_divisor(s, n);
  return HerglotzEvaluator::closed_form("m-trace", [s, d, n](cplx z) { return m_trace_eval(s, d, n, z); },
                                        {.unbounded_support = true, .linear_term = false});
}

double g_density(const GapSet& s, const DirichletDivisor& d, double lambda) {
  if (!in_E_interior(s, lambda)) return 0.0;
  return boundary_product(s, d.mu, lambda, 0.5, 1).imag() / kPi;
}

double h_density(const GapSet& s, const NuDivisor& n, double lambda) {
  if (!in_E_interior(s, lambda)) return 0.0;
  return boundary_product(s, n.nu, lambda, 0.5 * (lambda - n.nu0), 1).imag() / kPi;
}

namespace {

template <class Density>
SpectralMeasure band_measure(const GapSet& s, std::span<const double> c, double cutoff, Density rho,
                             const std::string& form) {
  require_open(s);
  if (s.tail) throw ConfigError("band measures need a finite gap list");
  SpectralMeasure m;
  double lo = s.E0, lo_exp = -0.5;
  for (std::size_t j = 0; j <= s.gaps.size(); ++j) {
    double hi = j < s.gaps.size() ? s.gaps[j].a : cutoff;
    double hi_exp = 0.0;
    if (j < s.gaps.size()) hi_exp = c[j] == s.gaps[j].a ? 0.5 : -0.5;
    if (hi > cutoff) hi = cutoff, hi_exp = 0.0;
    if (hi > lo) m.ac.push_back({lo, hi, rho, lo_exp, hi_exp, form});
    if (j < s.gaps.size()) {
      lo = s.gaps[j].b;
      lo_exp = c[j] == s.gaps[j].b ? 0.5 : -0.5;
    }
    if (lo >= cutoff) break;
  }
  return m;
}

}  // namespace

SpectralMeasure g_measure(const GapSet& s, const DirichletDivisor& d, double cutoff) {
  check_divisor(s, d);
  return band_measure(s, d.mu, cutoff, [s, d](double l) { return g_density(s, d, l); }, "product-g");
}

SpectralMeasure h_measure(const GapSet& s, const NuDivisor& n, double cutoff) {
  check_divisor(s, n);
  // h ~ (l - nu0)/sqrt(l - E0) at E0; with nu0 = E0 the density vanishes there.
  auto m = band_measure(s, n.nu, cutoff, [s, n](double l) { return h_density(s, n, l); }, "product-h");
  if (!m.ac.empty() && n.nu0 == s.E0) m.ac.front().left_exp = 0.5;
  return m;
}

DirichletDivisor compactify_divisor(const DirichletDivisor& d, double lambda0) {
  DirichletDivisor t;
  for (double mu : d.mu) t.mu.push_back(1.0 / (lambda0 - mu));
  t.sigma = d.sigma;
  return t;
}

double compact_constant(const GapSet& s, const DirichletDivisor& d, double lambda0) {
  check_divisor(s, d);
  if (!(lambda0 < s.E0)) throw DomainError("compactification point must lie below E0");
  double c = 0.5 / std::sqrt(s.E0 - lambda0);
  for (std::size_t j = 0; j < s.gaps.size(); ++j)
    c *= (d.mu[j] - lambda0) / std::sqrt((s.gaps[j].a - lambda0) * (s.gaps[j].b - lambda0));
  return c;
}

cplx g_eval_compact(const GapSet& compact, const DirichletDivisor& dt, double C, cplx zeta) {
  if (!compact.cap) throw ConfigError("g_eval_compact needs a compact set");
  check_divisor(compact, dt);
  if (zeta.imag() == 0) throw DomainError("compact evaluation off the real axis only");
  cplx v = C * sqrt2pi(zeta - *compact.cap) / sqrt2pi(zeta - compact.E0);
  for (std::size_t j = 0; j < compact.gaps.size(); ++j)
    v *= (zeta - dt.mu[j]) / bracket(zeta, compact.gaps[j].a, compact.gaps[j].b);
  return v;
}

}  // namespace gapspec::greens
