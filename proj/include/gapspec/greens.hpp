#pragma once

#include <span>
#include <vector>

#include "gapspec/gapset.hpp"
#include "gapspec/herglotz.hpp"

namespace gapspec {

// Zeros mu_j of g, one per gap; sigma_j is carried for completeness and does
// not enter g or h.
struct DirichletDivisor {
  std::vector<double> mu;
  std::vector<int> sigma;
};

struct NuDivisor {
  double nu0 = 0;
  std::vector<double> nu;
};

namespace greens {

inline constexpr double kEdgeGuard = 1e-10;

void check_divisor(const GapSet& s, const DirichletDivisor& d);
void check_divisor(const GapSet& s, const NuDivisor& n);

// mu_j = b_j for every listed gap.
DirichletDivisor upper_edge_divisor(const GapSet& s);

// g(z) = i/(2 sqrt(z - E0)) prod (z - mu_j)/bracket(z; a_j, b_j).
// Real z is accepted in gaps and below E0, where g is real.
cplx g_eval(const GapSet& s, const DirichletDivisor& d, cplx z);
// g(lambda + i0) from one-sided argument limits.
cplx g_boundary(const GapSet& s, const DirichletDivisor& d, double lambda);
void g_eval_batch(const GapSet& s, const DirichletDivisor& d, std::span<const cplx> z, std::span<cplx> out);
void g_boundary_batch(const GapSet& s, const DirichletDivisor& d, std::span<const double> lambda,
                      std::span<cplx> out);

// h(z) = (i/2)(z - nu0)/sqrt(z - E0) prod (z - nu_j)/bracket(z; a_j, b_j).
cplx h_eval(const GapSet& s, const NuDivisor& n, cplx z);
cplx h_boundary(const GapSet& s, const NuDivisor& n, double lambda);
void h_eval_batch(const GapSet& s, const NuDivisor& n, std::span<const cplx> z, std::span<cplx> out);

cplx m_trace_eval(const GapSet& s, const DirichletDivisor& d, const NuDivisor& n, cplx z);

double xi_profile(const GapSet& s, const DirichletDivisor& d, double lambda);
herglotz::XiProfile xi_step_profile(const GapSet& s, const DirichletDivisor& d, double cutoff);

struct TracePotential {
  double value = 0;
  double bound = 0;       // |E0| + sum |b_j - a_j|
  double tail_bound = 0;  // contribution the tail could still add
};
TracePotential trace_potential(const GapSet& s, const DirichletDivisor& d);
double trace_limit_check(const GapSet& s, const DirichletDivisor& d, double y);

double im_m_on_E(const GapSet& s, const DirichletDivisor& d, double lambda);

double reflectionless_check(const GapSet& s, const DirichletDivisor& d, std::span<const double> lambdas);
double reflectionless_check_eps(const GapSet& s, const DirichletDivisor& d, std::span<const double> lambdas,
                                double eps);

HerglotzEvaluator g_evaluator(const GapSet& s, const DirichletDivisor& d);
HerglotzEvaluator h_evaluator(const GapSet& s, const NuDivisor& n);
HerglotzEvaluator m_trace_evaluator(const GapSet& s, const DirichletDivisor& d, const NuDivisor& n);

// pi^-1 Im g(lambda + i0) on E, zero in gaps and below E0.
double g_density(const GapSet& s, const DirichletDivisor& d, double lambda);
double h_density(const GapSet& s, const NuDivisor& n, double lambda);
// Spectral measure of g restricted to [E0, cutoff].
SpectralMeasure g_measure(const GapSet& s, const DirichletDivisor& d, double cutoff);
SpectralMeasure h_measure(const GapSet& s, const NuDivisor& n, double cutoff);

// Compact variant. With zeta = 1/(lambda0 - z) the function g(z(zeta)) equals
// C sqrt(zeta)/sqrt(zeta - E0~) prod (zeta - mu~_j)/bracket(zeta; a~_j, b~_j).
DirichletDivisor compactify_divisor(const DirichletDivisor& d, double lambda0);
double compact_constant(const GapSet& s, const DirichletDivisor& d, double lambda0);
cplx g_eval_compact(const GapSet& compact, const DirichletDivisor& dt, double C, cplx zeta);

}  // namespace greens
}  // namespace gapspec
