#pragma once

#include <span>
#include <vector>

#include "gapspec/comb.hpp"
#include "gapspec/gapset.hpp"
#include "gapspec/quadrature.hpp"

namespace gapspec {

struct DenjoyParams {
  double b1 = 1;
  EllRule ell;  // defaults to l_n = 4^-n
  int N = 40;   // truncation depth
};

// Gaps (a_n, b_n), n = 1..N, with b_{n+1} = l_n b_n and a_n = b_{n+1}/(1 - l_n),
// accumulating at 0. Arrays are 1-based through the accessors.
struct DenjoySet {
  DenjoyParams params;
  std::vector<double> b_;     // b_1 .. b_{N+1}
  std::vector<double> a_;     // a_1 .. a_N
  std::vector<double> ell_;   // l_1 .. l_N
  std::vector<double> band_;  // a_n - b_{n+1} = b_{n+1} l_n/(1 - l_n), formed without subtraction
  std::vector<double> gap_;   // b_n - a_n = b_n (1 - 2 l_n)/(1 - l_n)
  // Gaps 1..listed are strictly ordered and resolvable in double precision;
  // deeper gaps collapse onto their neighbours and are carried by the tail.
  int listed = 0;
  double ell_sum = 0;
  GapSet set;  // listed gaps plus the infinite tail, E0 = 0

  int N() const { return params.N; }
  double b(int n) const { return b_.at(n - 1); }
  double a(int n) const { return a_.at(n - 1); }
  double ell(int n) const { return ell_.at(n - 1); }
  double band(int n) const { return band_.at(n - 1); }
  double gap(int n) const { return gap_.at(n - 1); }
};

namespace denjoy {

// a with 1/b_next - 1/a = 1/b_prev. Needs 0 < b_next < b_prev/2.
double symmetric_interval(double b_prev, double b_next);

DenjoySet build(const DenjoyParams& p);

// Gaps 1..N. Those beyond `listed` are described by a finite tail.
GapSet truncation(const DenjoySet& ds, int N);
// Gaps 1..min(N, listed), no tail; input for greens and comb.
GapSet finite_truncation(const DenjoySet& ds, int N);
// E_n = [b_n, inf) minus gaps 1..n-1.
GapSet stage_set(const DenjoySet& ds, int n);

struct RecursionCheck {
  double recursion = 0;  // max |b_{n+1} - l_n b_n| / b_{n+1}
  double symmetric = 0;  // max relative error of 1/b_{n+1} - 1/a_n = 1/b_n
  double ratio = 0;      // max |b_{n+1}/a_n - (1 - l_n)|
  bool ordered = true;   // strict ordering of the listed gaps
  double worst() const;
};
RecursionCheck check_recursion(const DenjoySet& ds);

struct ConditionC {
  int n = 0;
  bool holds = true;
  double margin = 0;      // inf omega_n - omega_n(0)/2
  double inf_omega = 0;   // over the grid on [b_{n+1}, a_n]
  double witness = 0;     // grid point attaining the inf
  double omega0 = 0;      // omega_n(0)
};
ConditionC check_condition_c(const DenjoySet& ds, int n, int grid = 33,
                             const comb::SolveOptions& opt = {});
double omega_zero(const DenjoySet& ds, int n, const comb::SolveOptions& opt = {});

// g of the truncation with mu_j = b_j.
cplx r0_eval(const DenjoySet& ds, cplx z, int truncN);
cplx minus_inverse_g(const DenjoySet& ds, cplx z, int truncN);

struct ProductBound {
  double value = 0;       // (1/2) sqrt(b1) prod (1 - l_j)^(1/2)
  int terms = 0;
  double tail_bound = 0;  // relative bound on the factors left out
};
// Runs the product until the omitted factors are within rel_tol of 1.
ProductBound lower_bound(double b1, const EllRule& ell, double rel_tol = 1e-12);
// (1/2) prod_{j<=N} (1 - l_j)^(1/2) (b1 - z)^(1/2), valid for z < 0.
double partial_bound(const DenjoySet& ds, int N, double z);

struct PointMassResult {
  std::vector<double> z;
  std::vector<int> truncN;
  std::vector<double> values;  // (-z) r0(z) for the largest truncation
  double estimate = 0;
  double error = 0;            // last step of the z schedule
  double truncation_gap = 0;   // spread over the truncation schedule at the last z
  ProductBound bound;
  double ratio = 0;            // estimate / bound.value
  bool pass = false;           // estimate >= 0.99 bound
};
std::vector<double> default_z_schedule();  // -10^-k, k = 2..6
PointMassResult point_mass_limit(const DenjoySet& ds, std::span<const double> z = {},
                                 std::vector<int> truncN = {});

struct GlPhiOptions {
  double R = 0;  // tail start; 0 picks max(4 b1, a1 + 1)
  int K = 8;     // tail series order
  double tail_tol = 1e-6;
  QuadOptions quad{1e-13, 1e-10, 4000};
};

struct GlPhiValue {
  double value = 0;
  double error = 0;
  double phi1 = 0;  // int over [0, b1]
  double phi2 = 0;  // int over [b1, inf)
  double tail = 0;  // series part of phi2, over [R, inf)
  double tail_bound = 0;
  double R = 0;
};

// Phi(x) = lim int_0^R dw(lambda) sin(sqrt(lambda) x)/sqrt(lambda) with
// dw = pi^-1 sqrt(lambda) [prod ((lambda - a_j)/(lambda - b_j))^(1/2) chi_E - 1] dlambda.
// b1 is the top edge of the highest gap. Throws NumericError when the order K
// tail remainder exceeds tail_tol.
GlPhiValue gl_phi(const GapSet& s, double x, const GlPhiOptions& opt = {});
GlPhiValue gl_phi(const DenjoySet& ds, double x, int truncN, const GlPhiOptions& opt = {});

}  // namespace denjoy
}  // namespace gapspec
