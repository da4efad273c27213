#include "gapspec/special.hpp"

#include <cmath>
#include <vector>

#include <gsl/gsl_sf_expint.h>

#include "gapspec/errors.hpp"

namespace gapspec::special {

double si(double x) { return gsl_sf_Si(x); }

double ci(double x) {
  if (!(x > 0)) throw DomainError("Ci needs x > 0");
  return gsl_sf_Ci(x);
}

void sine_tail_integrals(double s, std::span<double> J) {
  if (J.empty()) return;
  if (!(s > 0)) throw DomainError("sine tail integrals need s > 0");
  const double pi_2 = 1.57079632679489661923;
  const double sn = std::sin(s), cs = std::cos(s);
  double j = pi_2 - si(s);  // J_1
  double c = -ci(s);        // C_1 = int_s^inf cos t / t dt
  double sp = 1.0 / s;      // s^-m
  J[0] = j;
  for (std::size_t m = 1; m < J.size(); ++m) {
    // J_{m+1} = (C_m + sin s s^-m)/m,  C_{m+1} = (cos s s^-m - J_m)/m
    double jn = (c + sn * sp) / static_cast<double>(m);
    double cn = (cs * sp - j) / static_cast<double>(m);
    j = jn;
    c = cn;
    sp /= s;
    J[m] = j;
  }
}

}  // namespace gapspec::special
