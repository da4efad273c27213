#pragma once

#include <span>

namespace gapspec::special {

double si(double x);  // int_0^x sin t / t dt
double ci(double x);  // gamma + ln x + int_0^x (cos t - 1)/t dt, x > 0

// J[m-1] = int_s^inf sin t / t^m dt for m = 1..J.size(), s > 0, by upward
// recursion from Si and Ci. Errors shrink by 1/m per step, so the recursion
// is stable for the orders used here.
void sine_tail_integrals(double s, std::span<double> J);

}  // namespace gapspec::special
