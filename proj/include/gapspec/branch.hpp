#pragma once

#include <cmath>
#include <complex>

namespace gapspec {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Square root with arg(w) taken in [0, 2pi), so the cut lies on [0, inf).
// In the open upper half-plane this is the principal root; in the lower one
// it is minus the principal root.
inline cplx sqrt2pi(cplx w) {
  if (w.imag() > 0) return std::sqrt(w);
  if (w.imag() < 0) return -std::sqrt(w);
  if (w.real() >= 0) return {std::sqrt(w.real()), 0.0};
  return {0.0, std::sqrt(-w.real())};
}

inline cplx bracket(cplx z, double a, double b) { return sqrt2pi(z - a) * sqrt2pi(z - b); }

// Principal root for Im w > 0 written without branches on the sign of Re w,
// shared by the scalar and vector kernels so both round identically.
inline cplx csqrt_upper(double x, double y) {
  double r = std::sqrt(x * x + y * y);
  double t = std::sqrt(0.5 * (r + std::fabs(x)));
  double s = y / (2.0 * t);
  return x >= 0 ? cplx(t, s) : cplx(s, t);
}

}  // namespace gapspec
