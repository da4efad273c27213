#include "gapspec/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

#include "gapspec/branch.hpp"

namespace gapspec::kernels {

namespace scalar {

void real_ratio_product(std::span<const double> x, GapView g, std::span<double> out) {
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    double p = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      double d = xi - g.c[k];
      double r = (d / (xi - g.a[k])) * (d / (xi - g.b[k]));
      p = p * std::fabs(r);
    }
    out[i] = std::sqrt(p);
  }
}

void upper_ratio_product(std::span<const std::complex<double>> z, GapView g,
                         std::span<std::complex<double>> out) {
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double zr = z[i].real(), zi = z[i].imag();
    double pr = 1.0, pi = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      // (z - c)/s1/s2 in two steps keeps |s|^2 clear of underflow for tiny gaps.
      cplx s1 = csqrt_upper(zr - g.a[k], zi);
      cplx s2 = csqrt_upper(zr - g.b[k], zi);
      double nr = zr - g.c[k];
      double inv1 = 1.0 / (s1.real() * s1.real() + s1.imag() * s1.imag());
      double er = (nr * s1.real() + zi * s1.imag()) * inv1;
      double ei = (zi * s1.real() - nr * s1.imag()) * inv1;
      double inv2 = 1.0 / (s2.real() * s2.real() + s2.imag() * s2.imag());
      double fr = (er * s2.real() + ei * s2.imag()) * inv2;
      double fi = (ei * s2.real() - er * s2.imag()) * inv2;
      double tr = pr * fr - pi * fi;
      pi = pr * fi + pi * fr;
      pr = tr;
    }
    out[i] = {pr, pi};
  }
}

}  // namespace scalar

bool avx2_supported() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Backend active_backend() {
  static const Backend b = [] {
    const char* env = std::getenv("GAPSPEC_KERNELS");
    if (env && std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    return avx2_supported() ? Backend::Avx2 : Backend::Scalar;
  }();
  return b;
}

const char* backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

void real_ratio_product(std::span<const double> x, GapView g, std::span<double> out) {
  if (active_backend() == Backend::Avx2)
    avx2::real_ratio_product(x, g, out);
  else
    scalar::real_ratio_product(x, g, out);
}

void upper_ratio_product(std::span<const std::complex<double>> z, GapView g,
                         std::span<std::complex<double>> out) {
  if (active_backend() == Backend::Avx2)
    avx2::upper_ratio_product(z, g, out);
  else
    scalar::upper_ratio_product(z, g, out);
}

}  // namespace gapspec::kernels
