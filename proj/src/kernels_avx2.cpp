#include <cmath>

#include "gapspec/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)
#include <immintrin.h>
#endif

namespace gapspec::kernels::avx2 {

#if defined(__x86_64__) && defined(__AVX2__)

namespace {

inline __m256d vabs(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

// Principal square root for Im > 0, same operation order as csqrt_upper.
inline void vsqrt_upper(__m256d x, __m256d y, __m256d& re, __m256d& im) {
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d two = _mm256_set1_pd(2.0);
  __m256d r = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y)));
  __m256d t = _mm256_sqrt_pd(_mm256_mul_pd(half, _mm256_add_pd(r, vabs(x))));
  __m256d s = _mm256_div_pd(y, _mm256_mul_pd(two, t));
  __m256d neg = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LT_OQ);
  re = _mm256_blendv_pd(t, s, neg);
  im = _mm256_blendv_pd(s, t, neg);
}

}  // namespace

void real_ratio_product(std::span<const double> x, GapView g, std::span<double> out) {
  const std::size_t n = g.size(), m = x.size();
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    __m256d xi = _mm256_loadu_pd(x.data() + i);
    __m256d p = _mm256_set1_pd(1.0);
    for (std::size_t k = 0; k < n; ++k) {
      __m256d d = _mm256_sub_pd(xi, _mm256_broadcast_sd(&g.c[k]));
      __m256d r = _mm256_mul_pd(_mm256_div_pd(d, _mm256_sub_pd(xi, _mm256_broadcast_sd(&g.a[k]))),
                                _mm256_div_pd(d, _mm256_sub_pd(xi, _mm256_broadcast_sd(&g.b[k]))));
      p = _mm256_mul_pd(p, vabs(r));
    }
    _mm256_storeu_pd(out.data() + i, _mm256_sqrt_pd(p));
  }
  if (i < m) scalar::real_ratio_product(x.subspan(i), g, out.subspan(i));
}

void upper_ratio_product(std::span<const std::complex<double>> z, GapView g,
                         std::span<std::complex<double>> out) {
  const std::size_t n = g.size(), m = z.size();
  std::size_t i = 0;
  alignas(32) double zr[4], zi[4], rr[4], ri[4];
  for (; i + 4 <= m; i += 4) {
    for (int l = 0; l < 4; ++l) {
      zr[l] = z[i + l].real();
      zi[l] = z[i + l].imag();
    }
    __m256d vr = _mm256_load_pd(zr), vi = _mm256_load_pd(zi);
    __m256d pr = _mm256_set1_pd(1.0), pi = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    for (std::size_t k = 0; k < n; ++k) {
      __m256d s1r, s1i, s2r, s2i;
      vsqrt_upper(_mm256_sub_pd(vr, _mm256_broadcast_sd(&g.a[k])), vi, s1r, s1i);
      vsqrt_upper(_mm256_sub_pd(vr, _mm256_broadcast_sd(&g.b[k])), vi, s2r, s2i);
      __m256d nr = _mm256_sub_pd(vr, _mm256_broadcast_sd(&g.c[k]));
      __m256d inv1 = _mm256_div_pd(one, _mm256_add_pd(_mm256_mul_pd(s1r, s1r), _mm256_mul_pd(s1i, s1i)));
      __m256d er = _mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(nr, s1r), _mm256_mul_pd(vi, s1i)), inv1);
      __m256d ei = _mm256_mul_pd(_mm256_sub_pd(_mm256_mul_pd(vi, s1r), _mm256_mul_pd(nr, s1i)), inv1);
      __m256d inv2 = _mm256_div_pd(one, _mm256_add_pd(_mm256_mul_pd(s2r, s2r), _mm256_mul_pd(s2i, s2i)));
      __m256d fr = _mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(er, s2r), _mm256_mul_pd(ei, s2i)), inv2);
      __m256d fi = _mm256_mul_pd(_mm256_sub_pd(_mm256_mul_pd(ei, s2r), _mm256_mul_pd(er, s2i)), inv2);
      __m256d tr = _mm256_sub_pd(_mm256_mul_pd(pr, fr), _mm256_mul_pd(pi, fi));
      pi = _mm256_add_pd(_mm256_mul_pd(pr, fi), _mm256_mul_pd(pi, fr));
      pr = tr;
    }
    _mm256_store_pd(rr, pr);
    _mm256_store_pd(ri, pi);
    for (int l = 0; l < 4; ++l) out[i + l] = {rr[l], ri[l]};
  }
  if (i < m) scalar::upper_ratio_product(z.subspan(i), g, out.subspan(i));
}

#else

void real_ratio_product(std::span<const double> x, GapView g, std::span<double> out) {
  scalar::real_ratio_product(x, g, out);
}

void upper_ratio_product(std::span<const std::complex<double>> z, GapView g,
                         std::span<std::complex<double>> out) {
  scalar::upper_ratio_product(z, g, out);
}

#endif

}  // namespace gapspec::kernels::avx2
