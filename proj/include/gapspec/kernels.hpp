#pragma once

// Batched gap-product kernels. Every finite-gap function in the library is a
// prefactor times a product over gaps, so these loops dominate the cost of
// quadrature and grid sweeps. Each kernel has a scalar reference version and
// an AVX2 version; the dispatching entry points pick one at first use from
// the CPU flags (GAPSPEC_KERNELS=scalar forces the reference path).

#include <complex>
#include <span>

namespace gapspec::kernels {

// Gap k is (a[k], b[k]) with marked point c[k]; all three spans share a size.
struct GapView {
  std::span<const double> a, b, c;
  std::size_t size() const { return a.size(); }
};

// out[i] = prod_k |x_i - c_k| / sqrt(|x_i - a_k| |x_i - b_k|)
void real_ratio_product(std::span<const double> x, GapView g, std::span<double> out);

// out[i] = prod_k (z_i - c_k) / (sqrt(z_i - a_k) sqrt(z_i - b_k)) with the
// principal root; requires Im z_i > 0.
void upper_ratio_product(std::span<const std::complex<double>> z, GapView g,
                         std::span<std::complex<double>> out);

enum class Backend { Scalar, Avx2 };
Backend active_backend();
bool avx2_supported();
const char* backend_name(Backend b);

namespace scalar {
void real_ratio_product(std::span<const double> x, GapView g, std::span<double> out);
void upper_ratio_product(std::span<const std::complex<double>> z, GapView g,
                         std::span<std::complex<double>> out);
}  // namespace scalar

// Only call when avx2_supported() is true.
namespace avx2 {
void real_ratio_product(std::span<const double> x, GapView g, std::span<double> out);
void upper_ratio_product(std::span<const std::complex<double>> z, GapView g,
                         std::span<std::complex<double>> out);
}  // namespace avx2

}  // namespace gapspec::kernels
