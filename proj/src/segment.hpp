#pragma once

// Internal: real-axis gap-product integrands in sin^2 coordinates.

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "gapspec/kernels.hpp"

namespace gapspec::detail {

struct Layout {
  double E0 = 0;
  std::vector<double> a, b, c;
  bool with_e0 = true;
  std::size_t n() const { return a.size(); }
};

// Real-axis integrand on a segment [lo, hi] lying inside one band, one gap, or
// below E0, in the variable lambda = lo + (hi - lo) sin^2(theta). Nodes in the
// lower half are handled in coordinates centred at lo, the others at hi, so
// every offset lambda - v is formed as (lo - v) + dlo or (hi - v) - dhi. That
// keeps neighbouring edges resolved when bands are far narrower than the
// distance to the origin.
// W(theta) = dlambda/dtheta * prod_k |lambda - c_k|/sqrt|(lambda - a_k)(lambda - b_k)|
// times 1/(2 sqrt|lambda - E0|) when L.with_e0, with |lambda - c_own| left
// out when own >= 0. With c = a the product is prod sqrt|(lambda - a)/(lambda - b)|.
class Segment {
 public:
  Segment(const Layout& L, double lo, double hi, int own = -1)
      : lo_(lo), hi_(hi), len_(hi - lo), own_(own), with_e0_(L.with_e0) {
    for (std::size_t k = 0; k < L.n(); ++k) {
      if (static_cast<int>(k) == own) continue;
      la_.push_back(L.a[k] - lo);
      lb_.push_back(L.b[k] - lo);
      lc_.push_back(L.c[k] - lo);
      ha_.push_back(L.a[k] - hi);
      hb_.push_back(L.b[k] - hi);
      hc_.push_back(L.c[k] - hi);
    }
    if (own >= 0) {
      oa_[0] = L.a[own] - lo;
      ob_[0] = L.b[own] - lo;
      oa_[1] = L.a[own] - hi;
      ob_[1] = L.b[own] - hi;
    }
    e_[0] = L.E0 - lo;
    e_[1] = L.E0 - hi;
  }

  void eval(std::span<const double> th, std::span<double> lam, std::span<double> w) const {
    const std::size_t m = th.size();
    std::array<double, 15> xl, xh, pl, ph, jac;
    std::array<double, 15> local;
    std::array<int, 15> side;
    std::size_t nl = 0, nh = 0;
    for (std::size_t i = 0; i < m; ++i) {
      double s = std::sin(th[i]), co = std::cos(th[i]);
      jac[i] = 2.0 * len_ * s * co;
      if (s * s <= 0.5) {
        double d = len_ * s * s;
        lam[i] = lo_ + d;
        local[i] = d;
        side[i] = 0;
        xl[nl++] = d;
      } else {
        double d = len_ * co * co;
        lam[i] = hi_ - d;
        local[i] = -d;
        side[i] = 1;
        xh[nh++] = -d;
      }
    }
    kernels::real_ratio_product(std::span<const double>(xl.data(), nl), {la_, lb_, lc_},
                                std::span<double>(pl.data(), nl));
    kernels::real_ratio_product(std::span<const double>(xh.data(), nh), {ha_, hb_, hc_},
                                std::span<double>(ph.data(), nh));
    std::size_t il = 0, ih = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const int sd = side[i];
      const double x = local[i];
      double f = jac[i];
      if (own_ >= 0) f /= std::sqrt(std::fabs(x - oa_[sd])) * std::sqrt(std::fabs(x - ob_[sd]));
      f *= sd == 0 ? pl[il++] : ph[ih++];
      w[i] = with_e0_ ? f / (2.0 * std::sqrt(std::fabs(x - e_[sd]))) : f;
    }
  }

 private:
  double lo_, hi_, len_;
  int own_;
  bool with_e0_;
  std::vector<double> la_, lb_, lc_, ha_, hb_, hc_;
  double oa_[2] = {0, 0}, ob_[2] = {0, 0}, e_[2] = {0, 0};
};

}  // namespace gapspec::detail
