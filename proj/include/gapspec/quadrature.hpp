#pragma once

// Globally adaptive Gauss-Kronrod (7/15 point) quadrature.
//
// Integrands are either scalar callables x -> T or batch callables
// (span<const double> x, span<T> out) -> void that fill all 15 nodes of a
// panel at once; the latter lets gap-product integrands use the vector
// kernels. T may be double, std::complex<double> or an Eigen vector.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

namespace gapspec {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_panels = 4000;
};

template <class T>
struct Quad {
  T value{};
  double error = 0;
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights attached to kXgk[1], kXgk[3], kXgk[5], kXgk[7].
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double qnorm(double v) { return std::fabs(v); }
inline double qnorm(const std::complex<double>& v) { return std::abs(v); }
template <class Derived>
double qnorm(const Eigen::MatrixBase<Derived>& v) {
  return v.size() ? v.template lpNorm<Eigen::Infinity>() : 0.0;
}

inline double zero_like(double) { return 0.0; }
inline std::complex<double> zero_like(const std::complex<double>&) { return {}; }
inline Eigen::VectorXd zero_like(const Eigen::VectorXd& v) { return Eigen::VectorXd::Zero(v.size()); }

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class BatchF>
Panel<T> gk15(BatchF& f, double a, double b, std::vector<T>& buf) {
  std::array<double, 15> x;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < 7; ++i) {
    x[2 * i] = c - h * kXgk[i];
    x[2 * i + 1] = c + h * kXgk[i];
  }
  x[14] = c;
  f(std::span<const double>(x), std::span<T>(buf.data(), 15));
  T k = buf[14] * kWgk[7];
  T g = buf[14] * kWg[3];
  for (int i = 0; i < 7; ++i) {
    T pair = buf[2 * i] + buf[2 * i + 1];
    k = k + pair * kWgk[i];
    if (i % 2 == 1) g = g + pair * kWg[i / 2];
  }
  k = k * h;
  g = g * h;
  double err = qnorm(T(k - g));
  return {a, b, k, err};
}

}  // namespace detail

// Integrate a batch integrand over the union of consecutive intervals
// [pts[0],pts[1]], [pts[1],pts[2]], ...
template <class T, class BatchF>
Quad<T> integrate_batch(BatchF&& f, std::span<const double> pts, const QuadOptions& opt = {}) {
  Quad<T> out;
  std::vector<T> buf(15);
  std::priority_queue<detail::Panel<T>> heap;
  bool first = true;
  T total{};
  double err = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i + 1] > pts[i])) continue;
    auto p = detail::gk15<T>(f, pts[i], pts[i + 1], buf);
    out.evaluations += 15;
    if (first) {
      total = detail::zero_like(p.value);
      first = false;
    }
    total = total + p.value;
    err += p.error;
    heap.push(std::move(p));
  }
  if (first) {
    out.value = T{};
    return out;
  }
  int panels = static_cast<int>(heap.size());
  while (err > std::max(opt.abs_tol, opt.rel_tol * detail::qnorm(total))) {
    if (panels >= opt.max_panels) {
      out.converged = false;
      break;
    }
    auto worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel can no longer be split in floating point.
      out.converged = false;
      heap.push(std::move(worst));
      break;
    }
    auto l = detail::gk15<T>(f, worst.a, mid, buf);
    auto r = detail::gk15<T>(f, mid, worst.b, buf);
    out.evaluations += 30;
    total = total - worst.value + l.value + r.value;
    err += l.error + r.error - worst.error;
    heap.push(std::move(l));
    heap.push(std::move(r));
    ++panels;
  }
  // Resum to shed accumulated cancellation from the running total.
  T sum = detail::zero_like(total);
  double esum = 0;
  while (!heap.empty()) {
    sum = sum + heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  out.value = sum;
  out.error = esum;
  return out;
}

template <class T, class BatchF>
Quad<T> integrate_batch(BatchF&& f, double a, double b, const QuadOptions& opt = {}) {
  const double pts[2] = {a, b};
  return integrate_batch<T>(std::forward<BatchF>(f), std::span<const double>(pts, 2), opt);
}

template <class F>
auto integrate(F&& f, std::span<const double> pts, const QuadOptions& opt = {}) {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  auto batch = [&f](std::span<const double> x, std::span<T> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  };
  return integrate_batch<T>(batch, pts, opt);
}

template <class F>
auto integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  const double pts[2] = {a, b};
  return integrate(std::forward<F>(f), std::span<const double>(pts, 2), opt);
}

// lambda = a + (b - a) sin^2(theta) on [0, pi/2]. Offsets from both ends are
// formed from sin^2 and cos^2 directly so they keep full relative accuracy.
struct SinSquareMap {
  double a, b;
  double x(double th) const { double s = std::sin(th); return a + (b - a) * s * s; }
  double left(double th) const { double s = std::sin(th); return (b - a) * s * s; }
  double right(double th) const { double c = std::cos(th); return (b - a) * c * c; }
  double jacobian(double th) const { return (b - a) * std::sin(2.0 * th); }
  double theta_of(double lam) const {
    double t = std::clamp((lam - a) / (b - a), 0.0, 1.0);
    return std::asin(std::sqrt(t));
  }
};

inline constexpr double kHalfPi = 1.57079632679489661923;

}  // namespace gapspec
