#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <doctest.h>

#include "gapspec/branch.hpp"
#include "gapspec/kernels.hpp"
#include "gapspec/quadrature.hpp"
#include "gapspec/special.hpp"

using namespace gapspec;

TEST_CASE("gk15 integrates smooth and endpoint-singular integrands") {
  auto q = integrate([](double x) { return std::sin(x); }, 0.0, kPi);
  CHECK(q.converged);
  CHECK(q.value == doctest::Approx(2.0).epsilon(1e-14));

  auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {0, 1e-12, 4000});
  CHECK(std::fabs(r.value - 2.0) < 1e-9);

  auto c = integrate([](double x) { return std::exp(cplx(0, x)); }, 0.0, kPi / 2);
  CHECK(std::abs(c.value - cplx(1, 1)) < 1e-14);

  auto v = integrate(
      [](double x) {
        Eigen::VectorXd y(2);
        y << x, x * x;
        return y;
      },
      0.0, 1.0);
  CHECK(v.value(0) == doctest::Approx(0.5));
  CHECK(v.value(1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("gk15 respects break points") {
  double pts[] = {0.0, 0.3, 1.0};
  auto q = integrate([](double x) { return std::fabs(x - 0.3); }, std::span<const double>(pts), {0, 1e-14, 100});
  CHECK(q.value == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-14));
}

namespace {
struct Gaps {
  std::vector<double> a, b, c;
  kernels::GapView view() const { return {a, b, c}; }
};
Gaps random_gaps(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Gaps g;
  double x = 0.5;
  for (int k = 0; k < n; ++k) {
    x += u(rng);
    g.a.push_back(x);
    x += u(rng);
    g.b.push_back(x);
    g.c.push_back(g.a.back() + u(rng) * (g.b.back() - g.a.back()));
  }
  return g;
}
}  // namespace

TEST_CASE("ratio kernels match the direct product") {
  std::mt19937_64 rng(7);
  for (int n : {0, 1, 3, 17}) {
    auto g = random_gaps(rng, n);
    std::vector<double> x = {0.01, 0.7, 3.3, 9.5, 40.0};
    std::vector<double> out(x.size());
    kernels::real_ratio_product(x, g.view(), out);
    for (std::size_t i = 0; i < x.size(); ++i) {
      double p = 1;
      for (int k = 0; k < n; ++k) p *= std::fabs(x[i] - g.c[k]) / std::sqrt(std::fabs(x[i] - g.a[k]) * std::fabs(x[i] - g.b[k]));
      CHECK(out[i] == doctest::Approx(p).epsilon(1e-13));
    }
    std::vector<cplx> z = {{0.2, 1e-3}, {2.5, 0.5}, {-3.0, 2.0}, {100.0, 1e-9}};
    std::vector<cplx> zo(z.size());
    kernels::upper_ratio_product(z, g.view(), zo);
    for (std::size_t i = 0; i < z.size(); ++i) {
      cplx p = 1;
      for (int k = 0; k < n; ++k) p *= (z[i] - g.c[k]) / (std::sqrt(z[i] - g.a[k]) * std::sqrt(z[i] - g.b[k]));
      CHECK(std::abs(zo[i] - p) <= 1e-13 * std::abs(p));
    }
  }
}

TEST_CASE("avx2 and scalar kernels agree") {
  if (!kernels::avx2_supported()) return;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 60.0), v(1e-8, 3.0);
  for (int n : {1, 2, 5, 8, 33}) {
    auto g = random_gaps(rng, n);
    std::vector<double> x(101);
    for (auto& t : x) t = u(rng);
    std::vector<double> s(x.size()), w(x.size());
    kernels::scalar::real_ratio_product(x, g.view(), s);
    kernels::avx2::real_ratio_product(x, g.view(), w);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(w[i] == doctest::Approx(s[i]).epsilon(1e-14));

    std::vector<cplx> z(37);
    for (auto& t : z) t = {u(rng), v(rng)};
    std::vector<cplx> zs(z.size()), zw(z.size());
    kernels::scalar::upper_ratio_product(z, g.view(), zs);
    kernels::avx2::upper_ratio_product(z, g.view(), zw);
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(std::abs(zw[i] - zs[i]) <= 1e-14 * std::abs(zs[i]));
  }
}

TEST_CASE("sqrt2pi puts the cut on the positive axis") {
  CHECK(std::abs(sqrt2pi({-4, 0}) - cplx(0, 2)) == 0);
  CHECK(std::abs(sqrt2pi({4, 0}) - cplx(2, 0)) == 0);
  CHECK(std::abs(sqrt2pi({4, -1e-300}) + std::sqrt(cplx(4, -1e-300))) == 0);
  auto w = csqrt_upper(-3.0, 0.25);
  CHECK(std::abs(w - std::sqrt(cplx(-3.0, 0.25))) < 1e-15);
}

TEST_CASE("Si, Ci and the sine tail integrals against reference values") {
  CHECK(special::si(1.0) == doctest::Approx(0.94608307036718301494).epsilon(1e-15));
  CHECK(special::ci(1.0) == doctest::Approx(0.33740392290096813466).epsilon(1e-15));
  // tools/oracles.py
  struct Ref {
    double s;
    double J[5];
  };
  const Ref refs[] = {{0.5, {1.0776889087518299301, 1.1366351560150189019, 1.2975891847228637516, 0, 2.3946247636168218325}},
                      {3.0, {-0.27785620120457163717, -0.07258978332137792026, -0.018230648383351356401, 0, -0.0011007561178706531245}}};
  for (const auto& r : refs) {
    double J[5];
    special::sine_tail_integrals(r.s, J);
    for (int m : {0, 1, 2, 4}) CHECK(J[m] == doctest::Approx(r.J[m]).epsilon(1e-12));
  }
}
