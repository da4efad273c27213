#include <cmath>
#include <random>

#include <doctest.h>

#include "common.hpp"
#include "gapspec/errors.hpp"
#include "gapspec/herglotz.hpp"

using namespace gapspec;

TEST_CASE("validate flags bad gap lists") {
  CHECK(sets::validate(fixtures::three_gap()).empty());
  GapSet s = fixtures::three_gap();
  s.gaps[1] = {1.5, 2.5};  // overlaps gap 1
  CHECK_FALSE(sets::validate(s).empty());
  GapSet t{2.0, {{1.0, 3.0}}, {}, {}};  // gap below E0
  CHECK_FALSE(sets::validate(t).empty());
  CHECK_THROWS_AS(sets::require_valid(t), InvariantViolation);
}

TEST_CASE("gap length, membership and Carleson ratio") {
  auto s = fixtures::three_gap();
  CHECK(sets::gap_length(s) == 4.0);
  CHECK(sets::contains(s, 0.5));
  CHECK(sets::contains(s, 2.0));
  CHECK_FALSE(sets::contains(s, 1.5));
  CHECK_FALSE(sets::contains(s, -0.1));
  CHECK(sets::carleson_ratio(s, 0.5, 1.0) == doctest::Approx(1.0));
  CHECK(sets::carleson_ratio(s, 4.5, 0.5) == doctest::Approx(2.0));
  CHECK(sets::carleson_ratio(s, 2.0, 2.0) == doctest::Approx(1.0));
  CHECK_THROWS(sets::carleson_ratio(s, 1.5, 1.0));
  CHECK(sets::measure_in(s, -1, 10) == doctest::Approx(6.0));
  auto h = sets::homogeneity_scan(fixtures::one_gap());
  CHECK(h.inf_ratio > 0.99);
  CHECK(h.evaluated > 0);
}

TEST_CASE("compactify maps edges through zeta = 1/(lambda0 - z)") {
  auto c = sets::compactify(fixtures::one_gap(), -1.0);
  CHECK(c.set.E0 == doctest::Approx(-1.0));
  REQUIRE(c.set.gaps.size() == 1);
  CHECK(c.set.gaps[0].a == doctest::Approx(-0.5));
  CHECK(c.set.gaps[0].b == doctest::Approx(-1.0 / 3.0));
  REQUIRE(c.set.cap);
  CHECK(*c.set.cap == 0.0);
  cplx z(0.3, 0.7);
  CHECK(std::abs(c.z_of(c.zeta(z)) - z) < 1e-15);
}

TEST_CASE("essential closure merges intervals and drops isolated points") {
  FiniteSetDescription d{{{3, 4}, {0, 1}, {1, 2}, {5, 5}}, {2.5, 7}};
  auto e = sets::essential_closure(d);
  CHECK(e.intervals == std::vector<std::pair<double, double>>{{0, 2}, {3, 4}});
  CHECK(e.points.empty());
}

TEST_CASE("g on the one-gap set matches the explicit formula") {
  auto s = fixtures::one_gap();
  auto d = fixtures::one_gap_mu();
  for (cplx z : {cplx(0.5, 0.1), cplx(1.5, 1e-3), cplx(-4, 2), cplx(30, 0.5)}) {
    cplx e = cplx(0, 1) * (z - 1.2) / (2.0 * std::sqrt(z) * std::sqrt(z - 1.0) * std::sqrt(z - 2.0));
    CHECK(std::abs(greens::g_eval(s, d, z) - e) < 1e-14 * std::abs(e));
  }
  // Real off E and increasing through the gap, with its zero at mu.
  CHECK(std::fabs(greens::g_eval(s, d, cplx(-1, 0)).imag()) == 0);
  CHECK(greens::g_eval(s, d, cplx(-1, 0)).real() > 0);
  CHECK(greens::g_eval(s, d, cplx(1.1, 0)).real() < 0);
  CHECK(greens::g_eval(s, d, cplx(1.5, 0)).real() > 0);
  CHECK(greens::g_eval(s, d, cplx(1.5, 0)).real() > greens::g_eval(s, d, cplx(1.3, 0)).real());
}

TEST_CASE("g is Herglotz and reflectionless on the three-gap set") {
  auto s = fixtures::three_gap();
  auto d = fixtures::three_gap_mu();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x(-3, 12), y(1e-6, 4);
  for (int k = 0; k < 500; ++k) CHECK(greens::g_eval(s, d, cplx(x(rng), y(rng))).imag() > 0);
  std::vector<double> lam = {0.1, 0.9, 2.5, 4.5, 8.0, 100.0};
  CHECK(greens::reflectionless_check(s, d, lam) <= 1e-12);
  for (double l : lam) CHECK(greens::xi_profile(s, d, l) == 0.5);
  // In a gap xi drops from 1 to 0 at mu.
  CHECK(greens::xi_profile(s, d, 3.5) == 1.0);
  CHECK(greens::xi_profile(s, d, 3.8) == 0.0);
  CHECK(greens::xi_profile(s, d, -1.0) == 0.0);
}

TEST_CASE("xi of g from boundary values equals the step profile") {
  auto s = fixtures::three_gap();
  auto d = fixtures::three_gap_mu();
  auto m = greens::g_evaluator(s, d);
  for (double l : {0.5, 1.1, 1.5, 2.5, 5.2, 6.0, 9.0})
    CHECK(herglotz::xi_boundary(m, l).value == doctest::Approx(greens::xi_profile(s, d, l)).epsilon(1e-6));
}

TEST_CASE("trace potential equals E0 + sum(a + b - 2 mu) and matches the y limit") {
  auto s = fixtures::three_gap();
  auto d = fixtures::three_gap_mu();
  auto t = greens::trace_potential(s, d);
  CHECK(t.value == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(t.bound == doctest::Approx(4.0));
  CHECK(std::fabs(greens::trace_limit_check(s, d, 1e5) - t.value) < 1e-5 * std::fabs(t.value) + 1e-8);
}

TEST_CASE("h is Herglotz and the divisor checks reject points outside gaps") {
  auto s = fixtures::three_gap();
  auto n = fixtures::three_gap_nu();
  for (cplx z : {cplx(0.5, 0.1), cplx(3.5, 1e-4), cplx(-5, 1)}) CHECK(greens::h_eval(s, n, z).imag() > 0);
  DirichletDivisor bad{{1.2, 2.5, 5.5}, {1, 1, 1}};
  CHECK_THROWS(greens::check_divisor(s, bad));
  NuDivisor badnu{0.5, {1.5, 3.5, 6.0}};
  CHECK_THROWS(greens::check_divisor(s, badnu));
}

TEST_CASE("compactified g agrees with the original up to the constant") {
  auto s = fixtures::one_gap();
  auto d = fixtures::one_gap_mu();
  const double l0 = -1.0;
  auto c = sets::compactify(s, l0);
  auto dt = greens::compactify_divisor(d, l0);
  const double C = greens::compact_constant(s, d, l0);
  for (cplx z : {cplx(0.5, 0.3), cplx(3.0, 1.0)}) {
    cplx gz = greens::g_eval(s, d, z);
    cplx gc = greens::g_eval_compact(c.set, dt, C, c.zeta(z));
    CHECK(std::abs(gz - gc) < 1e-12 * std::abs(gz));
  }
}
