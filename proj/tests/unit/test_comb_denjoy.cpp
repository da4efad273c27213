#include <cmath>

#include <doctest.h>

#include "common.hpp"
#include "gapspec/comb.hpp"
#include "gapspec/denjoy.hpp"
#include "gapspec/errors.hpp"

using namespace gapspec;

// Reference values from tools/oracles.py (mpmath, 30 digits).
TEST_CASE("one-gap comb data against the mpmath oracle") {
  auto cd = comb::solve_critical_points(fixtures::one_gap());
  REQUIRE(cd.size() == 1);
  CHECK(cd.c[0] == doctest::Approx(1.4569465810444636254).epsilon(1e-13));
  CHECK(cd.h[0] == doctest::Approx(0.20787886211875439585).epsilon(1e-11));
  CHECK(cd.u[0] == doctest::Approx(1.1981402347355922074).epsilon(1e-11));
  CHECK(cd.residual < 1e-12);
  CHECK(comb::widom_sum(cd) == doctest::Approx(cd.h[0]));
}

TEST_CASE("critical points do not depend on the starting guess") {
  auto s = fixtures::three_gap();
  auto ref = comb::solve_critical_points(s);
  for (double f : {0.05, 0.3, 0.95}) {
    comb::SolveOptions opt;
    for (const auto& g : s.gaps) opt.initial.push_back(g.a + f * g.length());
    auto cd = comb::solve_critical_points(s, opt);
    for (std::size_t j = 0; j < s.size(); ++j) CHECK(std::fabs(cd.c[j] - ref.c[j]) < 1e-10 * s.gaps[j].length());
  }
}

TEST_CASE("comb invariants on the three-gap set") {
  auto s = fixtures::three_gap();
  auto cd = comb::solve_critical_points(s);
  for (std::size_t j = 0; j < s.size(); ++j) {
    CHECK(cd.c[j] > s.gaps[j].a);
    CHECK(cd.c[j] < s.gaps[j].b);
    CHECK(cd.h[j] > 0);
    if (j) CHECK(cd.u[j] > cd.u[j - 1]);
    auto sp = comb::split_integrals(s, cd, j);
    CHECK(sp.left < 0);
    CHECK(sp.right > 0);
    CHECK(std::fabs(sp.left + sp.right) < 1e-10 * sp.right);
    // Both edges of gap j sit at the slit base.
    CHECK(comb::theta_eval(s, cd, {s.gaps[j].a, 0}).real() == doctest::Approx(cd.u[j]).epsilon(1e-10));
    CHECK(comb::theta_eval(s, cd, {s.gaps[j].b, 0}).real() == doctest::Approx(cd.u[j]).epsilon(1e-10));
    CHECK(comb::theta_eval(s, cd, {cd.c[j], 0}).imag() == doctest::Approx(cd.h[j]).epsilon(1e-9));
  }
  for (double x : {0.3, 2.6, 4.4, 9.0}) {
    const double t = comb::theta_eval(s, cd, {x, 0}).real();
    CHECK(comb::theta_inverse(s, cd, t) == doctest::Approx(x).epsilon(1e-9));
  }
  CHECK_THROWS_AS(comb::theta_inverse(s, cd, cd.u[1]), DomainError);
  CHECK(comb::theta_inverse(s, cd, cd.u[1], -1) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(comb::theta_inverse(s, cd, cd.u[1], +1) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("Theta maps the upper half-plane into the comb domain") {
  auto s = fixtures::three_gap();
  auto cd = comb::solve_critical_points(s);
  for (cplx z : {cplx(0.5, 0.5), cplx(2.0, 2.0), cplx(6.0, 0.1), cplx(-3.0, 1.0)}) {
    CHECK(comb::theta_eval(s, cd, z).imag() > 0);
    CHECK(comb::omega_at(s, cd, z) > 0);
  }
}

TEST_CASE("phi map onto every slit is the identity; a single slit expands") {
  auto s = fixtures::three_gap();
  comb::PhiMap id(s, {0, 1, 2});
  CHECK(id.mismatch() < 1e-9);
  for (int j = 0; j < 3; ++j) {
    CHECK(id.lower_edge_image(j) == doctest::Approx(s.gaps[j].a).epsilon(1e-8));
    CHECK(id.upper_edge_image(j) == doctest::Approx(s.gaps[j].b).epsilon(1e-8));
  }
  comb::PhiMap one(s, {1});
  CHECK(one.upper_edge_image(1) - one.lower_edge_image(1) >= s.gaps[1].length() * (1 - 1e-8));
  CHECK(one.reduced().size() == 1);
}

TEST_CASE("Denjoy construction for l_n = 4^-n") {
  auto ds = denjoy::build({});
  CHECK(ds.listed == 26);
  CHECK(ds.b(1) == 1.0);
  CHECK(ds.b(2) == 0.25);
  CHECK(ds.a(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
  CHECK(denjoy::symmetric_interval(1.0, 0.25) == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
  for (int n = 1; n <= ds.listed; ++n) {
    CHECK(ds.band(n) == doctest::Approx(ds.a(n) - ds.b(n + 1)).epsilon(1e-12));
    CHECK(ds.gap(n) == doctest::Approx(ds.b(n) - ds.a(n)).epsilon(1e-12));
  }
  auto rc = denjoy::check_recursion(ds);
  CHECK(rc.ordered);
  CHECK(rc.worst() < 1e-15);
  CHECK(ds.ell_sum == doctest::Approx(1.0 / 3.0));
  CHECK(ds.set.tail);
  CHECK(ds.set.tail->first_index == 27);
}

TEST_CASE("Denjoy parameter errors") {
  DenjoyParams p;
  p.ell.kind = EllRule::Kind::Geometric;
  p.ell.l1 = 0.6;
  CHECK_THROWS_AS(denjoy::build(p), InvariantViolation);
  DenjoyParams q;
  q.ell.kind = EllRule::Kind::List;
  q.ell.values = {0.1, 0.2};
  q.N = 5;
  CHECK_THROWS_AS(denjoy::build(q), ConfigError);
}

TEST_CASE("point-mass lower bound against the mpmath product") {
  auto pb = denjoy::lower_bound(1.0, EllRule{});
  CHECK(pb.value == doctest::Approx(0.41489081006945059696).epsilon(1e-12));
  CHECK(pb.tail_bound < 1e-12);
  // Scales like sqrt(b1).
  CHECK(denjoy::lower_bound(4.0, EllRule{}).value == doctest::Approx(2 * pb.value).epsilon(1e-15));
}

TEST_CASE("point mass of r0 at 0: frozen schedule") {
  DenjoyParams p;
  p.N = 60;
  auto r = denjoy::point_mass_limit(denjoy::build(p));
  const double want[] = {0.42857293472058544, 0.41981838524224213, 0.41703875724657113, 0.41604373330893873,
                         0.41559108523262578};
  REQUIRE(r.values.size() == 5);
  for (int k = 0; k < 5; ++k) CHECK(r.values[k] == doctest::Approx(want[k]).epsilon(1e-9));
  CHECK(r.pass);
  // (-z) r0(z) decreases towards the limit along the schedule.
  for (int k = 1; k < 5; ++k) CHECK(r.values[k] < r.values[k - 1]);
  CHECK(r.estimate >= r.bound.value);
}

TEST_CASE("condition (c) holds on the first stages with shrinking omega(0)") {
  auto ds = denjoy::build({});
  const double omega0[] = {1.0, 0.57735026918962573, 0.2920940616809049};
  double prev = 2;
  for (int n = 1; n <= 3; ++n) {
    auto c = denjoy::check_condition_c(ds, n);
    CHECK(c.holds);
    CHECK(c.margin > 0);
    CHECK(c.omega0 == doctest::Approx(omega0[n - 1]).epsilon(1e-8));
    CHECK(c.omega0 < prev);
    prev = c.omega0;
  }
  CHECK(denjoy::omega_zero(ds, 2) == doctest::Approx(omega0[1]).epsilon(1e-12));
}

TEST_CASE("Phi converges in the tail start and its error bound holds") {
  auto s = fixtures::one_gap();
  denjoy::GlPhiOptions a, b;
  a.R = 8;
  b.R = 20;
  for (double x : {0.3, 0.7, 2.0, 5.0}) {
    auto pa = denjoy::gl_phi(s, x, a);
    auto pb = denjoy::gl_phi(s, x, b);
    CHECK(std::fabs(pa.value - pb.value) <= pa.error + pb.error);
    CHECK(pa.value == doctest::Approx(pa.phi1 + pa.phi2).epsilon(1e-14));
  }
  CHECK(denjoy::gl_phi(s, 0.0).value == 0.0);
  CHECK_THROWS_AS(denjoy::gl_phi(s, -1.0), DomainError);
  denjoy::GlPhiOptions bad;
  bad.R = 2.5;
  bad.K = 1;
  CHECK_THROWS_AS(denjoy::gl_phi(s, 1.0, bad), NumericError);
}

TEST_CASE("Phi(0+) approaches half the total gap length") {
  // The small-x limit is sum(b - a)/2, not 0.
  CHECK(denjoy::gl_phi(fixtures::one_gap(), 1e-3).value == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(denjoy::gl_phi(fixtures::three_gap(), 1e-3).value == doctest::Approx(2.0).epsilon(1e-4));
}
