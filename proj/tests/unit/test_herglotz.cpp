#include <cmath>
#include <random>

#include <doctest.h>

#include "gapspec/errors.hpp"
#include "gapspec/herglotz.hpp"

using namespace gapspec;

namespace {
SpectralMeasure uniform01() {
  SpectralMeasure m;
  AcPiece p;
  p.l = 0;
  p.u = 1;
  p.density = [](double) { return 1.0; };
  p.form = "const:1";
  m.ac.push_back(p);
  return m;
}
}  // namespace

TEST_CASE("representation of the uniform measure matches its closed form") {
  NevanlinnaRep rep{0.5, 0.0, uniform01()};
  auto m = HerglotzEvaluator::representation(rep);
  for (cplx z : {cplx(0.3, 0.2), cplx(-2, 1), cplx(5, 0.01)}) {
    // int_0^1 dl/(l - z) = log((1 - z)/(-z)); normalizer int_0^1 l/(1+l^2) = ln2/2.
    cplx exact = 0.5 + std::log((1.0 - z) / (-z)) - 0.5 * std::log(2.0);
    CHECK(std::abs(m(z) - exact) < 1e-8);
  }
  // Conjugate symmetry.
  CHECK(std::abs(m(cplx(0.3, -0.2)) - std::conj(m(cplx(0.3, 0.2)))) < 1e-14);
}

TEST_CASE("Stieltjes inversion, point mass and xi of simple measures") {
  NevanlinnaRep rep{0, 0, uniform01()};
  rep.measure.pp.push_back({2.0, 0.75});
  auto m = HerglotzEvaluator::representation(rep);
  auto inv = herglotz::stieltjes_invert(m, 0.2, 0.8);
  CHECK(inv.value == doctest::Approx(0.6).epsilon(1e-6));
  auto pm = herglotz::point_mass(m, 2.0);
  CHECK(pm.value == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(std::fabs(herglotz::point_mass(m, 3.0).value) < 1e-6);
  auto d = herglotz::ac_density(m, 0.5);
  CHECK_FALSE(d.singular);
  CHECK(d.value == doctest::Approx(1.0).epsilon(1e-5));

  auto inv_z = HerglotzEvaluator::closed_form("-1/z", [](cplx z) { return -1.0 / z; });
  CHECK(herglotz::xi_boundary(inv_z, 2.0).value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::fabs(herglotz::xi_boundary(inv_z, -2.0).value) < 1e-6);
  CHECK(herglotz::point_mass(inv_z, 0.0).value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("richardson removes the linear term") {
  std::vector<double> eps = {1e-2, 1e-3, 1e-4};
  std::vector<double> f;
  for (double e : eps) f.push_back(3.0 + 2.0 * e);
  auto r = herglotz::richardson(eps, f);
  CHECK(r.value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.monotone);
}

TEST_CASE("Im m >= 0 in the upper half-plane for random point measures") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5), w(0.01, 2), y(1e-6, 5);
  for (int t = 0; t < 20; ++t) {
    NevanlinnaRep rep{u(rng), w(rng), {}};
    for (int k = 0; k < 5; ++k) rep.measure.pp.push_back({u(rng), w(rng)});
    auto m = HerglotzEvaluator::representation(rep);
    for (int k = 0; k < 50; ++k) CHECK(m(cplx(u(rng), y(rng))).imag() >= 0);
  }
}

TEST_CASE("measure validation rejects negative densities") {
  SpectralMeasure m = uniform01();
  m.ac[0].density = [](double x) { return x - 0.5; };
  CHECK_THROWS_AS(m.validate(), InvariantViolation);
}
