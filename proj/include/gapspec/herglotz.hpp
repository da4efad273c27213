#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gapspec/branch.hpp"
#include "gapspec/quadrature.hpp"

namespace gapspec {

// Piece of an absolutely continuous measure on [l, u]. The exponents flag
// endpoint behaviour of the density: 0 (bounded), -1/2 (inverse square root
// blowup) or +1/2 (square root vanishing).
struct AcPiece {
  double l = 0, u = 1;
  std::function<double(double)> density;
  double left_exp = 0, right_exp = 0;
  std::string form;  // serialized name, e.g. "const:1" or "product-g"
};

struct PointMass {
  double loc = 0;
  double weight = 0;
};

struct SpectralMeasure {
  std::vector<AcPiece> ac;
  std::vector<PointMass> pp;

  // Throws InvariantViolation; densities are sampled at a few interior points.
  void validate() const;
};

struct NevanlinnaRep {
  double c = 0;
  double d = 0;
  SpectralMeasure measure;
};

// Boundary behaviour a caller may rely on when building xi profiles.
struct EvaluatorTraits {
  bool unbounded_support = false;  // xi = 1/2 on an unbounded part of R
  bool linear_term = false;        // d != 0
};

// Herglotz function given on the open upper half-plane; extended to the lower
// half-plane by m(conj z) = conj m(z).
class HerglotzEvaluator {
 public:
  using Fn = std::function<cplx(cplx)>;

  struct ClosedForm {
    std::string name;
    Fn f;
    EvaluatorTraits traits;
  };

  static HerglotzEvaluator representation(NevanlinnaRep rep, QuadOptions quad = {1e-8, 1e-10, 4000});
  static HerglotzEvaluator closed_form(std::string name, Fn f, EvaluatorTraits traits = {});

  cplx operator()(cplx z) const;
  const EvaluatorTraits& traits() const { return traits_; }
  const std::string& name() const { return name_; }
  const NevanlinnaRep* rep() const { return std::get_if<NevanlinnaRep>(&impl_); }

 private:
  std::variant<NevanlinnaRep, ClosedForm> impl_;
  QuadOptions quad_;
  EvaluatorTraits traits_;
  std::string name_;
};

namespace herglotz {

// c + d z + int dw(l) [1/(l - z) - l/(1 + l^2)].
cplx eval_representation(const NevanlinnaRep& rep, cplx z, const QuadOptions& quad = {1e-8, 1e-10, 4000});

// int dw(l)/(l - z) without the normalizing l/(1 + l^2) term.
cplx cauchy_transform(const SpectralMeasure& mu, cplx z, const QuadOptions& quad = {1e-8, 1e-10, 4000});

std::vector<double> default_eps_schedule();

// A sequence f(eps_k) extrapolated linearly in eps to eps = 0.
struct Extrapolated {
  double value = 0;
  double error = 0;
  bool monotone = true;  // false raises the non-monotone warning
  std::vector<double> samples;
};

Extrapolated richardson(std::span<const double> eps, std::span<const double> f);

Extrapolated stieltjes_invert(const HerglotzEvaluator& m, double l1, double l2,
                              std::span<const double> eps = {});

struct DensityEstimate {
  bool singular = false;  // value diverges across the schedule
  double value = 0;
  double error = 0;
};

DensityEstimate ac_density(const HerglotzEvaluator& m, double lambda, std::span<const double> eps = {});
Extrapolated point_mass(const HerglotzEvaluator& m, double lambda, std::span<const double> eps = {});
Extrapolated xi_boundary(const HerglotzEvaluator& m, double lambda, std::span<const double> eps = {});

// Piecewise constant xi: values[k] on [breaks[k], breaks[k+1]) with the last
// piece running to `cutoff`; beyond the cutoff xi equals tail_value.
struct XiProfile {
  std::vector<double> breaks;
  std::vector<double> values;
  double cutoff = 0;
  std::optional<double> tail_value;
};

// Reconstruction of ln m(z) from k = Re ln m(i) and the xi profile.
cplx exp_representation_roundtrip(const HerglotzEvaluator& m, const XiProfile& xi, cplx z);

}  // namespace herglotz
}  // namespace gapspec
