#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gapspec/branch.hpp"
#include "gapspec/herglotz.hpp"

namespace gapspec {

struct Gap {
  double a = 0, b = 0;
  double length() const { return b - a; }
};

// Ratio sequence l_n, n >= 1.
struct EllRule {
  enum class Kind { List, Geometric, Power };
  Kind kind = Kind::Geometric;
  std::vector<double> values;  // List
  double l1 = 0.25, q = 0.25;  // Geometric: l_n = l1 q^(n-1)
  double c = 1, r = 4;         // Power: l_n = c r^(-n)

  double operator()(int n) const;
  // Number of terms (infinite rules report -1).
  int length() const { return kind == Kind::List ? static_cast<int>(values.size()) : -1; }
  // Sum of all terms; exact for the closed-form rules.
  double sum() const;
  std::string describe() const;
};

// Gaps n >= first_index of the accumulating system b_{n+1} = l_n b_n,
// a_n = b_{n+1}/(1 - l_n); b_first is b at n = first_index.
struct DenjoyTail {
  double b1 = 1;
  EllRule ell;
  int first_index = 1;
  double b_first = 1;

  double accumulation_point() const { return 0.0; }
  // Calls f(n, gap) for tail gaps while they stay representable and above
  // `floor`; returns the upper edge of the region not visited.
  template <class F>
  double for_each_gap(double floor, F&& f) const;
  double gap_length_sum() const;
};

struct GapSet {
  double E0 = 0;
  std::vector<Gap> gaps;  // ascending, disjoint
  std::optional<DenjoyTail> tail;
  std::optional<double> cap;  // compact variant: E is contained in [E0, cap]

  std::size_t size() const { return gaps.size(); }
};

// Closed intervals plus isolated points.
struct FiniteSetDescription {
  std::vector<std::pair<double, double>> intervals;
  std::vector<double> points;
  bool operator==(const FiniteSetDescription&) const = default;
};

struct Violation {
  int index = -1;  // 1-based gap index, or -1 for set-level issues
  std::string message;
};

namespace sets {

std::vector<Violation> validate(const GapSet& s);
// Throws InvariantViolation listing the violations.
void require_valid(const GapSet& s);

double gap_length(const GapSet& s);

// Closed-set membership with absolute slack 1e-12.
bool contains(const GapSet& s, double lambda);

// |E cap (lambda - delta, lambda + delta)| / delta, exact up to rounding.
double carleson_ratio(const GapSet& s, double lambda, double delta);
// Lebesgue measure of E inside (lo, hi).
double measure_in(const GapSet& s, double lo, double hi);

struct HomogeneityResult {
  double inf_ratio = 0;
  double witness_lambda = 0;
  double witness_delta = 0;
  std::size_t evaluated = 0;
};

std::vector<double> default_lambda_grid(const GapSet& s);
std::vector<double> default_delta_grid(const GapSet& s);
HomogeneityResult homogeneity_scan(const GapSet& s, const std::vector<double>& lambdas,
                                   const std::vector<double>& deltas);
HomogeneityResult homogeneity_scan(const GapSet& s);

// zeta = 1/(lambda0 - z) and its inverse z = lambda0 - 1/zeta.
struct Compactified {
  GapSet set;
  double lambda0 = 0;
  cplx zeta(cplx z) const { return 1.0 / (lambda0 - z); }
  cplx z_of(cplx zeta) const { return lambda0 - 1.0 / zeta; }
};

Compactified compactify(const GapSet& s, double lambda0);
SpectralMeasure pullback_measure(const SpectralMeasure& mu, double lambda0);
FiniteSetDescription essential_closure(const FiniteSetDescription& d);

}  // namespace sets

template <class F>
double DenjoyTail::for_each_gap(double floor, F&& f) const {
  double b = b_first;
  int n = first_index;
  while (b > floor && b > 1e-300) {
    double l = ell(n);
    double bn = l * b;
    double a = bn / (1.0 - l);
    if (!(a > 0) || !(a < b)) break;
    f(n, Gap{a, b});
    b = bn;
    ++n;
    if (ell.length() >= 0 && n > ell.length()) return 0.0;
  }
  return b;
}

}  // namespace gapspec
