#pragma once

#include <span>
#include <vector>

#include "gapspec/gapset.hpp"
#include "gapspec/quadrature.hpp"

namespace gapspec {

// Comb map data for a finite gap list. Theta is normalized by Theta(E0) = 0,
// so sets with E0 != 0 behave as if shifted to start at the origin; E0 records
// that shift.
struct CombData {
  double E0 = 0;
  std::vector<double> c;        // critical points, c_j in (a_j, b_j)
  std::vector<double> h;        // slit heights
  std::vector<double> h_error;  // quadrature error of each height
  std::vector<double> u;        // slit abscissae, Theta(a_j) = Theta(b_j)
  std::vector<double> band;     // integral of |m| over band k, k = 0..n-1
  double residual = 0;          // max_j |integral of m over gap j|
  int iterations = 0;
  std::size_t size() const { return c.size(); }
};

namespace comb {

// Quadrature used for every comb integral unless overridden.
inline constexpr QuadOptions kCombQuad{0.0, 1e-12, 4000};

struct SolveOptions {
  double tol = 1e-11;  // on max_j |c_hat_j - c_j| / (b_j - a_j)
  int max_iter = 60;
  QuadOptions quad = kCombQuad;
  std::vector<double> initial;  // starting c; gap midpoints when empty
};

// m(z) = i/(2 sqrt(z - E0)) prod (z - c_j)/bracket(z; a_j, b_j), the product
// of module greens with mu = c. Real z is accepted in gaps and below E0.
cplx m_comb_eval(const GapSet& s, std::span<const double> c, cplx z);

CombData solve_critical_points(const GapSet& s, const SolveOptions& opt = {});

// Theta(z) = (1/i) int_{E0}^z m along the real axis, then vertically.
// Requires Im z >= 0.
cplx theta_eval(const GapSet& s, const CombData& cd, cplx z, const QuadOptions& q = kCombQuad);
double omega_at(const GapSet& s, const CombData& cd, cplx z, const QuadOptions& q = kCombQuad);
double widom_sum(const CombData& cd);

struct SplitIntegrals {
  double left = 0;   // int_{a_j}^{c_j} m  (negative)
  double right = 0;  // int_{c_j}^{b_j} m  (positive)
};
SplitIntegrals split_integrals(const GapSet& s, const CombData& cd, std::size_t j,
                               const QuadOptions& q = kCombQuad);

// Real-axis inverse of Theta on the closure of E: the point x with
// Theta(x) = t for t >= 0. Slit bases are ambiguous and raise DomainError
// unless `side` picks the lower (-1) or upper (+1) gap edge.
double theta_inverse(const GapSet& s, const CombData& cd, double t, int side = 0);

struct PhiOptions {
  double tol = 1e-10;  // relative mismatch of slit bases and heights
  int max_iter = 40;
  double fd_step = 1e-7;
  // The mismatch is differenced, so the inner solves run tighter than usual.
  SolveOptions solve{1e-13, 60, QuadOptions{0.0, 1e-13, 4000}, {}};
};

// phi_N = Theta_N^{-1} o Theta for the comb that keeps only the slits of
// `subset` (0-based gap indices of `full`). The reduced set E^N has the same
// E0 and is found by matching its slit bases and heights to those of `full`.
class PhiMap {
 public:
  PhiMap(const GapSet& full, std::vector<int> subset, const PhiOptions& opt = {});

  // x must lie in the closure of E. Gap edges of subset gaps map to the
  // corresponding edges of E^N.
  double operator()(double x) const;
  double lower_edge_image(int j) const;  // phi_N(a_j)
  double upper_edge_image(int j) const;  // phi_N(b_j)

  const GapSet& full() const { return full_; }
  const GapSet& reduced() const { return reduced_; }
  const CombData& full_comb() const { return full_cd_; }
  const CombData& reduced_comb() const { return reduced_cd_; }
  const std::vector<int>& subset() const { return subset_; }
  double mismatch() const { return mismatch_; }
  int iterations() const { return iterations_; }

 private:
  GapSet full_, reduced_;
  CombData full_cd_, reduced_cd_;
  std::vector<int> subset_;
  double mismatch_ = 0;
  int iterations_ = 0;
};

}  // namespace comb
}  // namespace gapspec
