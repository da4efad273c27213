#pragma once

#include "gapspec/gapset.hpp"
#include "gapspec/greens.hpp"

namespace fixtures {

// E = [0, 1] u [2, inf).
inline gapspec::GapSet one_gap() { return {0.0, {{1.0, 2.0}}, {}, {}}; }
inline gapspec::DirichletDivisor one_gap_mu() { return {{1.2}, {1}}; }

inline gapspec::GapSet three_gap() { return {0.0, {{1.0, 2.0}, {3.0, 4.0}, {5.0, 7.0}}, {}, {}}; }
inline gapspec::DirichletDivisor three_gap_mu() { return {{1.2, 3.7, 5.5}, {1, -1, 1}}; }
inline gapspec::NuDivisor three_gap_nu() { return {-1.0, {1.5, 3.5, 6.0}}; }

}  // namespace fixtures
