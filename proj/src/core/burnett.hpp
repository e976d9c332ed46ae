#pragma once

#include <array>

#include "core/maxwellian.hpp"
#include "core/velocity_grid.hpp"

namespace kinslab {

// Burnett functions A_ij, B_i, C: the canonical N-perp tensors whose
// L^{-1} images carry viscous stress and heat flux. The centered variant
// evaluates them at v_eps = (v - u)/sqrt(theta) against sqrt(mu(v_eps)).
struct BurnettSet {
    std::array<std::array<DistFn, 3>, 3> A;  // symmetric, trace free
    std::array<DistFn, 3> B;
    DistFn C;
};

BurnettSet burnett(const VelocityGrid& grid,
                   const MacroState& state = MacroState{1.0, {0.0, 0.0, 0.0}, 1.0});

// v3-reflection of nodal values: g(v) -> g(v1, v2, -v3). An involution.
DistFn reflect(const VelocityGrid& grid, const DistFn& g);

}  // namespace kinslab
