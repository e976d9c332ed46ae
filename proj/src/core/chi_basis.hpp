#pragma once

#include <array>

#include "core/maxwellian.hpp"
#include "core/velocity_grid.hpp"

namespace kinslab {

// Moments (a, b, c) of a fluctuation in the chi basis.
struct AbcMoments {
    double a = 0.0;
    std::array<double, 3> b = {0.0, 0.0, 0.0};
    double c = 0.0;
};

// The five-null-function basis chi_0..chi_4 built around a local Maxwellian
// state (defaults to the global one). Continuum Gram matrix is
// diag(1,1,1,1,3/2); the projector uses the inverse of the *discrete* Gram so
// that it is exactly idempotent and self-adjoint on the grid.
class ChiBasis {
public:
    ChiBasis(const VelocityGrid& grid, const MacroState& state);
    static ChiBasis global(const VelocityGrid& grid) {
        return ChiBasis(grid, MacroState{1.0, {0.0, 0.0, 0.0}, 1.0});
    }

    const VelocityGrid& grid() const { return *grid_; }
    const MacroState& state() const { return state_; }
    const DistFn& chi(int j) const { return chi_[j]; }
    const std::array<std::array<double, 5>, 5>& gram() const { return gram_; }

    AbcMoments moments(const DistFn& g) const;

    // Orthogonal projection onto span{chi_j}; `coeff` receives the expansion
    // coefficients in the chi basis (Gram-corrected).
    DistFn project(const DistFn& g, std::array<double, 5>* coeff = nullptr) const;
    DistFn project_perp(const DistFn& g) const;

    // In-place variant used in hot loops.
    void project_perp_inplace(DistFn& g) const;

private:
    const VelocityGrid* grid_;
    MacroState state_;
    std::array<DistFn, 5> chi_;
    std::array<std::array<double, 5>, 5> gram_;
    std::array<std::array<double, 5>, 5> gram_inv_;
};

}  // namespace kinslab
