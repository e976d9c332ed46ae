#pragma once

#include <array>

#include "core/velocity_grid.hpp"

namespace kinslab {

// Macroscopic state. Used both for perturbations (rho, u, theta around 0,0,0)
// and for absolute states (rho, theta > 0), depending on context.
struct MacroState {
    double rho = 0.0;
    std::array<double, 3> u = {0.0, 0.0, 0.0};
    double theta = 0.0;
};

inline MacroState operator+(const MacroState& a, const MacroState& b) {
    return {a.rho + b.rho,
            {a.u[0] + b.u[0], a.u[1] + b.u[1], a.u[2] + b.u[2]},
            a.theta + b.theta};
}
inline MacroState operator*(double s, const MacroState& a) {
    return {s * a.rho, {s * a.u[0], s * a.u[1], s * a.u[2]}, s * a.theta};
}

// Pointwise Maxwellian mu_{rho,u,theta}(v) on the grid nodes.
DistFn maxwellian(const VelocityGrid& grid, const MacroState& state);

// Global Maxwellian mu = maxwellian(1, 0, 1) and its square root.
DistFn global_maxwellian(const VelocityGrid& grid);
DistFn sqrt_global_maxwellian(const VelocityGrid& grid);

// Discrete moments of an absolute distribution F: returns (rho, rho*u, energy
// density = int |v|^2 F).
struct FluidMoments {
    double rho;
    std::array<double, 3> momentum;
    double energy;

    MacroState state() const;
};

FluidMoments fluid_moments(const VelocityGrid& grid, const DistFn& F);

// Discrete Maxwellian exp(a + b.v + c|v|^2) whose *grid* moments equal the
// given ones (Newton iteration). This is the projection the stiff relaxation
// uses so that mass, momentum and energy are conserved to solver precision
// rather than quadrature precision.
DistFn discrete_maxwellian(const VelocityGrid& grid, const FluidMoments& target,
                           double tol = 1e-14, int max_iter = 50);

// Infinitesimal Maxwellian (rho + v.u + (|v|^2-3)/2 theta) sqrt(mu): the null
// directions of the linearized operator parameterized by a macro state.
DistFn infinitesimal_maxwellian(const VelocityGrid& grid, const MacroState& state);

}  // namespace kinslab
