#pragma once

#include "collision/kernel.hpp"
#include "collision/linearized.hpp"
#include "core/burnett.hpp"
#include "core/maxwellian.hpp"
#include "core/velocity_grid.hpp"

namespace kinslab {

// Plain moments of a fluctuation g against (sqrt(mu), v sqrt(mu),
// (|v|^2-3)/2 sqrt(mu)); theta carries the 2/3 normalization.
MacroState fluctuation_moments(const VelocityGrid& grid, const DistFn& g);

// Closed form A : u_f (x) u_g + B . (u_f th_g + u_g th_f) + C th_f th_g.
// This is L^{-1}{Gamma(Pf,Pg) + Gamma(Pg,Pf)} for infinitesimal Maxwellians.
DistFn burnett_quadratic(const BurnettSet& bs, const MacroState& f, const MacroState& g);

// Symmetrized BGK collision bilinear form: the quadratic coefficient of the
// local-Maxwellian expansion M[mu + e sqrt(mu) g]. Depends on the arguments
// only through their macroscopic moments, so any microscopic argument gives
// zero. Orthogonal to the null space in the continuum.
DistFn gamma_bgk(const VelocityGrid& grid, const MacroState& mf, const MacroState& mg);

// Entry point used by the hierarchy: symmetrized bilinear form for the
// operator's kernel. Cutoff kernels evaluate the collision integral directly
// (small grids only; off-grid points by trilinear interpolation).
DistFn gamma_bilinear(const LinearizedCollision& L, const DistFn& f, const DistFn& g);

// Variant around a local Maxwellian state, via polarized second differences
// of the analytic Maxwellian map (accuracy ~ delta^2 + roundoff/delta^2).
DistFn gamma_bilinear_local(const VelocityGrid& grid, const MacroState& local_state,
                            const DistFn& f, const DistFn& g, double delta = 1e-3);

DistFn gamma_cutoff_direct(const CollisionKernel& kernel, const VelocityGrid& grid,
                           const DistFn& f, const DistFn& g, int sphere_polar = 8,
                           int sphere_azimuth = 16);

}  // namespace kinslab
