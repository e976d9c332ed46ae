#pragma once

#include "collision/kernel.hpp"
#include "core/velocity_grid.hpp"

namespace kinslab {

// Collision frequency nu(|v|) = 2*pi*b0 * int |v-v1|^gamma mu(v1) dv1,
// reduced to a 1-D radial quadrature. Exact closed form exists for gamma = 1
// (used as a test oracle).
double collision_frequency_radial(const CollisionKernel& kernel, double speed);
DistFn collision_frequency_field(const CollisionKernel& kernel, const VelocityGrid& grid);

// Loss kernel k1 and combined gain kernel k2 of the linearized cutoff
// operator, L g = nu g - int (k2 - k1) g dv'. k2 follows from the Carleman
// reduction of the two gain terms; for gamma = 1 the transverse integral is
// Gaussian and k2 is closed form, otherwise it is a 1-D Bessel-weighted
// radial integral evaluated per pair.
double cutoff_k1(const CollisionKernel& kernel, const double v[3], const double vp[3]);
double cutoff_k2(const CollisionKernel& kernel, const double v[3], const double vp[3]);

// k2 integrated over the grid cell centered at vp (handles the |v-vp|^-1
// singularity near the diagonal by sub-cell midpoint quadrature).
double cutoff_k2_cell_avg(const CollisionKernel& kernel, const double v[3],
                          const double vp[3], double h, int subdiv);

// Per-cell subdivision count needed to resolve the kernel's local variation
// (diagonal singularity and high-speed energy shell), capped at `cap`.
// Returns 0 when the pair contributes negligibly and can be dropped.
int cutoff_k2_subdiv(const double v[3], const double vp[3], double h, int cap);

// sqrt(mu)-ratio-weighted cell moments of (k2 - k1) over the cell at c:
// mass, dipole and per-axis second moments, Richardson-extrapolated. The
// dipole/second moments drive a quadratic-exact redistribution onto
// neighboring columns so the assembled rows are exact for operands whose
// ratio to sqrt(mu) is locally quadratic.
struct KernelCellMoments {
    double mass = 0.0;
    double dipole[3] = {0.0, 0.0, 0.0};
    double second[3] = {0.0, 0.0, 0.0};
    double cross[3] = {0.0, 0.0, 0.0};  // (01, 02, 12) mixed second moments
};

KernelCellMoments cutoff_entry_moments(const CollisionKernel& kernel, const double v[3],
                                       const double c[3], double h, int subdiv);

// Average of exp(-(|q|^2-|c|^2)/4) over the cell at c (closed form).
double gaussian_cell_mass_ratio(const double c[3], double h);

// sqrt(mu)-weighted cell average of (k2 - k1): the matrix entry used by the
// assembly, exact for functions proportional to sqrt(mu) over the cell.
double cutoff_entry_cell_avg(const CollisionKernel& kernel, const double v[3],
                             const double vp[3], double h, int subdiv);

}  // namespace kinslab
