#pragma once

#include "collision/linearized.hpp"
#include "core/burnett.hpp"

namespace kinslab {

struct PinvResult {
    DistFn x;
    double discarded_null_norm = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// Solve L x = P_perp rhs with x in N-perp. BGK returns P_perp rhs directly;
// cutoff kernels use nu-preconditioned conjugate gradients on N-perp.
PinvResult pseudo_inverse(const LinearizedCollision& L, const DistFn& rhs,
                          double tol = 1e-10, int max_iter = 10000);

struct TransportCoefficients {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double kappa1_cross = 0.0;  // isotropy check from the (2,3) component
};

TransportCoefficients transport_coefficients(const LinearizedCollision& L,
                                             const BurnettSet& bs);

}  // namespace kinslab
