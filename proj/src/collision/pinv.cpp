#include "collision/pinv.hpp"

#include <cmath>
#include <stdexcept>

#include "core/anderson.hpp"

namespace kinslab {

namespace {

// Solve the row-consistent dressed system (nu I + Kd) x = rhs restricted to
// N-perp by nu-preconditioned fixed-point iteration with Anderson mixing.
DistFn solve_dressed(const LinearizedCollision& L, const DistFn& rhs, double tol,
                     int max_iter) {
    const VelocityGrid& grid = L.grid();
    const DistFn& nu = L.nu();
    DistFn b = rhs;
    L.basis().project_perp_inplace(b);
    const double bnorm = norm2(grid, b);
    if (bnorm == 0.0) return DistFn(rhs.size(), 0.0);
    DistFn x(rhs.size(), 0.0);
    AndersonMixer mixer(4);
    for (int it = 0; it < max_iter; ++it) {
        DistFn Lx = L.apply_dressed(x);
        DistFn r(x.size());
        for (size_t i = 0; i < x.size(); ++i) r[i] = (b[i] - Lx[i]) / nu[i];
        L.basis().project_perp_inplace(r);
        const double rn = norm2(grid, r);
        x = mixer.next(x, r);
        if (rn < tol * bnorm) {
            L.basis().project_perp_inplace(x);
            return x;
        }
    }
    throw std::runtime_error("transport_coefficients: dressed solve did not converge");
}

}  // namespace

PinvResult pseudo_inverse(const LinearizedCollision& L, const DistFn& rhs, double tol,
                          int max_iter) {
    const VelocityGrid& grid = L.grid();
    PinvResult res;
    DistFn b = rhs;
    L.basis().project_perp_inplace(b);
    {
        DistFn null_part(rhs.size());
        for (size_t i = 0; i < rhs.size(); ++i) null_part[i] = rhs[i] - b[i];
        res.discarded_null_norm = norm2(grid, null_part);
    }

    if (L.is_bgk()) {
        res.x = b;  // nu == 1, L acts as identity on N-perp
        res.residual = 0.0;
        res.iterations = 1;
        return res;
    }

    const double bnorm = norm2(grid, b);
    if (bnorm == 0.0) {
        res.x.assign(rhs.size(), 0.0);
        return res;
    }

    DistFn x(rhs.size(), 0.0), r = b;
    const DistFn& nu = L.nu();
    DistFn z(rhs.size()), p(rhs.size());
    for (size_t i = 0; i < r.size(); ++i) z[i] = r[i] / nu[i];
    L.basis().project_perp_inplace(z);
    p = z;
    double rz = dot(grid, r, z);

    int it = 0;
    for (; it < max_iter; ++it) {
        DistFn Ap = L.apply(p);
        const double pAp = dot(grid, p, Ap);
        if (pAp <= 0.0)
            throw std::runtime_error(
                "pseudo_inverse: operator lost positivity on N-perp (pAp = " +
                std::to_string(pAp) + ")");
        const double alpha = rz / pAp;
        axpy(alpha, p, x);
        axpy(-alpha, Ap, r);
        const double rn = norm2(grid, r);
        if (rn <= tol * bnorm) {
            ++it;
            break;
        }
        for (size_t i = 0; i < r.size(); ++i) z[i] = r[i] / nu[i];
        if (it % 50 == 49) L.basis().project_perp_inplace(z);
        const double rz_new = dot(grid, r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    }
    DistFn check = L.apply(x);
    axpy(-1.0, b, check);
    res.residual = norm2(grid, check);
    res.iterations = it;
    if (res.residual > 100.0 * tol * bnorm)
        throw std::runtime_error(
            "pseudo_inverse: CG failed to converge; residual " +
            std::to_string(res.residual / bnorm) + " of rhs, gap estimate " +
            std::to_string(L.coercivity()));
    L.basis().project_perp_inplace(x);
    res.x = std::move(x);
    return res;
}

TransportCoefficients transport_coefficients(const LinearizedCollision& L,
                                             const BurnettSet& bs) {
    const VelocityGrid& grid = L.grid();
    TransportCoefficients tc;
    // Parity classes of the three loads (odd axes set as bits): A13 -> 5,
    // A23 -> 6, B3 -> 4. Use the row-consistent dressed quadrature for the
    // quantitative values when those blocks exist.
    const bool dressed = !L.is_bgk() && L.has_dressed(5) && L.has_dressed(6) &&
                         L.has_dressed(4);
    DistFn a13, a23, b3;
    if (dressed) {
        a13 = solve_dressed(L, bs.A[0][2], 1e-11, 4000);
        a23 = solve_dressed(L, bs.A[1][2], 1e-11, 4000);
        b3 = solve_dressed(L, bs.B[2], 1e-11, 4000);
    } else {
        a13 = pseudo_inverse(L, bs.A[0][2]).x;
        a23 = pseudo_inverse(L, bs.A[1][2]).x;
        b3 = pseudo_inverse(L, bs.B[2]).x;
    }
    // <A_hat_13, A_13> = kappa1 * <A_13, A_13>-closed-form (= 1)
    tc.kappa1 = dot(grid, a13, bs.A[0][2]);
    tc.kappa1_cross = dot(grid, a23, bs.A[1][2]);
    tc.kappa2 = 0.4 * dot(grid, b3, bs.B[2]);
    if (tc.kappa1 <= 0.0 || tc.kappa2 <= 0.0)
        throw std::runtime_error("transport_coefficients: nonpositive coefficient");
    return tc;
}

}  // namespace kinslab
