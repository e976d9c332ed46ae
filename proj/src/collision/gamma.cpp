#include "collision/gamma.hpp"

#include <cmath>
#include <stdexcept>

namespace kinslab {

MacroState fluctuation_moments(const VelocityGrid& grid, const DistFn& g) {
    MacroState m;
    const double w = grid.weight();
    const double pref = 1.0 / std::pow(2.0 * M_PI, 0.75);
    double rho = 0.0, u1 = 0.0, u2 = 0.0, u3 = 0.0, e = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        const double vsq = grid.vsq(i);
        const double sq = pref * std::exp(-0.25 * vsq);
        const double gs = g[i] * sq;
        rho += gs;
        u1 += grid.v1(i) * gs;
        u2 += grid.v2(i) * gs;
        u3 += grid.v3(i) * gs;
        e += 0.5 * (vsq - 3.0) * gs;
    }
    m.rho = rho * w;
    m.u = {u1 * w, u2 * w, u3 * w};
    m.theta = (2.0 / 3.0) * e * w;
    return m;
}

DistFn burnett_quadratic(const BurnettSet& bs, const MacroState& f, const MacroState& g) {
    DistFn out(bs.C.size(), 0.0);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) axpy(f.u[a] * g.u[b], bs.A[a][b], out);
        axpy(f.u[a] * g.theta + g.u[a] * f.theta, bs.B[a], out);
    }
    axpy(f.theta * g.theta, bs.C, out);
    return out;
}

DistFn gamma_bgk(const VelocityGrid& grid, const MacroState& mf, const MacroState& mg) {
    // sqrt(mu) * [Phi2_pol + Phi1(f) Phi1(g) / 2], the polarized quadratic
    // coefficient of M[mu + e sqrt(mu) g] / sqrt(mu).
    const double rf = mf.rho, tf = mf.theta;
    const double rg = mg.rho, tg = mg.theta;
    const double udot = mf.u[0] * mg.u[0] + mf.u[1] * mg.u[1] + mf.u[2] * mg.u[2];
    const double rt_sym = rf * tg + rg * tf;

    const double c0 = -0.5 * rf * rg + 0.75 * rt_sym + 0.75 * tf * tg;
    const double cv2 = -0.25 * rt_sym - udot / 6.0 - 0.5 * tf * tg;
    const double a_f = rf + tf, a_g = rg + tg;

    DistFn out(grid.size());
    const double pref = 1.0 / std::pow(2.0 * M_PI, 0.75);
    for (int i = 0; i < grid.size(); ++i) {
        const double v1 = grid.v1(i), v2 = grid.v2(i), v3 = grid.v3(i);
        const double vsq = v1 * v1 + v2 * v2 + v3 * v3;
        const double sq = pref * std::exp(-0.25 * vsq);
        const double vu_f = v1 * mf.u[0] + v2 * mf.u[1] + v3 * mf.u[2];
        const double vu_g = v1 * mg.u[0] + v2 * mg.u[1] + v3 * mg.u[2];
        const double phi1f = rf + vu_f + 0.5 * (vsq - 3.0) * tf;
        const double phi1g = rg + vu_g + 0.5 * (vsq - 3.0) * tg;
        const double phi2 = c0 + cv2 * vsq - 0.5 * (a_f * vu_g + a_g * vu_f);
        out[i] = sq * (phi2 + 0.5 * phi1f * phi1g);
    }
    return out;
}

DistFn gamma_bilinear(const LinearizedCollision& L, const DistFn& f, const DistFn& g) {
    if (L.is_bgk())
        return gamma_bgk(L.grid(), fluctuation_moments(L.grid(), f),
                         fluctuation_moments(L.grid(), g));
    return gamma_cutoff_direct(L.kernel(), L.grid(), f, g);
}

DistFn gamma_bilinear_local(const VelocityGrid& grid, const MacroState& local_state,
                            const DistFn& f, const DistFn& g, double delta) {
    DistFn mu_eps = maxwellian(grid, local_state);
    DistFn sq(mu_eps.size());
    for (size_t i = 0; i < mu_eps.size(); ++i) sq[i] = std::sqrt(mu_eps[i]);

    auto maxw_of = [&](const DistFn& F) {
        return maxwellian(grid, fluid_moments(grid, F).state());
    };
    DistFn M0 = maxw_of(mu_eps);

    auto quad = [&](const DistFn& h) {
        DistFn Fp(mu_eps.size()), Fm(mu_eps.size());
        for (size_t i = 0; i < mu_eps.size(); ++i) {
            Fp[i] = mu_eps[i] + delta * sq[i] * h[i];
            Fm[i] = mu_eps[i] - delta * sq[i] * h[i];
        }
        DistFn Mp = maxw_of(Fp), Mm = maxw_of(Fm);
        DistFn q(mu_eps.size());
        const double s = 0.5 / (delta * delta);
        for (size_t i = 0; i < mu_eps.size(); ++i)
            q[i] = s * (Mp[i] + Mm[i] - 2.0 * M0[i]) / sq[i];
        return q;
    };

    DistFn fg(f.size());
    for (size_t i = 0; i < f.size(); ++i) fg[i] = f[i] + g[i];
    DistFn q_fg = quad(fg), q_f = quad(f), q_g = quad(g);
    DistFn out(f.size());
    for (size_t i = 0; i < f.size(); ++i) out[i] = 0.5 * (q_fg[i] - q_f[i] - q_g[i]);
    return out;
}

DistFn gamma_cutoff_direct(const CollisionKernel& kernel, const VelocityGrid& grid,
                           const DistFn& f, const DistFn& g, int sphere_polar,
                           int sphere_azimuth) {
    kernel.validate();
    const int n = grid.size();
    if (n > 14 * 14 * 14)
        throw std::invalid_argument(
            "gamma_cutoff_direct: direct collision quadrature is intended for "
            "small validation grids");
    DistFn sq = sqrt_global_maxwellian(grid);
    DistFn Hf(n), Hg(n);
    for (int i = 0; i < n; ++i) {
        Hf[i] = sq[i] * f[i];
        Hg[i] = sq[i] * g[i];
    }

    const double R = grid.extent(), h = grid.spacing();
    auto interp = [&](const DistFn& H, const double p[3]) -> double {
        double c[3];
        int i0[3];
        for (int d = 0; d < 3; ++d) {
            const double x = (p[d] + R) / h - 0.5;
            const double fl = std::floor(x);
            i0[d] = static_cast<int>(fl);
            c[d] = x - fl;
            if (i0[d] < -1 || i0[d] > grid.resolution() - 1) return 0.0;
        }
        double acc = 0.0;
        for (int dx = 0; dx < 2; ++dx)
            for (int dy = 0; dy < 2; ++dy)
                for (int dz = 0; dz < 2; ++dz) {
                    const int ix = i0[0] + dx, iy = i0[1] + dy, iz = i0[2] + dz;
                    if (ix < 0 || iy < 0 || iz < 0 || ix >= grid.resolution() ||
                        iy >= grid.resolution() || iz >= grid.resolution())
                        continue;
                    const double wgt = (dx ? c[0] : 1 - c[0]) * (dy ? c[1] : 1 - c[1]) *
                                       (dz ? c[2] : 1 - c[2]);
                    acc += wgt * H[grid.index(ix, iy, iz)];
                }
        return acc;
    };

    // Product quadrature on the sphere.
    std::vector<std::array<double, 4>> omegas;  // (wx, wy, wz, weight)
    for (int ip = 0; ip < sphere_polar; ++ip) {
        const double ct = -1.0 + (ip + 0.5) * 2.0 / sphere_polar;
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int ia = 0; ia < sphere_azimuth; ++ia) {
            const double ph = (ia + 0.5) * 2.0 * M_PI / sphere_azimuth;
            omegas.push_back({st * std::cos(ph), st * std::sin(ph), ct,
                              (2.0 / sphere_polar) * (2.0 * M_PI / sphere_azimuth)});
        }
    }

    DistFn out(n, 0.0);
    const double w = grid.weight();
#pragma omp parallel for schedule(dynamic)
    for (int iv = 0; iv < n; ++iv) {
        const double v[3] = {grid.v1(iv), grid.v2(iv), grid.v3(iv)};
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double v1[3] = {grid.v1(j), grid.v2(j), grid.v3(j)};
            const double u[3] = {v[0] - v1[0], v[1] - v1[1], v[2] - v1[2]};
            const double unorm = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
            if (unorm < 1e-14) continue;
            const double loss_f = Hf[j], loss_g = Hg[iv];
            const double loss_g2 = Hg[j], loss_f2 = Hf[iv];
            for (const auto& om : omegas) {
                const double udotw = u[0] * om[0] + u[1] * om[1] + u[2] * om[2];
                const double bfac = kernel.b0 * std::fabs(udotw) *
                                    std::pow(unorm, kernel.gamma - 1.0) * om[3];
                const double vp[3] = {v[0] - udotw * om[0], v[1] - udotw * om[1],
                                      v[2] - udotw * om[2]};
                const double v1p[3] = {v1[0] + udotw * om[0], v1[1] + udotw * om[1],
                                       v1[2] + udotw * om[2]};
                const double Hf_v1p = interp(Hf, v1p), Hg_vp = interp(Hg, vp);
                const double Hg_v1p = interp(Hg, v1p), Hf_vp = interp(Hf, vp);
                // Symmetrized (Gamma(f,g) + Gamma(g,f)) / 2.
                acc += bfac * 0.5 *
                       ((Hf_v1p * Hg_vp - loss_f * loss_g) +
                        (Hg_v1p * Hf_vp - loss_g2 * loss_f2));
            }
        }
        out[iv] = acc * w / sq[iv];
    }
    return out;
}

}  // namespace kinslab
