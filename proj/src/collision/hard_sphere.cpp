#include "collision/hard_sphere.hpp"

#include <cmath>
#include <cstdio>

namespace kinslab {

std::string CollisionKernel::cache_tag() const {
    if (is_bgk()) return "bgk";
    char buf[96];
    std::snprintf(buf, sizeof(buf), "cutoff_g%.6f_b%.6f_q%d", gamma, b0, gain_quadrature);
    return buf;
}

namespace {

// I0(x) * exp(-x), stable for large argument.
double bessel_i0_scaled(double x) {
    if (x < 30.0) return std::cyl_bessel_i(0.0, x) * std::exp(-x);
    const double ix = 1.0 / x;
    return (1.0 + 0.125 * ix + 0.0703125 * ix * ix) / std::sqrt(2.0 * M_PI * x);
}

// J_gamma(R, rho) = int_0^inf (R^2+r^2)^{(gamma-1)/2} exp(-(r^2+rho^2)/2) I0(r rho) r dr.
// Equals 1 for gamma = 1 (shifted 2-D Gaussian mass).
double transverse_integral(double gamma, double R, double rho, int n) {
    if (gamma == 1.0) return 1.0;
    // Integrand concentrates near r = rho with width ~1; integrate to rho + 9.
    const double upper = rho + 9.0;
    double sum = 0.0;
    const double dr = upper / n;
    for (int i = 0; i < n; ++i) {
        const double r = (i + 0.5) * dr;
        const double d = r - rho;
        const double val = std::pow(R * R + r * r, 0.5 * (gamma - 1.0)) *
                           std::exp(-0.5 * d * d) * bessel_i0_scaled(r * rho) * r;
        sum += val;
    }
    return sum * dr;
}

}  // namespace

double collision_frequency_radial(const CollisionKernel& kernel, double speed) {
    kernel.validate();
    if (kernel.is_bgk()) return 1.0;
    const double g = kernel.gamma;
    const double r = speed;
    // 2*pi*b0 * int s^gamma mu(v+s*what) reduced over the sphere:
    // nu = 2*pi*b0 * (2*pi)^{-1/2} / r * int_0^inf s^{1+gamma} [e^{-(r-s)^2/2} - e^{-(r+s)^2/2}] ds
    // with the r -> 0 limit 2*pi*b0 * sqrt(2/pi) * int s^{2+gamma} e^{-s^2/2} ds.
    const double upper = r + 10.0;
    const int n = 400;
    const double ds = upper / n;
    double acc = 0.0;
    if (r > 1e-6) {
        for (int i = 0; i < n; ++i) {
            const double s = (i + 0.5) * ds;
            const double dm = r - s, dp = r + s;
            acc += std::pow(s, 1.0 + g) *
                   (std::exp(-0.5 * dm * dm) - std::exp(-0.5 * dp * dp));
        }
        acc *= ds / (r * std::sqrt(2.0 * M_PI));
    } else {
        for (int i = 0; i < n; ++i) {
            const double s = (i + 0.5) * ds;
            acc += std::pow(s, 2.0 + g) * std::exp(-0.5 * s * s);
        }
        acc *= ds * std::sqrt(2.0 / M_PI);
    }
    return 2.0 * M_PI * kernel.b0 * acc;
}

DistFn collision_frequency_field(const CollisionKernel& kernel, const VelocityGrid& grid) {
    DistFn nu(grid.size());
    if (kernel.is_bgk()) {
        for (auto& x : nu) x = 1.0;
        return nu;
    }
    // nu depends on |v| only; cache per distinct radius to a modest tolerance.
    for (int i = 0; i < grid.size(); ++i)
        nu[i] = collision_frequency_radial(kernel, std::sqrt(grid.vsq(i)));
    return nu;
}

double cutoff_k1(const CollisionKernel& kernel, const double v[3], const double vp[3]) {
    const double dx = v[0] - vp[0], dy = v[1] - vp[1], dz = v[2] - vp[2];
    const double eta = std::sqrt(dx * dx + dy * dy + dz * dz);
    const double vsq = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const double psq = vp[0] * vp[0] + vp[1] * vp[1] + vp[2] * vp[2];
    // 2*pi*b0 |eta|^gamma sqrt(mu(v) mu(v'))
    return 2.0 * M_PI * kernel.b0 * std::pow(eta, kernel.gamma) *
           std::exp(-0.25 * (vsq + psq)) / std::pow(2.0 * M_PI, 1.5);
}

double cutoff_k2(const CollisionKernel& kernel, const double v[3], const double vp[3]) {
    const double ex = vp[0] - v[0], ey = vp[1] - v[1], ez = vp[2] - v[2];
    const double eta = std::sqrt(ex * ex + ey * ey + ez * ez);
    if (eta < 1e-14) return 0.0;  // diagonal handled by the cell average
    const double vsq = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const double psq = vp[0] * vp[0] + vp[1] * vp[1] + vp[2] * vp[2];
    const double w = (psq - vsq) / (2.0 * eta);
    const double vpar = (v[0] * ex + v[1] * ey + v[2] * ez) / eta;
    const double rho2 = std::max(vsq - vpar * vpar, 0.0);
    const double J = transverse_integral(kernel.gamma, eta, std::sqrt(rho2),
                                         kernel.gain_quadrature);
    return 4.0 * kernel.b0 / std::sqrt(2.0 * M_PI) / eta *
           std::exp(-0.125 * eta * eta - 0.5 * w * w) * J;
}

double cutoff_k2_cell_avg(const CollisionKernel& kernel, const double v[3],
                          const double vp[3], double h, int subdiv) {
    const double hs = h / subdiv;
    double acc = 0.0;
    double q[3];
    for (int a = 0; a < subdiv; ++a) {
        q[0] = vp[0] - 0.5 * h + (a + 0.5) * hs;
        for (int b = 0; b < subdiv; ++b) {
            q[1] = vp[1] - 0.5 * h + (b + 0.5) * hs;
            for (int c = 0; c < subdiv; ++c) {
                q[2] = vp[2] - 0.5 * h + (c + 0.5) * hs;
                acc += cutoff_k2(kernel, v, q);
            }
        }
    }
    return acc / (subdiv * subdiv * subdiv);
}

int cutoff_k2_subdiv(const double v[3], const double vp[3], double h, int cap) {
    const double ex = vp[0] - v[0], ey = vp[1] - v[1], ez = vp[2] - v[2];
    const double eta = std::sqrt(ex * ex + ey * ey + ez * ez);
    if (eta < 0.5 * h) return cap;  // self cell: integrable 1/|eta| singularity
    const double vpn = std::sqrt(vp[0] * vp[0] + vp[1] * vp[1] + vp[2] * vp[2]);
    const double vsq = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const double w = std::fabs(vpn * vpn - vsq) / (2.0 * eta);
    // Contribution estimate: entries whose gain part is negligible against
    // the row's sqrt(mu)-weighted scale are dropped entirely.
    const double lam_contrib =
        0.125 * eta * eta + 0.5 * w * w + 0.25 * vpn * vpn - 0.25 * vsq;
    if (lam_contrib > 30.0) return 0;
    // Base sampling of 2 with one Richardson step resolves the generic
    // kernel variation; boost near the 1/eta singularity and on the
    // high-speed energy shell where log-gradients are steep.
    int m = std::max(2, static_cast<int>(std::ceil(2.4 * h / std::max(eta, 0.4 * h))));
    const double grad = 0.25 * eta + (std::max(w, 1.0) * (vpn + w) + 0.5) / eta;
    m = std::max(m, static_cast<int>(std::ceil(0.25 * h * grad)));
    return std::min(m, cap);
}

double gaussian_cell_mass_ratio(const double c[3], double h) {
    // Average of exp(-(|q|^2 - |c|^2)/4) over the cell centered at c.
    double g = 1.0;
    for (int d = 0; d < 3; ++d) {
        const double a = 0.5 * (c[d] - 0.5 * h), b = 0.5 * (c[d] + 0.5 * h);
        g *= std::sqrt(M_PI) * (std::erf(b) - std::erf(a)) /
             (h * std::exp(-0.25 * c[d] * c[d]));
    }
    return g;
}

double cutoff_entry_cell_avg(const CollisionKernel& kernel, const double v[3],
                             const double vp[3], double h, int subdiv) {
    // Cell average of (k2 - k1)(v, q) against the sqrt(mu) profile over the
    // cell, normalized so the result multiplies nodal values of functions
    // that are smooth relative to sqrt(mu).
    if (subdiv <= 0) return 0.0;
    const double G = gaussian_cell_mass_ratio(vp, h);
    const double vsq = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const double csq = vp[0] * vp[0] + vp[1] * vp[1] + vp[2] * vp[2];
    const bool hs_fast = (kernel.gamma == 1.0);
    const double c2 = 4.0 * kernel.b0 / std::sqrt(2.0 * M_PI);
    const double c1 = kernel.b0 / std::sqrt(2.0 * M_PI);

    auto sample = [&](const double q[3]) -> double {
        const double ex = q[0] - v[0], ey = q[1] - v[1], ez = q[2] - v[2];
        const double eta2 = ex * ex + ey * ey + ez * ez;
        if (eta2 < 1e-28) return 0.0;
        const double eta = std::sqrt(eta2);
        const double qsq = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
        const double w = (qsq - vsq) / (2.0 * eta);
        const double e_gain = -0.125 * eta2 - 0.5 * w * w - 0.25 * (qsq - csq);
        const double e_loss = -0.25 * (vsq + 2.0 * qsq - csq);
        double gain = 0.0, loss = 0.0;
        if (e_gain > -60.0) {
            double k2 = c2 / eta * std::exp(e_gain);
            if (!hs_fast) {
                const double vpar = (v[0] * ex + v[1] * ey + v[2] * ez) / eta;
                const double rho2 = std::max(vsq - vpar * vpar, 0.0);
                k2 *= transverse_integral(kernel.gamma, eta, std::sqrt(rho2),
                                          kernel.gain_quadrature);
            }
            gain = k2;
        }
        if (e_loss > -60.0)
            loss = c1 * (hs_fast ? eta : std::pow(eta, kernel.gamma)) * std::exp(e_loss);
        return gain - loss;
    };

    auto avg = [&](int m) -> double {
        if (m <= 1) return sample(vp);
        const double hs = h / m;
        double num = 0.0, den = 0.0;
        double q[3];
        for (int a = 0; a < m; ++a) {
            q[0] = vp[0] - 0.5 * h + (a + 0.5) * hs;
            for (int b = 0; b < m; ++b) {
                q[1] = vp[1] - 0.5 * h + (b + 0.5) * hs;
                for (int c = 0; c < m; ++c) {
                    q[2] = vp[2] - 0.5 * h + (c + 0.5) * hs;
                    const double qsq = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
                    // sample() already carries the sqrt(mu) ratio.
                    num += sample(q);
                    den += std::exp(-0.25 * (qsq - csq));
                }
            }
        }
        return num / den;
    };

    if (subdiv <= 1) return sample(vp) * G;
    // Midpoint sub-averages converge O(m^-2); one Richardson step.
    const double a1 = avg(subdiv);
    const double a2 = avg(2 * subdiv);
    return ((4.0 * a2 - a1) / 3.0) * G;
}

KernelCellMoments cutoff_entry_moments(const CollisionKernel& kernel, const double v[3],
                                       const double c[3], double h, int subdiv) {
    const double G = gaussian_cell_mass_ratio(c, h);
    const double vsq = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const double csq = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
    const bool hs_fast = (kernel.gamma == 1.0);
    const double c2 = 4.0 * kernel.b0 / std::sqrt(2.0 * M_PI);
    const double c1 = kernel.b0 / std::sqrt(2.0 * M_PI);

    auto sample = [&](const double q[3]) -> double {
        const double ex = q[0] - v[0], ey = q[1] - v[1], ez = q[2] - v[2];
        const double eta2 = ex * ex + ey * ey + ez * ez;
        if (eta2 < 1e-28) return 0.0;
        const double eta = std::sqrt(eta2);
        const double qsq = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
        const double w = (qsq - vsq) / (2.0 * eta);
        const double e_gain = -0.125 * eta2 - 0.5 * w * w - 0.25 * (qsq - csq);
        const double e_loss = -0.25 * (vsq + 2.0 * qsq - csq);
        double gain = 0.0, loss = 0.0;
        if (e_gain > -60.0) {
            double k2 = c2 / eta * std::exp(e_gain);
            if (!hs_fast) {
                const double vpar = (v[0] * ex + v[1] * ey + v[2] * ez) / eta;
                const double rho2 = std::max(vsq - vpar * vpar, 0.0);
                k2 *= transverse_integral(kernel.gamma, eta, std::sqrt(rho2),
                                          kernel.gain_quadrature);
            }
            gain = k2;
        }
        if (e_loss > -60.0)
            loss = c1 * (hs_fast ? eta : std::pow(eta, kernel.gamma)) * std::exp(e_loss);
        return gain - loss;
    };

    auto raw = [&](int m) -> KernelCellMoments {
        KernelCellMoments M;
        const double hs = h / m;
        double den = 0.0;
        double q[3];
        for (int a = 0; a < m; ++a) {
            q[0] = c[0] - 0.5 * h + (a + 0.5) * hs;
            for (int b = 0; b < m; ++b) {
                q[1] = c[1] - 0.5 * h + (b + 0.5) * hs;
                for (int d = 0; d < m; ++d) {
                    q[2] = c[2] - 0.5 * h + (d + 0.5) * hs;
                    const double qsq = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
                    den += std::exp(-0.25 * (qsq - csq));
                    const double kk = sample(q);
                    M.mass += kk;
                    const double dd[3] = {q[0] - c[0], q[1] - c[1], q[2] - c[2]};
                    for (int t = 0; t < 3; ++t) {
                        M.dipole[t] += kk * dd[t];
                        M.second[t] += kk * dd[t] * dd[t];
                    }
                    M.cross[0] += kk * dd[0] * dd[1];
                    M.cross[1] += kk * dd[0] * dd[2];
                    M.cross[2] += kk * dd[1] * dd[2];
                }
            }
        }
        const double norm = G / den;
        M.mass *= norm;
        for (int t = 0; t < 3; ++t) {
            M.dipole[t] *= norm;
            M.second[t] *= norm;
            M.cross[t] *= norm;
        }
        return M;
    };

    const int m = std::max(subdiv, 2);  // moments need sub-samples
    KernelCellMoments A = raw(m), B = raw(2 * m), R;
    R.mass = (4.0 * B.mass - A.mass) / 3.0;
    for (int t = 0; t < 3; ++t) {
        R.dipole[t] = (4.0 * B.dipole[t] - A.dipole[t]) / 3.0;
        R.second[t] = (4.0 * B.second[t] - A.second[t]) / 3.0;
        R.cross[t] = (4.0 * B.cross[t] - A.cross[t]) / 3.0;
    }
    return R;
}

}  // namespace kinslab
