#include "core/maxwellian.hpp"

#include <cmath>
#include <stdexcept>

namespace kinslab {

DistFn maxwellian(const VelocityGrid& grid, const MacroState& state) {
    if (state.rho <= 0.0 || state.theta <= 0.0)
        throw std::invalid_argument("maxwellian: rho and theta must be positive");
    const double pref = state.rho / std::pow(2.0 * M_PI * state.theta, 1.5);
    const double inv2t = 1.0 / (2.0 * state.theta);
    DistFn out(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        const double d1 = grid.v1(i) - state.u[0];
        const double d2 = grid.v2(i) - state.u[1];
        const double d3 = grid.v3(i) - state.u[2];
        out[i] = pref * std::exp(-(d1 * d1 + d2 * d2 + d3 * d3) * inv2t);
    }
    return out;
}

DistFn global_maxwellian(const VelocityGrid& grid) {
    return maxwellian(grid, MacroState{1.0, {0.0, 0.0, 0.0}, 1.0});
}

DistFn sqrt_global_maxwellian(const VelocityGrid& grid) {
    DistFn mu = global_maxwellian(grid);
    for (auto& x : mu) x = std::sqrt(x);
    return mu;
}

MacroState FluidMoments::state() const {
    MacroState s;
    s.rho = rho;
    for (int d = 0; d < 3; ++d) s.u[d] = momentum[d] / rho;
    const double usq = s.u[0] * s.u[0] + s.u[1] * s.u[1] + s.u[2] * s.u[2];
    s.theta = (energy / rho - usq) / 3.0;
    return s;
}

FluidMoments fluid_moments(const VelocityGrid& grid, const DistFn& F) {
    FluidMoments m{0.0, {0.0, 0.0, 0.0}, 0.0};
    for (int i = 0; i < grid.size(); ++i) {
        const double f = F[i];
        m.rho += f;
        m.momentum[0] += grid.v1(i) * f;
        m.momentum[1] += grid.v2(i) * f;
        m.momentum[2] += grid.v3(i) * f;
        m.energy += grid.vsq(i) * f;
    }
    const double w = grid.weight();
    m.rho *= w;
    for (int d = 0; d < 3; ++d) m.momentum[d] *= w;
    m.energy *= w;
    return m;
}

DistFn discrete_maxwellian(const VelocityGrid& grid, const FluidMoments& target,
                           double tol, int max_iter) {
    if (target.rho <= 0.0)
        throw std::invalid_argument("discrete_maxwellian: nonpositive density");
    // Parameters lambda = (a, b1, b2, b3, c) of exp(a + b.v + c|v|^2).
    MacroState guess = target.state();
    if (guess.theta <= 0.0)
        throw std::invalid_argument("discrete_maxwellian: nonpositive temperature");
    double c = -1.0 / (2.0 * guess.theta);
    std::array<double, 3> b{guess.u[0] / guess.theta, guess.u[1] / guess.theta,
                            guess.u[2] / guess.theta};
    double a = std::log(guess.rho / std::pow(2.0 * M_PI * guess.theta, 1.5)) -
               (guess.u[0] * b[0] + guess.u[1] * b[1] + guess.u[2] * b[2]) * 0.5;

    DistFn M(grid.size());
    const double scale = std::max({1.0, std::fabs(target.rho), std::fabs(target.energy)});
    for (int it = 0; it < max_iter; ++it) {
        for (int i = 0; i < grid.size(); ++i)
            M[i] = std::exp(a + b[0] * grid.v1(i) + b[1] * grid.v2(i) +
                            b[2] * grid.v3(i) + c * grid.vsq(i));
        FluidMoments cur = fluid_moments(grid, M);
        double r[5] = {cur.rho - target.rho, cur.momentum[0] - target.momentum[0],
                       cur.momentum[1] - target.momentum[1],
                       cur.momentum[2] - target.momentum[2], cur.energy - target.energy};
        double rn = 0.0;
        for (double x : r) rn = std::max(rn, std::fabs(x));
        if (rn < tol * scale) return M;

        // Jacobian d(moments)/d(lambda): moments of M against the monomial
        // products; symmetric 5x5, solved by Cholesky-free Gaussian elimination.
        double J[5][5] = {};
        for (int i = 0; i < grid.size(); ++i) {
            const double m0 = M[i];
            const double p[5] = {1.0, grid.v1(i), grid.v2(i), grid.v3(i), grid.vsq(i)};
            for (int r1 = 0; r1 < 5; ++r1)
                for (int c1 = r1; c1 < 5; ++c1) J[r1][c1] += m0 * p[r1] * p[c1];
        }
        for (int r1 = 0; r1 < 5; ++r1)
            for (int c1 = 0; c1 < r1; ++c1) J[r1][c1] = J[c1][r1];
        for (int r1 = 0; r1 < 5; ++r1)
            for (int c1 = 0; c1 < 5; ++c1) J[r1][c1] *= grid.weight();

        // Solve J * delta = r.
        double aug[5][6];
        for (int r1 = 0; r1 < 5; ++r1) {
            for (int c1 = 0; c1 < 5; ++c1) aug[r1][c1] = J[r1][c1];
            aug[r1][5] = r[r1];
        }
        for (int col = 0; col < 5; ++col) {
            int piv = col;
            for (int r1 = col + 1; r1 < 5; ++r1)
                if (std::fabs(aug[r1][col]) > std::fabs(aug[piv][col])) piv = r1;
            if (std::fabs(aug[piv][col]) < 1e-300)
                throw std::runtime_error("discrete_maxwellian: singular moment Jacobian");
            if (piv != col)
                for (int c1 = col; c1 < 6; ++c1) std::swap(aug[piv][c1], aug[col][c1]);
            for (int r1 = col + 1; r1 < 5; ++r1) {
                const double f = aug[r1][col] / aug[col][col];
                for (int c1 = col; c1 < 6; ++c1) aug[r1][c1] -= f * aug[col][c1];
            }
        }
        double delta[5];
        for (int r1 = 4; r1 >= 0; --r1) {
            double s = aug[r1][5];
            for (int c1 = r1 + 1; c1 < 5; ++c1) s -= aug[r1][c1] * delta[c1];
            delta[r1] = s / aug[r1][r1];
        }
        a -= delta[0];
        for (int d = 0; d < 3; ++d) b[d] -= delta[d + 1];
        c -= delta[4];
        if (c >= 0.0) c = -1e-3;  // keep the exponent integrable
    }
    throw std::runtime_error("discrete_maxwellian: Newton iteration did not converge");
}

DistFn infinitesimal_maxwellian(const VelocityGrid& grid, const MacroState& state) {
    DistFn sq = sqrt_global_maxwellian(grid);
    DistFn out(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        const double lin = state.rho + state.u[0] * grid.v1(i) + state.u[1] * grid.v2(i) +
                           state.u[2] * grid.v3(i) + 0.5 * (grid.vsq(i) - 3.0) * state.theta;
        out[i] = lin * sq[i];
    }
    return out;
}

}  // namespace kinslab
