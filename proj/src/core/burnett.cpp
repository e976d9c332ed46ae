#include "core/burnett.hpp"

#include <cmath>

namespace kinslab {

BurnettSet burnett(const VelocityGrid& grid, const MacroState& state) {
    BurnettSet bs;
    const double ist = 1.0 / std::sqrt(state.theta);
    const double pref = 1.0 / std::pow(2.0 * M_PI, 0.75);

    for (int a = 0; a < 3; ++a) {
        bs.B[a].resize(grid.size());
        for (int b = 0; b < 3; ++b) bs.A[a][b].resize(grid.size());
    }
    bs.C.resize(grid.size());

    for (int i = 0; i < grid.size(); ++i) {
        const double w[3] = {(grid.v1(i) - state.u[0]) * ist,
                             (grid.v2(i) - state.u[1]) * ist,
                             (grid.v3(i) - state.u[2]) * ist};
        const double wsq = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
        const double sq = pref * std::exp(-wsq / 4.0);  // sqrt(mu(w))
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                double val = w[a] * w[b];
                if (a == b) val -= wsq / 3.0;
                bs.A[a][b][i] = val * sq;
            }
            bs.B[a][i] = 0.5 * (wsq - 5.0) * w[a] * sq;
        }
        bs.C[i] = (0.25 * wsq * wsq - 2.5 * wsq + 3.75) * sq;
    }
    return bs;
}

DistFn reflect(const VelocityGrid& grid, const DistFn& g) {
    DistFn out(g.size());
    for (int i = 0; i < grid.size(); ++i) out[i] = g[grid.reflect_v3(i)];
    return out;
}

}  // namespace kinslab
