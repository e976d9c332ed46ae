#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "core/burnett.hpp"
#include "core/chi_basis.hpp"
#include "core/maxwellian.hpp"
#include "core/velocity_grid.hpp"

using namespace kinslab;

namespace {
DistFn random_distfn(const VelocityGrid& grid, std::mt19937_64& rng) {
    // Smooth random fluctuation with Gaussian decay so nu-weighted norms exist.
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double c[10] = {u(rng), u(rng), u(rng), u(rng), u(rng),
                          u(rng), u(rng), u(rng), u(rng), u(rng)};
    DistFn sq = sqrt_global_maxwellian(grid);
    DistFn g(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        const double v1 = grid.v1(i), v2 = grid.v2(i), v3 = grid.v3(i);
        g[i] = sq[i] * (c[0] + c[1] * v1 + c[2] * v2 + c[3] * v3 + c[4] * v1 * v2 +
                        c[5] * v2 * v3 + c[6] * v1 * v3 + c[7] * v1 * v1 +
                        c[8] * v3 * v3 * v1 + c[9] * grid.vsq(i));
    }
    return g;
}
}  // namespace

TEST_CASE("grid construction and validation") {
    CHECK_THROWS(VelocityGrid(8.0, 7));   // too coarse
    CHECK_THROWS(VelocityGrid(8.0, 9));   // odd: nodes on v3 = 0
    CHECK_THROWS(VelocityGrid(4.0, 16));  // extent too small
    VelocityGrid grid(8.0, 16);
    CHECK(grid.size() == 16 * 16 * 16);
    for (int i = 0; i < grid.size(); ++i) CHECK(std::fabs(grid.v3(i)) > 1e-12);
    CHECK(grid.octant().size() == grid.size() / 8);
}

TEST_CASE("maxwellian moments at spec scale") {
    VelocityGrid grid(8.0, 24);
    DistFn mu = global_maxwellian(grid);
    FluidMoments m = fluid_moments(grid, mu);
    CHECK(std::fabs(m.rho - 1.0) < 1e-8);
    // Odd symmetry: zero up to non-paired floating-point summation order.
    for (int d = 0; d < 3; ++d) CHECK(std::fabs(m.momentum[d]) < 1e-14);
    CHECK(std::fabs(m.energy - 3.0) < 1e-8);

    // Fourth moments used downstream.
    double v4 = 0.0, v12v22 = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        v4 += grid.vsq(i) * grid.vsq(i) * mu[i];
        v12v22 += grid.v1(i) * grid.v1(i) * grid.v2(i) * grid.v2(i) * mu[i];
    }
    CHECK(std::fabs(v4 * grid.weight() - 15.0) < 1e-7);
    CHECK(std::fabs(v12v22 * grid.weight() - 1.0) < 1e-8);

    DistFn shifted = maxwellian(grid, MacroState{1.0, {0.1, 0.0, 0.0}, 1.0});
    MacroState ms = fluid_moments(grid, shifted).state();
    CHECK(std::fabs(ms.u[0] - 0.1) < 1e-7);
    CHECK_THROWS(maxwellian(grid, MacroState{-1.0, {0, 0, 0}, 1.0}));
}

TEST_CASE("discrete maxwellian matches grid moments exactly") {
    VelocityGrid grid(8.0, 16);
    FluidMoments target{1.02, {0.05, -0.02, 0.01}, 3.3};
    DistFn M = discrete_maxwellian(grid, target);
    FluidMoments got = fluid_moments(grid, M);
    CHECK(std::fabs(got.rho - target.rho) < 1e-13);
    for (int d = 0; d < 3; ++d)
        CHECK(std::fabs(got.momentum[d] - target.momentum[d]) < 1e-13);
    CHECK(std::fabs(got.energy - target.energy) < 1e-13);
}

TEST_CASE("reflection is an involution and fixes isotropic functions") {
    VelocityGrid grid(8.0, 16);
    std::mt19937_64 rng(7);
    DistFn g = random_distfn(grid, rng);
    DistFn rr = reflect(grid, reflect(grid, g));
    for (int i = 0; i < grid.size(); ++i) CHECK(rr[i] == g[i]);

    DistFn mu = global_maxwellian(grid);
    DistFn rmu = reflect(grid, mu);
    for (int i = 0; i < grid.size(); ++i) CHECK(rmu[i] == mu[i]);

    ChiBasis basis = ChiBasis::global(grid);
    DistFn rchi3 = reflect(grid, basis.chi(3));
    for (int i = 0; i < grid.size(); ++i) CHECK(rchi3[i] == -basis.chi(3)[i]);
}

TEST_CASE("chi basis gram and projection") {
    VelocityGrid grid(8.0, 24);
    ChiBasis basis = ChiBasis::global(grid);
    const auto& G = basis.gram();
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) {
            const double expect = (r == c) ? (r == 4 ? 1.5 : 1.0) : 0.0;
            CHECK(std::fabs(G[r][c] - expect) < 1e-7);
        }

    // Projection of chi_1 reads off a pure b-moment.
    AbcMoments m = basis.moments(basis.chi(1));
    CHECK(std::fabs(m.a) < 1e-9);
    CHECK(std::fabs(m.b[0] - 1.0) < 1e-7);
    CHECK(std::fabs(m.b[1]) < 1e-9);
    CHECK(std::fabs(m.c) < 1e-9);

    std::mt19937_64 rng(11);
    DistFn g = random_distfn(grid, rng);
    DistFn p1 = basis.project(g);
    DistFn p2 = basis.project(p1);
    double diff = 0.0, scale = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        diff = std::max(diff, std::fabs(p1[i] - p2[i]));
        scale = std::max(scale, std::fabs(p1[i]));
    }
    CHECK(diff < 1e-12 * std::max(1.0, scale));

    // Orthogonality of the complement against every chi.
    DistFn perp = basis.project_perp(g);
    for (int j = 0; j < 5; ++j) CHECK(std::fabs(dot(grid, perp, basis.chi(j))) < 1e-12);

    // Self-adjointness of the projector.
    DistFn g2 = random_distfn(grid, rng);
    CHECK(std::fabs(dot(grid, basis.project(g), g2) - dot(grid, g, basis.project(g2))) <
          1e-12);
}

TEST_CASE("burnett functions: orthogonality and gram identities") {
    VelocityGrid grid(8.0, 24);
    BurnettSet bs = burnett(grid);
    ChiBasis basis = ChiBasis::global(grid);

    for (int a = 0; a < 3; ++a)
        for (int j = 0; j < 5; ++j) {
            CHECK(std::fabs(dot(grid, bs.B[a], basis.chi(j))) < 1e-7);
            for (int b = 0; b < 3; ++b)
                CHECK(std::fabs(dot(grid, bs.A[a][b], basis.chi(j))) < 1e-7);
        }
    for (int j = 0; j < 5; ++j) CHECK(std::fabs(dot(grid, bs.C, basis.chi(j))) < 1e-7);

    auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    const double expect = delta(i, k) * delta(j, l) +
                                          delta(i, l) * delta(j, k) -
                                          (2.0 / 3.0) * delta(i, j) * delta(k, l);
                    CHECK(std::fabs(dot(grid, bs.A[i][j], bs.A[k][l]) - expect) < 1e-6);
                }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::fabs(dot(grid, bs.B[i], bs.B[j]) - 2.5 * delta(i, j)) < 1e-6);

    // Specific spec values.
    CHECK(std::fabs(dot(grid, bs.A[0][1], bs.A[0][1]) - 1.0) < 1e-6);
    CHECK(std::fabs(dot(grid, bs.A[0][0], bs.A[0][0]) - 4.0 / 3.0) < 1e-6);
    CHECK(std::fabs(dot(grid, bs.B[2], bs.B[2]) - 2.5) < 1e-6);
}

TEST_CASE("parity split round trip") {
    VelocityGrid grid(8.0, 12);
    std::mt19937_64 rng(3);
    DistFn g = random_distfn(grid, rng);
    ParityComponents pc = parity_split(grid, g);
    DistFn back = parity_merge(grid, pc);
    for (int i = 0; i < grid.size(); ++i) CHECK(std::fabs(back[i] - g[i]) < 1e-14);
}
