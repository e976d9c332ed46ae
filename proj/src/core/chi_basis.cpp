#include "core/chi_basis.hpp"

#include <cmath>
#include <stdexcept>

namespace kinslab {

namespace {

void invert5(const std::array<std::array<double, 5>, 5>& A,
             std::array<std::array<double, 5>, 5>& Ainv) {
    double aug[5][10];
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) {
            aug[r][c] = A[r][c];
            aug[r][c + 5] = (r == c) ? 1.0 : 0.0;
        }
    for (int col = 0; col < 5; ++col) {
        int piv = col;
        for (int r = col + 1; r < 5; ++r)
            if (std::fabs(aug[r][col]) > std::fabs(aug[piv][col])) piv = r;
        if (std::fabs(aug[piv][col]) < 1e-300)
            throw std::runtime_error("chi basis: singular Gram matrix");
        if (piv != col)
            for (int c = 0; c < 10; ++c) std::swap(aug[piv][c], aug[col][c]);
        const double inv = 1.0 / aug[col][col];
        for (int c = 0; c < 10; ++c) aug[col][c] *= inv;
        for (int r = 0; r < 5; ++r) {
            if (r == col) continue;
            const double f = aug[r][col];
            for (int c = 0; c < 10; ++c) aug[r][c] -= f * aug[col][c];
        }
    }
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) Ainv[r][c] = aug[r][c + 5];
}

}  // namespace

ChiBasis::ChiBasis(const VelocityGrid& grid, const MacroState& state)
    : grid_(&grid), state_(state) {
    if (state.rho <= 0.0 || state.theta <= 0.0)
        throw std::invalid_argument("chi basis: state must have rho, theta > 0");
    DistFn mu = maxwellian(grid, state);
    DistFn sq(mu.size());
    for (size_t i = 0; i < mu.size(); ++i) sq[i] = std::sqrt(mu[i]);

    const double irho = 1.0 / std::sqrt(state.rho);
    const double irt = 1.0 / std::sqrt(state.rho * state.theta);
    for (int j = 0; j < 5; ++j) chi_[j].resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        const double d1 = grid.v1(i) - state.u[0];
        const double d2 = grid.v2(i) - state.u[1];
        const double d3 = grid.v3(i) - state.u[2];
        const double esq = (d1 * d1 + d2 * d2 + d3 * d3) / (2.0 * state.theta);
        chi_[0][i] = irho * sq[i];
        chi_[1][i] = d1 * irt * sq[i];
        chi_[2][i] = d2 * irt * sq[i];
        chi_[3][i] = d3 * irt * sq[i];
        chi_[4][i] = irho * (esq - 1.5) * sq[i];
    }
    for (int r = 0; r < 5; ++r)
        for (int c = r; c < 5; ++c) {
            gram_[r][c] = dot(grid, chi_[r], chi_[c]);
            gram_[c][r] = gram_[r][c];
        }
    invert5(gram_, gram_inv_);
}

AbcMoments ChiBasis::moments(const DistFn& g) const {
    AbcMoments m;
    m.a = dot(*grid_, g, chi_[0]);
    for (int j = 0; j < 3; ++j) m.b[j] = dot(*grid_, g, chi_[j + 1]);
    m.c = (2.0 / 3.0) * dot(*grid_, g, chi_[4]);
    return m;
}

DistFn ChiBasis::project(const DistFn& g, std::array<double, 5>* coeff) const {
    std::array<double, 5> raw, c{};
    for (int j = 0; j < 5; ++j) raw[j] = dot(*grid_, g, chi_[j]);
    for (int r = 0; r < 5; ++r)
        for (int k = 0; k < 5; ++k) c[r] += gram_inv_[r][k] * raw[k];
    DistFn p(grid_->size(), 0.0);
    for (int j = 0; j < 5; ++j) axpy(c[j], chi_[j], p);
    if (coeff) *coeff = c;
    return p;
}

DistFn ChiBasis::project_perp(const DistFn& g) const {
    DistFn p = project(g);
    DistFn out(g.size());
    for (size_t i = 0; i < g.size(); ++i) out[i] = g[i] - p[i];
    return out;
}

void ChiBasis::project_perp_inplace(DistFn& g) const {
    std::array<double, 5> raw, c{};
    for (int j = 0; j < 5; ++j) raw[j] = dot(*grid_, g, chi_[j]);
    for (int r = 0; r < 5; ++r)
        for (int k = 0; k < 5; ++k) c[r] += gram_inv_[r][k] * raw[k];
    for (int j = 0; j < 5; ++j) axpy(-c[j], chi_[j], g);
}

}  // namespace kinslab
