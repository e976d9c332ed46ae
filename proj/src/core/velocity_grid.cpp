#include "core/velocity_grid.hpp"

#include <cmath>

namespace kinslab {

VelocityGrid::VelocityGrid(double extent, int resolution)
    : extent_(extent), n_(resolution) {
    if (resolution < 8)
        throw std::invalid_argument("velocity grid: resolution must be >= 8");
    if (resolution % 2 != 0)
        throw std::invalid_argument(
            "velocity grid: odd resolution places nodes on the v3 = 0 plane; "
            "use an even count");
    if (extent < 5.0)
        throw std::invalid_argument("velocity grid: extent must be >= 5 thermal units");

    h_ = 2.0 * extent_ / n_;
    w_ = h_ * h_ * h_;

    const int sz = size();
    for (int ax = 0; ax < 3; ++ax) reflect_[ax].resize(sz);
    for (int ix = 0; ix < n_; ++ix)
        for (int iy = 0; iy < n_; ++iy)
            for (int iz = 0; iz < n_; ++iz) {
                const int idx = index(ix, iy, iz);
                reflect_[0][idx] = index(n_ - 1 - ix, iy, iz);
                reflect_[1][idx] = index(ix, n_ - 1 - iy, iz);
                reflect_[2][idx] = index(ix, iy, n_ - 1 - iz);
            }

    octant_.reserve(sz / 8);
    for (int ix = n_ / 2; ix < n_; ++ix)
        for (int iy = n_ / 2; iy < n_; ++iy)
            for (int iz = n_ / 2; iz < n_; ++iz) octant_.push_back(index(ix, iy, iz));
}

int VelocityGrid::reflect_mask(int mask, int idx) const {
    int r = idx;
    if (mask & 1) r = reflect_[0][r];
    if (mask & 2) r = reflect_[1][r];
    if (mask & 4) r = reflect_[2][r];
    return r;
}

double dot(const VelocityGrid& grid, const DistFn& f, const DistFn& g) {
    double s = 0.0;
    for (size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
    return s * grid.weight();
}

double dot_weighted(const VelocityGrid& grid, const DistFn& f, const DistFn& g,
                    const DistFn& weight) {
    double s = 0.0;
    for (size_t i = 0; i < f.size(); ++i) s += f[i] * g[i] * weight[i];
    return s * grid.weight();
}

double norm2(const VelocityGrid& grid, const DistFn& f) {
    return std::sqrt(dot(grid, f, f));
}

void axpy(double a, const DistFn& x, DistFn& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

DistFn scaled(const DistFn& x, double a) {
    DistFn r(x.size());
    for (size_t i = 0; i < x.size(); ++i) r[i] = a * x[i];
    return r;
}

ParityComponents parity_split(const VelocityGrid& grid, const DistFn& g) {
    ParityComponents pc;
    const auto& oct = grid.octant();
    for (int s = 0; s < 8; ++s) {
        pc.comp[s].resize(oct.size());
        for (size_t p = 0; p < oct.size(); ++p) {
            double acc = 0.0;
            for (int r = 0; r < 8; ++r)
                acc += parity_sign(s, r) * g[grid.reflect_mask(r, oct[p])];
            pc.comp[s][p] = 0.125 * acc;
        }
    }
    return pc;
}

DistFn parity_merge(const VelocityGrid& grid, const ParityComponents& pc) {
    DistFn g(grid.size(), 0.0);
    const auto& oct = grid.octant();
    for (size_t p = 0; p < oct.size(); ++p)
        for (int r = 0; r < 8; ++r) {
            double acc = 0.0;
            for (int s = 0; s < 8; ++s) acc += parity_sign(s, r) * pc.comp[s][p];
            g[grid.reflect_mask(r, oct[p])] = acc;
        }
    return g;
}

}  // namespace kinslab
