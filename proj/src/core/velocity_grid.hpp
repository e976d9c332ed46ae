#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace kinslab {

// Cell-centered symmetric velocity grid on [-R,R]^3.
// Nodes sit at -R + (i+1/2)h per axis, so the set is closed under every
// coordinate reflection and no node lies on a v3 = 0 plane (resolution must
// be even). Weight is the midpoint-rule cell volume h^3.
class VelocityGrid {
public:
    VelocityGrid(double extent, int resolution);

    double extent() const { return extent_; }
    int resolution() const { return n_; }
    int size() const { return n_ * n_ * n_; }
    double spacing() const { return h_; }
    double weight() const { return w_; }

    double axis_coord(int i) const { return -extent_ + (i + 0.5) * h_; }

    int index(int ix, int iy, int iz) const { return (ix * n_ + iy) * n_ + iz; }
    std::array<double, 3> node(int idx) const {
        return {axis_coord(idx / (n_ * n_)), axis_coord((idx / n_) % n_), axis_coord(idx % n_)};
    }

    double v1(int idx) const { return axis_coord(idx / (n_ * n_)); }
    double v2(int idx) const { return axis_coord((idx / n_) % n_); }
    double v3(int idx) const { return axis_coord(idx % n_); }
    double vsq(int idx) const {
        const double a = v1(idx), b = v2(idx), c = v3(idx);
        return a * a + b * b + c * c;
    }

    // Index of (v1, v2, -v3); an involution.
    int reflect_v3(int idx) const { return reflect_[2][idx]; }
    // Index of the node with axis `ax` negated.
    int reflect_axis(int ax, int idx) const { return reflect_[ax][idx]; }
    // Index after negating every axis with a set bit in `mask` (bit0 = v1).
    int reflect_mask(int mask, int idx) const;

    // Positive-octant representatives (all coordinates > 0), used by the
    // parity-block form of assembled collision operators.
    const std::vector<int>& octant() const { return octant_; }

private:
    double extent_;
    int n_;
    double h_;
    double w_;
    std::array<std::vector<int>, 3> reflect_;
    std::vector<int> octant_;
};

// Nodal values of a fluctuation g (convention F = mu + eps*sqrt(mu)*g).
using DistFn = std::vector<double>;

double dot(const VelocityGrid& grid, const DistFn& f, const DistFn& g);
double dot_weighted(const VelocityGrid& grid, const DistFn& f, const DistFn& g,
                    const DistFn& weight);
double norm2(const VelocityGrid& grid, const DistFn& f);

void axpy(double a, const DistFn& x, DistFn& y);
DistFn scaled(const DistFn& x, double a);

// Parity decomposition g = sum_s g_s where g_s is even/odd per axis according
// to the bits of s (set bit = odd). Components are stored on the octant
// representatives.
struct ParityComponents {
    std::array<std::vector<double>, 8> comp;
};

ParityComponents parity_split(const VelocityGrid& grid, const DistFn& g);
DistFn parity_merge(const VelocityGrid& grid, const ParityComponents& pc);

// +1/-1 character of reflection-mask r acting on parity class s.
inline double parity_sign(int s, int r) {
    int bits = s & r;
    bits = (bits & 1) + ((bits >> 1) & 1) + ((bits >> 2) & 1);
    return (bits & 1) ? -1.0 : 1.0;
}

}  // namespace kinslab
