#pragma once

#include <vector>

namespace kinslab {

// Node-based 1-D mesh on [0, xmax], optionally algebraically stretched so the
// wall (x = 0) is resolved finer than the far field.
class Mesh1D {
public:
    static Mesh1D uniform(double xmax, int n);
    // Algebraic stretch x(s) = xmax * s / (1 + b (1 - s)); b set from the
    // requested wall spacing.
    static Mesh1D stretched(double xmax, int n, double wall_dx);

    int size() const { return static_cast<int>(x_.size()); }
    double xmax() const { return x_.back(); }
    double node(int i) const { return x_[i]; }
    const std::vector<double>& nodes() const { return x_; }

    // Second-order first/second derivatives on the non-uniform mesh
    // (one-sided at the ends).
    std::vector<double> d1(const std::vector<double>& f) const;
    std::vector<double> d2(const std::vector<double>& f) const;
    double d1_at(const std::vector<double>& f, int i) const;
    double wall_gradient(const std::vector<double>& f) const;  // one-sided at x=0

    // I(x_i) = -int_{x_i}^{xmax} f dx by trapezoid from the far end; the
    // discrete inverse of the two-point difference (I_{i+1}-I_i)/dx =
    // (f_i+f_{i+1})/2.
    std::vector<double> integral_from_far(const std::vector<double>& f) const;

    double trapz(const std::vector<double>& f) const;

    // Monotone cubic (Fritsch-Carlson) interpolation; clamps beyond the ends.
    double interp(const std::vector<double>& f, double xq) const;

    // Implicit diffusion step: solve (I - dt kappa D2) w = rhs with Dirichlet
    // values at both ends already placed in rhs[0] and rhs[n-1].
    void diffuse_implicit(std::vector<double>& w, double kappa, double dt,
                          double wall_value, double far_value,
                          const std::vector<double>& source) const;

private:
    std::vector<double> x_;
};

}  // namespace kinslab
