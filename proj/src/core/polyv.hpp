#pragma once

#include <array>
#include <map>

#include "core/velocity_grid.hpp"

namespace kinslab {

// Sparse polynomial in (v1, v2, v3). Functions of the kinetic substrate are
// written as P(v) sqrt(mu); Gaussian moments of monomials are exact double
// factorials, so every bracket used by the hierarchy closes in exact
// arithmetic.
class PolyV {
public:
    PolyV() = default;
    static PolyV constant(double c);
    static PolyV monomial(int e1, int e2, int e3, double c = 1.0);

    PolyV& add(int e1, int e2, int e3, double c);
    PolyV operator+(const PolyV& o) const;
    PolyV operator-(const PolyV& o) const;
    PolyV operator*(const PolyV& o) const;
    PolyV scaled(double s) const;

    bool empty() const { return terms_.empty(); }

    // int P(v) mu(v) dv (exact).
    double gaussian_moment() const;

    // <P sqrt(mu), Q sqrt(mu)> = int P Q mu (exact).
    double bracket(const PolyV& o) const { return ((*this) * o).gaussian_moment(); }

    // Evaluate P(v) sqrt(mu(v)) on grid nodes.
    DistFn eval_times_sqmu(const VelocityGrid& grid) const;

    const std::map<std::array<int, 3>, double>& terms() const { return terms_; }

private:
    std::map<std::array<int, 3>, double> terms_;
};

// Canonical kinetic polynomials (the sqrt(mu) factor is implicit).
namespace polys {
PolyV chi(int j);              // 1, v1, v2, v3, (|v|^2-3)/2
PolyV burnett_A(int i, int j);  // v_i v_j - delta |v|^2/3
PolyV burnett_B(int i);         // (|v|^2-5) v_i / 2
PolyV burnett_C();              // |v|^4/4 - 5|v|^2/2 + 15/4
PolyV vsq();
}  // namespace polys

// Exact orthogonal projection of P sqrt(mu) off the null space (continuum
// inner products).
PolyV project_perp_exact(const PolyV& p);

}  // namespace kinslab
