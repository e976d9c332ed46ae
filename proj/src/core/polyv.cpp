#include "core/polyv.hpp"

#include <cmath>

namespace kinslab {

namespace {
double double_factorial(int n) {
    double r = 1.0;
    for (int k = n; k > 1; k -= 2) r *= k;
    return r;
}
}  // namespace

PolyV PolyV::constant(double c) { return monomial(0, 0, 0, c); }

PolyV PolyV::monomial(int e1, int e2, int e3, double c) {
    PolyV p;
    p.add(e1, e2, e3, c);
    return p;
}

PolyV& PolyV::add(int e1, int e2, int e3, double c) {
    if (c != 0.0) {
        auto key = std::array<int, 3>{e1, e2, e3};
        terms_[key] += c;
        if (terms_[key] == 0.0) terms_.erase(key);
    }
    return *this;
}

PolyV PolyV::operator+(const PolyV& o) const {
    PolyV r = *this;
    for (const auto& [k, c] : o.terms_) r.add(k[0], k[1], k[2], c);
    return r;
}

PolyV PolyV::operator-(const PolyV& o) const {
    PolyV r = *this;
    for (const auto& [k, c] : o.terms_) r.add(k[0], k[1], k[2], -c);
    return r;
}

PolyV PolyV::operator*(const PolyV& o) const {
    PolyV r;
    for (const auto& [a, ca] : terms_)
        for (const auto& [b, cb] : o.terms_)
            r.add(a[0] + b[0], a[1] + b[1], a[2] + b[2], ca * cb);
    return r;
}

PolyV PolyV::scaled(double s) const {
    PolyV r;
    if (s == 0.0) return r;
    for (const auto& [k, c] : terms_) r.add(k[0], k[1], k[2], c * s);
    return r;
}

double PolyV::gaussian_moment() const {
    double acc = 0.0;
    for (const auto& [k, c] : terms_) {
        if (k[0] % 2 || k[1] % 2 || k[2] % 2) continue;
        acc += c * double_factorial(k[0] - 1) * double_factorial(k[1] - 1) *
               double_factorial(k[2] - 1);
    }
    return acc;
}

DistFn PolyV::eval_times_sqmu(const VelocityGrid& grid) const {
    DistFn out(grid.size(), 0.0);
    const double pref = 1.0 / std::pow(2.0 * M_PI, 0.75);
    for (int i = 0; i < grid.size(); ++i) {
        const double v1 = grid.v1(i), v2 = grid.v2(i), v3 = grid.v3(i);
        double val = 0.0;
        for (const auto& [k, c] : terms_)
            val += c * std::pow(v1, k[0]) * std::pow(v2, k[1]) * std::pow(v3, k[2]);
        out[i] = val * pref * std::exp(-0.25 * grid.vsq(i));
    }
    return out;
}

namespace polys {

PolyV vsq() {
    PolyV p;
    p.add(2, 0, 0, 1.0).add(0, 2, 0, 1.0).add(0, 0, 2, 1.0);
    return p;
}

PolyV chi(int j) {
    switch (j) {
        case 0: return PolyV::constant(1.0);
        case 1: return PolyV::monomial(1, 0, 0);
        case 2: return PolyV::monomial(0, 1, 0);
        case 3: return PolyV::monomial(0, 0, 1);
        case 4: return vsq().scaled(0.5) + PolyV::constant(-1.5);
        default: return PolyV();
    }
}

PolyV burnett_A(int i, int j) {
    PolyV p;
    int e[3] = {0, 0, 0};
    e[i]++;
    e[j]++;
    p.add(e[0], e[1], e[2], 1.0);
    if (i == j) p = p - vsq().scaled(1.0 / 3.0);
    return p;
}

PolyV burnett_B(int i) {
    int e[3] = {0, 0, 0};
    e[i] = 1;
    PolyV vi = PolyV::monomial(e[0], e[1], e[2]);
    return (vsq() + PolyV::constant(-5.0)).scaled(0.5) * vi;
}

PolyV burnett_C() {
    return vsq() * vsq().scaled(0.25) + vsq().scaled(-2.5) + PolyV::constant(3.75);
}

}  // namespace polys

PolyV project_perp_exact(const PolyV& p) {
    // Null basis 1, v_i, (|v|^2-3)/2 with Gram diag(1,1,1,1,3/2).
    PolyV r = p;
    for (int j = 0; j < 5; ++j) {
        PolyV c = polys::chi(j);
        const double gram = (j == 4) ? 1.5 : 1.0;
        const double coeff = p.bracket(c) / gram;
        r = r - c.scaled(coeff);
    }
    return r;
}

}  // namespace kinslab
