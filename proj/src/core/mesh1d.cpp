#include "core/mesh1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kinslab {

Mesh1D Mesh1D::uniform(double xmax, int n) {
    if (n < 4) throw std::invalid_argument("mesh1d: need at least 4 nodes");
    Mesh1D m;
    m.x_.resize(n);
    for (int i = 0; i < n; ++i) m.x_[i] = xmax * i / (n - 1.0);
    return m;
}

Mesh1D Mesh1D::stretched(double xmax, int n, double wall_dx) {
    if (n < 4) throw std::invalid_argument("mesh1d: need at least 4 nodes");
    const double ds = 1.0 / (n - 1.0);
    // x(s) = xmax s/(1 + b(1-s)); near the wall dx ~ xmax ds/(1+b).
    double b = xmax * ds / wall_dx - 1.0;
    if (b < 0.0) b = 0.0;
    Mesh1D m;
    m.x_.resize(n);
    for (int i = 0; i < n; ++i) {
        const double s = i * ds;
        m.x_[i] = xmax * s / (1.0 + b * (1.0 - s));
    }
    m.x_.back() = xmax;
    return m;
}

std::vector<double> Mesh1D::d1(const std::vector<double>& f) const {
    const int n = size();
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = d1_at(f, i);
    return g;
}

double Mesh1D::d1_at(const std::vector<double>& f, int i) const {
    const int n = size();
    if (i == 0) return wall_gradient(f);
    if (i == n - 1) {
        const double h1 = x_[n - 1] - x_[n - 2], h2 = x_[n - 2] - x_[n - 3];
        return (f[n - 1] * (2 * h1 + h2) / (h1 * (h1 + h2)) -
                f[n - 2] * (h1 + h2) / (h1 * h2) + f[n - 3] * h1 / (h2 * (h1 + h2)));
    }
    const double hm = x_[i] - x_[i - 1], hp = x_[i + 1] - x_[i];
    return (hm * hm * f[i + 1] + (hp * hp - hm * hm) * f[i] - hp * hp * f[i - 1]) /
           (hm * hp * (hm + hp));
}

double Mesh1D::wall_gradient(const std::vector<double>& f) const {
    const double h1 = x_[1] - x_[0], h2 = x_[2] - x_[1];
    return (-f[0] * (2 * h1 + h2) / (h1 * (h1 + h2)) + f[1] * (h1 + h2) / (h1 * h2) -
            f[2] * h1 / (h2 * (h1 + h2)));
}

std::vector<double> Mesh1D::d2(const std::vector<double>& f) const {
    const int n = size();
    std::vector<double> g(n);
    for (int i = 1; i < n - 1; ++i) {
        const double hm = x_[i] - x_[i - 1], hp = x_[i + 1] - x_[i];
        g[i] = 2.0 * (hm * f[i + 1] - (hm + hp) * f[i] + hp * f[i - 1]) /
               (hm * hp * (hm + hp));
    }
    g[0] = g[1];
    g[n - 1] = g[n - 2];
    return g;
}

std::vector<double> Mesh1D::integral_from_far(const std::vector<double>& f) const {
    const int n = size();
    std::vector<double> I(n);
    I[n - 1] = 0.0;
    for (int i = n - 2; i >= 0; --i)
        I[i] = I[i + 1] - 0.5 * (f[i] + f[i + 1]) * (x_[i + 1] - x_[i]);
    return I;
}

double Mesh1D::trapz(const std::vector<double>& f) const {
    double s = 0.0;
    for (int i = 0; i + 1 < size(); ++i)
        s += 0.5 * (f[i] + f[i + 1]) * (x_[i + 1] - x_[i]);
    return s;
}

double Mesh1D::interp(const std::vector<double>& f, double xq) const {
    const int n = size();
    if (xq <= x_.front()) return f.front();
    if (xq >= x_.back()) return f.back();
    int lo = static_cast<int>(std::upper_bound(x_.begin(), x_.end(), xq) - x_.begin()) - 1;
    lo = std::max(0, std::min(lo, n - 2));
    const double h = x_[lo + 1] - x_[lo];
    const double t = (xq - x_[lo]) / h;
    // Fritsch-Carlson slopes.
    auto secant = [&](int i) { return (f[i + 1] - f[i]) / (x_[i + 1] - x_[i]); };
    auto slope = [&](int i) -> double {
        if (i == 0) return secant(0);
        if (i == n - 1) return secant(n - 2);
        const double s0 = secant(i - 1), s1 = secant(i);
        if (s0 * s1 <= 0.0) return 0.0;
        const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
        const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
        return (w1 + w2) / (w1 / s0 + w2 / s1);
    };
    const double m0 = slope(lo) * h, m1 = slope(lo + 1) * h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f[lo] + (t3 - 2 * t2 + t) * m0 +
           (-2 * t3 + 3 * t2) * f[lo + 1] + (t3 - t2) * m1;
}

void Mesh1D::diffuse_implicit(std::vector<double>& w, double kappa, double dt,
                              double wall_value, double far_value,
                              const std::vector<double>& source) const {
    const int n = size();
    std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), r(n);
    r[0] = wall_value;
    r[n - 1] = far_value;
    for (int i = 1; i < n - 1; ++i) {
        const double hm = x_[i] - x_[i - 1], hp = x_[i + 1] - x_[i];
        const double cm = 2.0 * hp / (hm * hp * (hm + hp));
        const double cp = 2.0 * hm / (hm * hp * (hm + hp));
        a[i] = -dt * kappa * cm;
        c[i] = -dt * kappa * cp;
        b[i] = 1.0 + dt * kappa * (cm + cp);
        r[i] = w[i] + dt * source[i];
    }
    // Thomas algorithm.
    for (int i = 1; i < n; ++i) {
        const double m = a[i] / b[i - 1];
        b[i] -= m * c[i - 1];
        r[i] -= m * r[i - 1];
    }
    w[n - 1] = r[n - 1] / b[n - 1];
    for (int i = n - 2; i >= 0; --i) w[i] = (r[i] - c[i] * w[i + 1]) / b[i];
}

}  // namespace kinslab
