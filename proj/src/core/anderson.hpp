#pragma once

#include <cstddef>
#include <vector>

namespace kinslab {

// Minimal Anderson mixing for fixed-point iterations x -> F(x). Feed the
// iterate and its residual r = F(x) - x; next() returns the accelerated
// update. Window kept small; least squares solved by normal equations.
class AndersonMixer {
public:
    explicit AndersonMixer(int window = 4) : window_(window) {}

    std::vector<double> next(const std::vector<double>& x, const std::vector<double>& r) {
        xs_.push_back(x);
        rs_.push_back(r);
        if (static_cast<int>(xs_.size()) > window_ + 1) {
            xs_.erase(xs_.begin());
            rs_.erase(rs_.begin());
        }
        const int k = static_cast<int>(xs_.size()) - 1;
        const size_t n = x.size();
        if (k == 0) {
            std::vector<double> out(n);
            for (size_t i = 0; i < n; ++i) out[i] = x[i] + r[i];
            return out;
        }
        // Minimize |r_k + sum_j g_j (r_{j} - r_k)| over the window.
        std::vector<std::vector<double>> dr(k);
        for (int j = 0; j < k; ++j) {
            dr[j].resize(n);
            for (size_t i = 0; i < n; ++i) dr[j][i] = rs_[j][i] - rs_[k][i];
        }
        std::vector<double> A(k * k, 0.0), b(k, 0.0), g(k, 0.0);
        for (int a = 0; a < k; ++a) {
            for (int c = a; c < k; ++c) {
                double s = 0.0;
                for (size_t i = 0; i < n; ++i) s += dr[a][i] * dr[c][i];
                A[a * k + c] = s;
                A[c * k + a] = s;
            }
            double s = 0.0;
            for (size_t i = 0; i < n; ++i) s += dr[a][i] * rs_[k][i];
            b[a] = -s;
        }
        for (int a = 0; a < k; ++a) A[a * k + a] *= 1.0 + 1e-12;  // ridge
        // Gaussian elimination.
        for (int col = 0; col < k; ++col) {
            int piv = col;
            for (int rr = col + 1; rr < k; ++rr)
                if (std::abs(A[rr * k + col]) > std::abs(A[piv * k + col])) piv = rr;
            if (std::abs(A[piv * k + col]) < 1e-300) {
                g.assign(k, 0.0);
                break;
            }
            if (piv != col) {
                for (int cc = 0; cc < k; ++cc) std::swap(A[piv * k + cc], A[col * k + cc]);
                std::swap(b[piv], b[col]);
            }
            for (int rr = col + 1; rr < k; ++rr) {
                const double f = A[rr * k + col] / A[col * k + col];
                for (int cc = col; cc < k; ++cc) A[rr * k + cc] -= f * A[col * k + cc];
                b[rr] -= f * b[col];
            }
        }
        for (int rr = k - 1; rr >= 0; --rr) {
            double s = b[rr];
            for (int cc = rr + 1; cc < k; ++cc) s -= A[rr * k + cc] * g[cc];
            g[rr] = s / A[rr * k + rr];
        }
        std::vector<double> out(n);
        for (size_t i = 0; i < n; ++i) {
            double xa = xs_[k][i] + rs_[k][i];
            for (int j = 0; j < k; ++j)
                xa += g[j] * ((xs_[j][i] + rs_[j][i]) - (xs_[k][i] + rs_[k][i]));
            out[i] = xa;
        }
        return out;
    }

    void reset() {
        xs_.clear();
        rs_.clear();
    }

private:
    int window_;
    std::vector<std::vector<double>> xs_, rs_;
};

}  // namespace kinslab
