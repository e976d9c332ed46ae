#include "collision/linearized.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "collision/hard_sphere.hpp"
#include "harness/io.hpp"

namespace kinslab {

namespace {

// Null-function count expected per parity class: (e,e,e) holds chi_0 and
// chi_4, each odd-in-one-axis class holds one velocity chi.
int null_count(int s) {
    switch (s) {
        case 0: return 2;
        case 1:
        case 2:
        case 4: return 1;
        default: return 0;
    }
}

std::vector<double> sym_eigenvalues(std::vector<double> mat, int n) {
    std::vector<double> w(n);
    int info = LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'N', 'U', n, mat.data(), n, w.data());
    if (info != 0) throw std::runtime_error("dsyev failed");
    return w;
}

}  // namespace

LinearizedCollision::LinearizedCollision(const CollisionKernel& kernel,
                                         const VelocityGrid& grid)
    : kernel_(kernel), grid_(&grid), basis_(ChiBasis::global(grid)) {}

LinearizedCollision LinearizedCollision::assemble(const CollisionKernel& kernel,
                                                  const VelocityGrid& grid,
                                                  const Options& opts) {
    kernel.validate();
    LinearizedCollision L(kernel, grid);
    L.nu_ = collision_frequency_field(kernel, grid);

    if (kernel.is_bgk()) {
        L.coercivity_ = 1.0;
        L.null_residual_ = 0.0;
        return L;
    }
    if (kernel.gamma <= -1.0)
        throw std::invalid_argument(
            "assemble_linearized: gain kernel for gamma <= -1 is not locally "
            "integrable in the Grad form; only gamma in (-1, 1] is assembled");

    const auto& oct = grid.octant();
    const int m = static_cast<int>(oct.size());
    const int nfull = grid.size();
    const double w = grid.weight();
    const double h = grid.spacing();

    // Precompute, for every grid node, its octant representative and the
    // reflection mask taking the representative onto it.
    std::vector<int> rep(nfull), mask(nfull);
    for (int q = 0; q < m; ++q)
        for (int r = 0; r < 8; ++r) {
            const int j = grid.reflect_mask(r, oct[q]);
            rep[j] = q;
            mask[j] = r;
        }

    for (int s = 0; s < 8; ++s) {
        if (opts.block_mask & (1u << s)) L.blocks_[s].assign((size_t)m * m, 0.0);
        if (opts.dressed_mask & (1u << s)) L.dressed_[s].assign((size_t)m * m, 0.0);
    }

#pragma omp parallel for schedule(dynamic)
    for (int p = 0; p < m; ++p) {
        const auto np = grid.node(oct[p]);
        const double vp[3] = {np[0], np[1], np[2]};
        const int prow = p;
        const int N = grid.resolution();
        for (int j = 0; j < nfull; ++j) {
            const auto nq = grid.node(j);
            const double vq[3] = {nq[0], nq[1], nq[2]};
            const int sub = cutoff_k2_subdiv(vp, vq, h, opts.diag_subdiv);
            if (sub == 0) continue;
            const KernelCellMoments mom = cutoff_entry_moments(kernel, vp, vq, h, sub);
            const int q = rep[j];
            for (int s = 0; s < 8; ++s) {
                if (!(opts.block_mask & (1u << s))) continue;
                L.blocks_[s][(size_t)prow * m + q] +=
                    parity_sign(s, mask[j]) * (-w) * mom.mass;
            }
            if (opts.dressed_mask) {
                // Quadratic-exact redistribution of the cell moments onto the
                // column and its axis neighbors (skipped at grid edges).
                const int jx = j / (N * N), jy = (j / N) % N, jz = j % N;
                const int idx3[3] = {jx, jy, jz};
                const int stride[3] = {N * N, N, 1};
                double center = mom.mass;
                for (int t = 0; t < 3; ++t)
                    if (idx3[t] > 0 && idx3[t] < N - 1) center -= mom.second[t] / (h * h);
                auto addcol = [&](int node, double val) {
                    const double sv = -w * val;
                    const int qq = rep[node];
                    const double sgn_base = 1.0;
                    (void)sgn_base;
                    for (int s = 0; s < 8; ++s) {
                        if (!(opts.dressed_mask & (1u << s))) continue;
                        L.dressed_[s][(size_t)prow * m + qq] +=
                            parity_sign(s, mask[node]) * sv;
                    }
                };
                addcol(j, center);
                const double sq_j = std::exp(-0.25 * grid.vsq(j));
                auto ratio = [&](int node) {
                    return sq_j / std::exp(-0.25 * grid.vsq(node));
                };
                for (int t = 0; t < 3; ++t) {
                    if (idx3[t] == 0 || idx3[t] == N - 1) continue;
                    const int jp = j + stride[t], jm = j - stride[t];
                    addcol(jp, (mom.dipole[t] / (2.0 * h) + mom.second[t] / (2.0 * h * h)) *
                                   ratio(jp));
                    addcol(jm, (-mom.dipole[t] / (2.0 * h) + mom.second[t] / (2.0 * h * h)) *
                                   ratio(jm));
                }
                // Mixed second moments via the diagonal cross stencil.
                const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
                for (int cpair = 0; cpair < 3; ++cpair) {
                    const int t = pairs[cpair][0], u = pairs[cpair][1];
                    if (idx3[t] == 0 || idx3[t] == N - 1 || idx3[u] == 0 ||
                        idx3[u] == N - 1)
                        continue;
                    const double cxy = mom.cross[cpair] / (4.0 * h * h);
                    const int spp = j + stride[t] + stride[u];
                    const int spm = j + stride[t] - stride[u];
                    const int smp = j - stride[t] + stride[u];
                    const int smm = j - stride[t] - stride[u];
                    addcol(spp, cxy * ratio(spp));
                    addcol(spm, -cxy * ratio(spm));
                    addcol(smp, -cxy * ratio(smp));
                    addcol(smm, cxy * ratio(smm));
                }
            }
        }
    }
    for (int s = 0; s < 8; ++s) {
        if (L.dressed_[s].empty()) continue;
        for (int p = 0; p < m; ++p)
            L.dressed_[s][(size_t)p * m + p] += L.nu_[oct[p]];
    }

    // Galerkin-consistent symmetrization: the one-sided rows K[p][q] carry the
    // target-cell average only; the symmetric form is (D K + K^T D)/2 with
    // D the Gaussian cell-mass of the source cell, plus the matching
    // cell-averaged nu diagonal.
    std::vector<double> Gmass(m), nu_hat(m);
    for (int p = 0; p < m; ++p) {
        const auto np = grid.node(oct[p]);
        const double c[3] = {np[0], np[1], np[2]};
        Gmass[p] = gaussian_cell_mass_ratio(c, h);
        // The transposed side of the symmetrization integrates nu against the
        // full mu profile of the cell: mu-weighted average times the
        // closed-form mu cell mass.
        double G2 = 1.0;
        for (int d = 0; d < 3; ++d) {
            const double a = (c[d] - 0.5 * h) / std::sqrt(2.0);
            const double b = (c[d] + 0.5 * h) / std::sqrt(2.0);
            G2 *= std::sqrt(0.5 * M_PI) * (std::erf(b) - std::erf(a)) /
                  (h * std::exp(-0.5 * c[d] * c[d]));
        }
        const double csq = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
        double num = 0.0, den = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int d = 0; d < 3; ++d) {
                    const double q[3] = {c[0] + (a - 1) * h / 3.0,
                                         c[1] + (b - 1) * h / 3.0,
                                         c[2] + (d - 1) * h / 3.0};
                    const double qsq = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
                    const double r2 = std::exp(-0.5 * (qsq - csq));
                    num += collision_frequency_radial(kernel, std::sqrt(qsq)) * r2;
                    den += r2;
                }
        nu_hat[p] = 0.5 * (Gmass[p] * L.nu_[oct[p]] + G2 * num / den);
    }
    for (int s = 0; s < 8; ++s) {
        if (L.blocks_[s].empty()) continue;
        auto& B = L.blocks_[s];
        for (int r = 0; r < m; ++r)
            for (int c = r; c < m; ++c) {
                const double v = 0.5 * (Gmass[r] * B[(size_t)r * m + c] +
                                        Gmass[c] * B[(size_t)c * m + r]);
                B[(size_t)r * m + c] = v;
                B[(size_t)c * m + r] = v;
            }
        for (int r = 0; r < m; ++r) B[(size_t)r * m + r] += nu_hat[r];
    }

    // Underresolution diagnostic: residual of the null functions under the
    // row-consistent dressed rows (the quantitative quadrature). The
    // symmetric form gets its null space enforced exactly below.
    double worst = 0.0;
    const int chi_class[5] = {0, 1, 2, 4, 0};
    for (int j = 0; j < 5; ++j) {
        const int cls = chi_class[j];
        if (L.dressed_[cls].empty()) continue;
        DistFn img = L.apply_dressed(L.basis_.chi(j));
        const double r = norm2(grid, img) / norm2(grid, L.basis_.chi(j));
        if (opts.verbose)
            std::fprintf(stderr, "[collision] raw |L chi%d| rel = %.3e\n", j, r);
        worst = std::max(worst, r);
    }
    L.null_residual_ = worst;
    if (opts.verbose)
        std::fprintf(stderr, "[collision] pre-correction null residual %.3e\n", worst);
    if (worst > opts.null_tol)
        throw std::runtime_error(
            "assemble_linearized: kernel quadrature underresolved (null residual " +
            std::to_string(worst) + ")");

    L.project_correct_blocks();
    L.compute_coercivity();
    return L;
}

void LinearizedCollision::project_correct_blocks() {
    const auto& oct = grid_->octant();
    const int m = static_cast<int>(oct.size());
    const double w8 = 8.0 * grid_->weight();

    // chi indices living in each parity class.
    for (int s = 0; s < 8; ++s) {
        if (blocks_[s].empty() || null_count(s) == 0) continue;
        std::vector<std::vector<double>> basis;
        if (s == 0) {
            basis.push_back({});
            basis.push_back({});
        } else {
            basis.push_back({});
        }
        auto fill = [&](std::vector<double>& v, const DistFn& chi) {
            v.resize(m);
            for (int p = 0; p < m; ++p) v[p] = chi[oct[p]];
        };
        if (s == 0) {
            fill(basis[0], basis_.chi(0));
            fill(basis[1], basis_.chi(4));
        } else {
            const int j = (s == 1) ? 1 : (s == 2 ? 2 : 3);
            fill(basis[0], basis_.chi(j));
        }
        // Orthonormalize within the class (w8-weighted Gram-Schmidt).
        for (size_t a = 0; a < basis.size(); ++a) {
            for (size_t b = 0; b < a; ++b) {
                double d = 0.0;
                for (int p = 0; p < m; ++p) d += basis[a][p] * basis[b][p];
                d *= w8;
                for (int p = 0; p < m; ++p) basis[a][p] -= d * basis[b][p];
            }
            double nrm = 0.0;
            for (int p = 0; p < m; ++p) nrm += basis[a][p] * basis[a][p];
            nrm = std::sqrt(nrm * w8);
            for (int p = 0; p < m; ++p) basis[a][p] /= nrm;
        }
        // B <- Pi B Pi with Pi = I - sum |e><e| w8.
        auto& B = blocks_[s];
        for (const auto& e : basis) {
            // col projection: B <- B - (B e) e^T w8
            std::vector<double> Be(m, 0.0);
            for (int r = 0; r < m; ++r) {
                double acc = 0.0;
                for (int c = 0; c < m; ++c) acc += B[(size_t)r * m + c] * e[c];
                Be[r] = acc;
            }
            for (int r = 0; r < m; ++r)
                for (int c = 0; c < m; ++c) B[(size_t)r * m + c] -= Be[r] * e[c] * w8;
            // row projection: B <- B - e (e^T B) w8
            std::vector<double> eB(m, 0.0);
            for (int c = 0; c < m; ++c) {
                double acc = 0.0;
                for (int r = 0; r < m; ++r) acc += e[r] * B[(size_t)r * m + c];
                eB[c] = acc;
            }
            for (int r = 0; r < m; ++r)
                for (int c = 0; c < m; ++c) B[(size_t)r * m + c] -= e[r] * eB[c] * w8;
        }
    }
}

std::vector<double> LinearizedCollision::block_eigenvalues(int s) const {
    if (is_bgk())
        throw std::logic_error("block_eigenvalues: BGK operator has no stored blocks");
    if (blocks_[s].empty()) throw std::logic_error("block_eigenvalues: block not assembled");
    const auto& oct = grid_->octant();
    const int m = static_cast<int>(oct.size());
    // Generalized problem L z = lambda nu z via symmetric scaling.
    std::vector<double> A = blocks_[s];
    std::vector<double> d(m);
    for (int p = 0; p < m; ++p) d[p] = 1.0 / std::sqrt(nu_[oct[p]]);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) A[(size_t)r * m + c] *= d[r] * d[c];
    return sym_eigenvalues(std::move(A), m);
}

std::vector<double> LinearizedCollision::eigenvalues() const {
    std::vector<double> all;
    for (int s = 0; s < 8; ++s) {
        if (blocks_[s].empty()) continue;
        auto ev = block_eigenvalues(s);
        all.insert(all.end(), ev.begin(), ev.end());
    }
    std::sort(all.begin(), all.end());
    return all;
}

void LinearizedCollision::compute_coercivity() {
    if (is_bgk()) {
        coercivity_ = 1.0;
        return;
    }
    double gap = 1e300;
    bool any = false;
    for (int s = 0; s < 8; ++s) {
        if (blocks_[s].empty()) continue;
        any = true;
        auto ev = block_eigenvalues(s);
        const int skip = null_count(s);
        const double scale = std::fabs(ev.back());
        for (int k = 0; k < skip; ++k)
            if (std::fabs(ev[k]) > 1e-6 * scale)
                throw std::runtime_error(
                    "assemble_linearized: projected block retains a spurious "
                    "near-null eigenvalue");
        gap = std::min(gap, ev[skip]);
    }
    coercivity_ = any ? gap : 0.0;
    if (any && coercivity_ <= 0.0)
        throw std::runtime_error("assemble_linearized: nonpositive spectral gap");
}

DistFn LinearizedCollision::apply(const DistFn& g) const {
    if (is_bgk()) {
        DistFn out = basis_.project_perp(g);
        return out;  // nu == 1
    }
    ParityComponents pc = parity_split(*grid_, g);
    const auto& oct = grid_->octant();
    const int m = static_cast<int>(oct.size());
    ParityComponents out;
    for (int s = 0; s < 8; ++s) {
        out.comp[s].assign(m, 0.0);
        if (blocks_[s].empty()) {
            // Class not assembled: valid only if the input has no content there.
            double mx = 0.0;
            for (double x : pc.comp[s]) mx = std::max(mx, std::fabs(x));
            if (mx > 1e-13)
                throw std::runtime_error(
                    "LinearizedCollision::apply: input has content in a parity "
                    "class that was not assembled");
            continue;
        }
        const auto& B = blocks_[s];
        const auto& x = pc.comp[s];
        auto& y = out.comp[s];
#pragma omp parallel for schedule(static)
        for (int r = 0; r < m; ++r) {
            double acc = 0.0;
            const double* row = &B[(size_t)r * m];
            for (int c = 0; c < m; ++c) acc += row[c] * x[c];
            y[r] = acc;
        }
    }
    return parity_merge(*grid_, out);
}

DistFn LinearizedCollision::apply_dressed(const DistFn& g) const {
    if (is_bgk()) return apply(g);
    ParityComponents pc = parity_split(*grid_, g);
    const auto& oct = grid_->octant();
    const int m = static_cast<int>(oct.size());
    ParityComponents out;
    for (int s = 0; s < 8; ++s) {
        out.comp[s].assign(m, 0.0);
        if (dressed_[s].empty()) {
            double mx = 0.0;
            for (double x : pc.comp[s]) mx = std::max(mx, std::fabs(x));
            if (mx > 1e-13)
                throw std::runtime_error(
                    "apply_dressed: input has content in a class without a "
                    "dressed block");
            continue;
        }
        const auto& B = dressed_[s];
        const auto& x = pc.comp[s];
        auto& y = out.comp[s];
#pragma omp parallel for schedule(static)
        for (int r = 0; r < m; ++r) {
            double acc = 0.0;
            const double* row = &B[(size_t)r * m];
            for (int c = 0; c < m; ++c) acc += row[c] * x[c];
            y[r] = acc;
        }
    }
    return parity_merge(*grid_, out);
}

DistFn LinearizedCollision::apply_gain(const DistFn& g) const {
    DistFn Lg = apply(g);
    DistFn out(g.size());
    for (size_t i = 0; i < g.size(); ++i) out[i] = nu_[i] * g[i] - Lg[i];
    return out;
}

bool LinearizedCollision::save_blocks(const std::string& path) const {
    if (is_bgk()) return false;
    std::vector<BinaryField> fields;
    const int m = static_cast<int>(grid_->octant().size());
    for (int s = 0; s < 8; ++s) {
        if (blocks_[s].empty()) continue;
        BinaryField f;
        f.name = "block" + std::to_string(s);
        f.dims = {m, m};
        f.data = blocks_[s];
        fields.push_back(std::move(f));
    }
    BinaryField fnu;
    fnu.name = "nu";
    fnu.dims = {grid_->size()};
    fnu.data = nu_;
    fields.push_back(std::move(fnu));
    return write_container(path, fields);
}

std::unique_ptr<LinearizedCollision> LinearizedCollision::load_blocks(
    const std::string& path, const CollisionKernel& kernel, const VelocityGrid& grid) {
    std::vector<BinaryField> fields;
    if (!read_container(path, fields)) return nullptr;
    auto L = std::unique_ptr<LinearizedCollision>(new LinearizedCollision(kernel, grid));
    const int m = static_cast<int>(grid.octant().size());
    bool have_nu = false;
    for (auto& f : fields) {
        if (f.name == "nu") {
            if (f.dims != std::vector<int>{grid.size()}) return nullptr;
            L->nu_ = std::move(f.data);
            have_nu = true;
        } else if (f.name.rfind("block", 0) == 0) {
            const int s = f.name[5] - '0';
            if (s < 0 || s > 7 || f.dims != std::vector<int>{m, m}) return nullptr;
            L->blocks_[s] = std::move(f.data);
        }
    }
    if (!have_nu) return nullptr;
    L->compute_coercivity();
    return L;
}

}  // namespace kinslab
