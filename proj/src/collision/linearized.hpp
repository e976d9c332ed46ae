#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "collision/kernel.hpp"
#include "core/chi_basis.hpp"
#include "core/velocity_grid.hpp"

namespace kinslab {

// Linearized collision operator L on the grid. BGK is nu*(I - P) with
// nu == 1. Cutoff kernels are assembled as eight dense parity blocks over the
// positive-octant representatives (the kernel is invariant under coordinate
// reflections, so parity classes decouple); each block is projection-corrected
// so the discrete null space is exactly span{chi_0..chi_4}.
class LinearizedCollision {
public:
    struct Options {
        // Which parity classes to assemble for cutoff kernels (bit s set =
        // assemble class s). Solves restricted to a known symmetry class can
        // skip the rest; default everything.
        unsigned block_mask = 0xff;
        // Classes for which the row-consistent dressed quadrature (used by
        // quantitative transport-coefficient solves) is also stored. Default:
        // the classes of A_13, A_23 and B_3.
        unsigned dressed_mask = 0x71;
        // Pre-correction null residual (dressed rows) above this rejects the
        // kernel quadrature as underresolved.
        double null_tol = 2e-2;
        int diag_subdiv = 6;
        bool verbose = false;
    };

    static LinearizedCollision assemble(const CollisionKernel& kernel,
                                        const VelocityGrid& grid, const Options& opts);
    static LinearizedCollision assemble(const CollisionKernel& kernel,
                                        const VelocityGrid& grid) {
        return assemble(kernel, grid, Options{});
    }

    const VelocityGrid& grid() const { return *grid_; }
    const CollisionKernel& kernel() const { return kernel_; }
    const ChiBasis& basis() const { return basis_; }
    const DistFn& nu() const { return nu_; }
    bool is_bgk() const { return kernel_.is_bgk(); }
    bool has_block(int s) const { return !blocks_[s].empty(); }

    DistFn apply(const DistFn& g) const;

    // Row-consistent dressed quadrature of the same kernel (quadratic-exact
    // operand reconstruction). Not symmetric; used by transport-coefficient
    // extraction through defect iteration.
    bool has_dressed(int s) const { return !dressed_[s].empty(); }
    DistFn apply_dressed(const DistFn& g) const;

    // Null functions (the chi basis) and the estimated spectral gap of the
    // nu-weighted generalized problem.
    double coercivity() const { return coercivity_; }
    double null_residual() const { return null_residual_; }

    // Generalized eigenvalues L g = lambda nu g of parity class s, ascending.
    std::vector<double> block_eigenvalues(int s) const;
    // All eigenvalues over the assembled blocks, ascending.
    std::vector<double> eigenvalues() const;

    // Gain part K g = nu g - L g (used by the half-space source iteration).
    DistFn apply_gain(const DistFn& g) const;

    // Dense parity-block cache (shape header + row-major doubles + checksum).
    bool save_blocks(const std::string& path) const;
    static std::unique_ptr<LinearizedCollision> load_blocks(
        const std::string& path, const CollisionKernel& kernel, const VelocityGrid& grid);

private:
    LinearizedCollision(const CollisionKernel& kernel, const VelocityGrid& grid);

    void project_correct_blocks();
    void compute_coercivity();

    CollisionKernel kernel_;
    const VelocityGrid* grid_;
    ChiBasis basis_;
    DistFn nu_;
    // blocks_[s]: row-major (n_oct x n_oct) matrix of the full operator
    // (nu-diagonal included) acting on parity class s.
    std::array<std::vector<double>, 8> blocks_;
    std::array<std::vector<double>, 8> dressed_;
    double coercivity_ = 1.0;
    double null_residual_ = 0.0;
};

}  // namespace kinslab
