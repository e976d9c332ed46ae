#pragma once

#include <array>
#include <map>
#include <vector>

#include "core/mesh1d.hpp"
#include "core/polyv.hpp"

namespace kinslab {

// Scalar field on a 1-D mesh together with its time derivative, so every
// expansion term can expose d/dt without re-differencing in time.
struct Field {
    std::vector<double> v, dt;

    Field() = default;
    explicit Field(int n) : v(n, 0.0), dt(n, 0.0) {}
    int size() const { return static_cast<int>(v.size()); }
};

Field fadd(const Field& a, const Field& b);
Field fsub(const Field& a, const Field& b);
Field fmul(const Field& a, const Field& b);      // product rule on dt
Field fscale(const Field& a, double s);
Field fshift(const Field& a, double s);          // a + s
Field fderiv(const Mesh1D& mesh, const Field& a);
Field fconst(int n, double value, double dt = 0.0);
Field fmul_coord(const Mesh1D& mesh, const Field& a);  // multiply by the mesh coordinate

// Fixed registry of the velocity polynomials that carry microscopic parts of
// the expansion: the Burnett tensors (A symmetric, 6 entries), B and C.
class PolyBasis {
public:
    enum Id { A11 = 0, A12, A13, A22, A23, A33, B1, B2, B3, C, Count };
    static const PolyV& poly(int id);
    static int a_index(int i, int j);  // symmetric lookup
    // <A_{i3} v3, P_id>_mu and <B_3 v3, P_id>_mu, exact.
    static double bracket_Av3(int i, int id);
    static double bracket_Bv3(int id);
};

// Microscopic part of a term as coefficient fields over the poly registry.
using MicroExpansion = std::map<int, Field>;

// Macro fields of one expansion order: velocity components, temperature and
// density (rho kept explicitly; Boussinesq fixes it from the pressure gauge).
struct MacroOrder {
    std::array<Field, 3> u;
    Field th;
    Field rho;
};

struct InteriorOrder {
    MacroOrder m;
    MicroExpansion micro;
};

struct LayerOrder {
    MacroOrder m;  // u[2] is this order's own normal component u^b_{k,3}
    Field pb;
    MicroExpansion micro;
};

// Shear-flow data: tangential tanh profiles for the interior orders 0 and 1.
struct ShearProfileSpec {
    double u_amp1 = 0.5, u_amp2 = -0.3, u_delta = 0.5;
    double th_amp = 0.4, th_delta = 0.7;
};

struct HierarchyConfig {
    int truncation = 3;   // half-orders 0..K
    int taylor_depth = 3;
    double kappa1 = 1.0, kappa2 = 1.0;
    double slip_b1 = 0.0, slip_c1 = 0.0;
    double dt = 1e-4;
    double layer_age = 0.25;    // erfc age of the initial layer profiles
    double blowup_bound = 1e6;
    ShearProfileSpec u0, u1;    // orders 0 and 1 interior data
    double u2_amp = 0.0, th2_amp = 0.0;  // optional order-2 initial perturbations
};

// Coupled march of the interior (Euler-family) and viscous-layer
// (Prandtl-family) systems for shear data, truncated at K <= 3 half-orders.
// All tangential derivatives vanish by the shear restriction; collision
// closure is the BGK quadratic form, for which bilinear terms with a
// microscopic argument vanish identically.
class ShearHierarchy {
public:
    ShearHierarchy(const HierarchyConfig& cfg, Mesh1D x3, Mesh1D zeta);

    void advance(double t_final);
    void step();

    double time() const { return t_; }
    int truncation() const { return cfg_.truncation; }
    const HierarchyConfig& config() const { return cfg_; }
    const Mesh1D& x3() const { return x3_; }
    const Mesh1D& zeta() const { return zeta_; }

    const InteriorOrder& interior(int k) const { return interior_[k]; }
    const LayerOrder& layer(int k) const { return layers_[k]; }
    // u^b_{K+1,3} reconstruction (used by sources at the top order).
    const Field& ub43() const { return ub43_; }

    // Wall trace of d^l/dx3^l of an interior macro component
    // (comp: 0..2 velocity, 3 theta, 4 rho).
    double interior_trace(int k, int comp, int deriv) const;

    // Divergence-constraint residual of order k in the trapezoid-consistent
    // discrete form (max over cells).
    double divergence_residual(int k) const;

    // Layer heat-equation solver exposed for oracle tests: marches
    // dt w = kappa d2 w - d(w * drift)/dzeta + source with Dirichlet data.
    static void layer_heat_step(const Mesh1D& mesh, Field& w, double kappa, double dt,
                                double wall_value, const std::vector<double>& source,
                                const std::vector<double>* drift = nullptr);

private:
    void build_initial_state();
    void refresh_time_derivatives();
    void interior_rhs(int k, std::array<std::vector<double>, 2>& du,
                      std::vector<double>& dth) const;
    std::array<std::vector<double>, 3> layer_sources(int k) const;  // f1, f2, g
    void rebuild_derived();  // micro expansions, pb, rho, normal components

    HierarchyConfig cfg_;
    Mesh1D x3_, zeta_;
    double t_ = 0.0;
    std::vector<InteriorOrder> interior_;
    std::vector<LayerOrder> layers_;
    Field ub43_;
};

// Expand the closed-form quadratic interaction of two infinitesimal
// Maxwellians into Burnett coefficient fields:
//   A : u (x) u' + B . (u th' + u' th) + C th th'.
void accumulate_burnett_quadratic(MicroExpansion& out, const MacroOrder& a,
                                  const MacroOrder& b, double scale,
                                  const Mesh1D& mesh);

}  // namespace kinslab
