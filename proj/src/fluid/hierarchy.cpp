#include "fluid/hierarchy.hpp"

#include <cmath>
#include <stdexcept>

namespace kinslab {

Field fadd(const Field& a, const Field& b) {
    Field r(a.size());
    for (int i = 0; i < a.size(); ++i) {
        r.v[i] = a.v[i] + b.v[i];
        r.dt[i] = a.dt[i] + b.dt[i];
    }
    return r;
}

Field fsub(const Field& a, const Field& b) {
    Field r(a.size());
    for (int i = 0; i < a.size(); ++i) {
        r.v[i] = a.v[i] - b.v[i];
        r.dt[i] = a.dt[i] - b.dt[i];
    }
    return r;
}

Field fmul(const Field& a, const Field& b) {
    Field r(a.size());
    for (int i = 0; i < a.size(); ++i) {
        r.v[i] = a.v[i] * b.v[i];
        r.dt[i] = a.dt[i] * b.v[i] + a.v[i] * b.dt[i];
    }
    return r;
}

Field fscale(const Field& a, double s) {
    Field r(a.size());
    for (int i = 0; i < a.size(); ++i) {
        r.v[i] = s * a.v[i];
        r.dt[i] = s * a.dt[i];
    }
    return r;
}

Field fshift(const Field& a, double s) {
    Field r = a;
    for (auto& x : r.v) x += s;
    return r;
}

Field fderiv(const Mesh1D& mesh, const Field& a) {
    Field r(a.size());
    r.v = mesh.d1(a.v);
    r.dt = mesh.d1(a.dt);
    return r;
}

Field fconst(int n, double value, double dt) {
    Field r(n);
    for (int i = 0; i < n; ++i) {
        r.v[i] = value;
        r.dt[i] = dt;
    }
    return r;
}

Field fmul_coord(const Mesh1D& mesh, const Field& a) {
    Field r(a.size());
    for (int i = 0; i < a.size(); ++i) {
        r.v[i] = mesh.node(i) * a.v[i];
        r.dt[i] = mesh.node(i) * a.dt[i];
    }
    return r;
}

namespace {
const PolyV& basis_poly(int id) {
    static const std::array<PolyV, PolyBasis::Count> polys = [] {
        std::array<PolyV, PolyBasis::Count> p;
        p[PolyBasis::A11] = polys::burnett_A(0, 0);
        p[PolyBasis::A12] = polys::burnett_A(0, 1);
        p[PolyBasis::A13] = polys::burnett_A(0, 2);
        p[PolyBasis::A22] = polys::burnett_A(1, 1);
        p[PolyBasis::A23] = polys::burnett_A(1, 2);
        p[PolyBasis::A33] = polys::burnett_A(2, 2);
        p[PolyBasis::B1] = polys::burnett_B(0);
        p[PolyBasis::B2] = polys::burnett_B(1);
        p[PolyBasis::B3] = polys::burnett_B(2);
        p[PolyBasis::C] = polys::burnett_C();
        return p;
    }();
    return polys[id];
}
}  // namespace

const PolyV& PolyBasis::poly(int id) { return basis_poly(id); }

int PolyBasis::a_index(int i, int j) {
    static const int map3[3][3] = {{A11, A12, A13}, {A12, A22, A23}, {A13, A23, A33}};
    return map3[i][j];
}

double PolyBasis::bracket_Av3(int i, int id) {
    static std::array<std::array<double, Count>, 2> cache = [] {
        std::array<std::array<double, Count>, 2> c{};
        for (int ii = 0; ii < 2; ++ii) {
            PolyV probe = polys::burnett_A(ii, 2) * PolyV::monomial(0, 0, 1);
            for (int id = 0; id < Count; ++id) c[ii][id] = probe.bracket(basis_poly(id));
        }
        return c;
    }();
    return cache[i][id];
}

double PolyBasis::bracket_Bv3(int id) {
    static std::array<double, Count> cache = [] {
        std::array<double, Count> c{};
        PolyV probe = polys::burnett_B(2) * PolyV::monomial(0, 0, 1);
        for (int id = 0; id < Count; ++id) c[id] = probe.bracket(basis_poly(id));
        return c;
    }();
    return cache[id];
}

void accumulate_burnett_quadratic(MicroExpansion& out, const MacroOrder& a,
                                  const MacroOrder& b, double scale,
                                  const Mesh1D& mesh) {
    (void)mesh;
    auto acc = [&](int id, const Field& f) {
        auto it = out.find(id);
        if (it == out.end()) {
            out[id] = fscale(f, scale);
        } else {
            it->second = fadd(it->second, fscale(f, scale));
        }
    };
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            Field f = (i == j) ? fmul(a.u[i], b.u[j])
                               : fadd(fmul(a.u[i], b.u[j]), fmul(a.u[j], b.u[i]));
            acc(PolyBasis::a_index(i, j), f);
        }
        acc(PolyBasis::B1 + i, fadd(fmul(a.u[i], b.th), fmul(b.u[i], a.th)));
    }
    acc(PolyBasis::C, fmul(a.th, b.th));
}

// ---------------------------------------------------------------------------

ShearHierarchy::ShearHierarchy(const HierarchyConfig& cfg, Mesh1D x3, Mesh1D zeta)
    : cfg_(cfg), x3_(std::move(x3)), zeta_(std::move(zeta)) {
    if (cfg_.truncation < 0 || cfg_.truncation > 3)
        throw std::invalid_argument(
            "hierarchy: truncation depth beyond the implemented half-orders (0..3)");
    if (cfg_.taylor_depth < 1) throw std::invalid_argument("hierarchy: taylor depth >= 1");
    build_initial_state();
}

namespace {
double tanh_profile(double x, double amp, double delta) {
    // Offset by one width so the wall trace is nonzero; saturates well before
    // the right end of the slab.
    return amp * std::tanh((x - delta) / delta);
}
}  // namespace

void ShearHierarchy::build_initial_state() {
    const int nx = x3_.size(), nz = zeta_.size();
    interior_.assign(4, InteriorOrder{});
    layers_.assign(4, LayerOrder{});
    for (int k = 0; k < 4; ++k) {
        for (int d = 0; d < 3; ++d) {
            interior_[k].m.u[d] = Field(nx);
            layers_[k].m.u[d] = Field(nz);
        }
        interior_[k].m.th = Field(nx);
        interior_[k].m.rho = Field(nx);
        layers_[k].m.th = Field(nz);
        layers_[k].m.rho = Field(nz);
        layers_[k].pb = Field(nz);
    }
    ub43_ = Field(nz);

    // Interior orders 0 and 1: steady shear profiles.
    for (int i = 0; i < nx; ++i) {
        const double x = x3_.node(i);
        interior_[0].m.u[0].v[i] = tanh_profile(x, cfg_.u0.u_amp1, cfg_.u0.u_delta);
        interior_[0].m.u[1].v[i] = tanh_profile(x, cfg_.u0.u_amp2, cfg_.u0.u_delta);
        interior_[0].m.th.v[i] = tanh_profile(x, cfg_.u0.th_amp, cfg_.u0.th_delta);
        interior_[0].m.rho.v[i] = -interior_[0].m.th.v[i];
        interior_[1].m.u[0].v[i] = tanh_profile(x, cfg_.u1.u_amp1, cfg_.u1.u_delta);
        interior_[1].m.u[1].v[i] = tanh_profile(x, cfg_.u1.u_amp2, cfg_.u1.u_delta);
        interior_[1].m.th.v[i] = tanh_profile(x, cfg_.u1.th_amp, cfg_.u1.th_delta);
        interior_[1].m.rho.v[i] = -interior_[1].m.th.v[i];
        if (cfg_.truncation >= 2) {
            interior_[2].m.u[0].v[i] = tanh_profile(x, cfg_.u2_amp, cfg_.u0.u_delta);
            interior_[2].m.th.v[i] = tanh_profile(x, cfg_.th2_amp, cfg_.u0.th_delta);
            const double usq0 = interior_[0].m.u[0].v[i] * interior_[0].m.u[0].v[i] +
                                interior_[0].m.u[1].v[i] * interior_[0].m.u[1].v[i];
            interior_[2].m.rho.v[i] = usq0 / 3.0 - interior_[2].m.th.v[i];
        }
        if (cfg_.truncation >= 3) {
            const double udot = interior_[0].m.u[0].v[i] * interior_[1].m.u[0].v[i] +
                                interior_[0].m.u[1].v[i] * interior_[1].m.u[1].v[i];
            interior_[3].m.rho.v[i] = (2.0 / 3.0) * udot;
        }
    }

    // Layer initial data: developed erfc shapes compatible with the wall data.
    auto erfc_shape = [&](double zetav, double kappa) {
        return std::erfc(zetav / (2.0 * std::sqrt(kappa * cfg_.layer_age)));
    };
    const int kmax = cfg_.truncation;
    for (int k = 0; k <= kmax && k < 4; ++k) {
        double bc_u1, bc_u2, bc_th;
        if (k <= 2) {
            bc_u1 = -interior_[k].m.u[0].v[0];
            bc_u2 = -interior_[k].m.u[1].v[0];
            bc_th = -interior_[k].m.th.v[0];
        } else {
            bc_u1 = bc_u2 = bc_th = 0.0;  // slip data applied below
        }
        for (int i = 0; i < nz; ++i) {
            const double z = zeta_.node(i);
            layers_[k].m.u[0].v[i] = bc_u1 * erfc_shape(z, cfg_.kappa1);
            layers_[k].m.u[1].v[i] = bc_u2 * erfc_shape(z, cfg_.kappa1);
            layers_[k].m.th.v[i] = bc_th * erfc_shape(z, cfg_.kappa2);
        }
    }
    if (kmax >= 3) {
        // Order-3 Dirichlet data involves the slip coefficients and the wall
        // gradients of the order-0 layer.
        const double gu1 = cfg_.slip_b1 * zeta_.wall_gradient(layers_[0].m.u[0].v) -
                           interior_[3].m.u[0].v[0];
        const double gu2 = cfg_.slip_b1 * zeta_.wall_gradient(layers_[0].m.u[1].v) -
                           interior_[3].m.u[1].v[0];
        const double gth = cfg_.slip_c1 * zeta_.wall_gradient(layers_[0].m.th.v) -
                           interior_[3].m.th.v[0];
        for (int i = 0; i < nz; ++i) {
            const double z = zeta_.node(i);
            layers_[3].m.u[0].v[i] = gu1 * erfc_shape(z, cfg_.kappa1);
            layers_[3].m.u[1].v[i] = gu2 * erfc_shape(z, cfg_.kappa1);
            layers_[3].m.th.v[i] = gth * erfc_shape(z, cfg_.kappa2);
        }
    }
    rebuild_derived();
    refresh_time_derivatives();
}

void ShearHierarchy::interior_rhs(int k, std::array<std::vector<double>, 2>& du,
                                  std::vector<double>& dth) const {
    const int nx = x3_.size();
    du[0].assign(nx, 0.0);
    du[1].assign(nx, 0.0);
    dth.assign(nx, 0.0);
    if (k <= 1) return;  // steady for shear data
    const auto& lower = interior_[k - 2].m;
    std::vector<double> lap_u1 = x3_.d2(lower.u[0].v);
    std::vector<double> lap_u2 = x3_.d2(lower.u[1].v);
    std::vector<double> lap_th = x3_.d2(lower.th.v);
    for (int i = 0; i < nx; ++i) {
        du[0][i] = cfg_.kappa1 * lap_u1[i];
        du[1][i] = cfg_.kappa1 * lap_u2[i];
        dth[i] = cfg_.kappa2 * lap_th[i];
    }
    if (k == 3) {
        // Normal transport by the order-3 constant normal velocity.
        const double u33 = interior_[3].m.u[2].v[0];
        std::vector<double> d1u1 = x3_.d1(interior_[0].m.u[0].v);
        std::vector<double> d1u2 = x3_.d1(interior_[0].m.u[1].v);
        std::vector<double> d1th = x3_.d1(interior_[0].m.th.v);
        for (int i = 0; i < nx; ++i) {
            du[0][i] -= u33 * d1u1[i];
            du[1][i] -= u33 * d1u2[i];
            dth[i] -= u33 * d1th[i];
        }
    }
}

namespace {
// Constant-in-zeta macro order built from interior wall traces.
MacroOrder trace_order(const InteriorOrder& in, int n) {
    MacroOrder t;
    for (int d = 0; d < 3; ++d) t.u[d] = fconst(n, in.m.u[d].v[0], in.m.u[d].dt[0]);
    t.th = fconst(n, in.m.th.v[0], in.m.th.dt[0]);
    t.rho = fconst(n, in.m.rho.v[0], in.m.rho.dt[0]);
    return t;
}

Field micro_moment(const MicroExpansion& micro, const Mesh1D& mesh, int probe_i,
                   bool against_B) {
    // <A_{i3} v3, .> or <B_3 v3, .> of d/dzeta(micro): returns the field
    // sum_alpha d(c_alpha)/dzeta * bracket.
    Field out;
    bool init = false;
    for (const auto& [id, coef] : micro) {
        const double w =
            against_B ? PolyBasis::bracket_Bv3(id) : PolyBasis::bracket_Av3(probe_i, id);
        if (w == 0.0) continue;
        Field dc = fderiv(mesh, coef);
        if (!init) {
            out = fscale(dc, w);
            init = true;
        } else {
            out = fadd(out, fscale(dc, w));
        }
    }
    if (!init) out = Field(mesh.size());
    return out;
}
}  // namespace

std::array<std::vector<double>, 3> ShearHierarchy::layer_sources(int k) const {
    const int nz = zeta_.size();
    std::array<std::vector<double>, 3> S;
    for (auto& s : S) s.assign(nz, 0.0);
    if (k <= 1) return S;  // unforced heat equations for shear data

    const MacroOrder t0 = trace_order(interior_[0], nz);
    const double u0p1 = interior_trace(0, 0, 1);  // tangential Taylor of order 0
    const double u0p2 = interior_trace(0, 1, 1);
    const double th0p = interior_trace(0, 3, 1);

    if (k == 2) {
        // Momentum: f^b_1 + known normal-transport terms of the k = 2 system.
        const Field& ub33 = layers_[3].m.u[2];
        const double u33_int = interior_[3].m.u[2].v[0];
        // Transport of the dressed micro part of g^b_2.
        Field w1 = micro_moment(layers_[2].micro, zeta_, 0, false);
        Field w2 = micro_moment(layers_[2].micro, zeta_, 1, false);
        Field wb = micro_moment(layers_[2].micro, zeta_, 0, true);
        std::vector<double> dw1 = zeta_.d1(w1.v), dw2 = zeta_.d1(w2.v),
                            dwb = zeta_.d1(wb.v);
        std::vector<double> dzu01 = zeta_.d1(layers_[0].m.u[0].v);
        std::vector<double> dzu02 = zeta_.d1(layers_[0].m.u[1].v);
        std::vector<double> dzth0 = zeta_.d1(layers_[0].m.th.v);
        // d/dt p^b_2 with p^b_2 = (2/3)(u^b_0 . u^0_0 + |u^b_0|^2/2).
        for (int i = 0; i < nz; ++i) {
            const double drho0 = layers_[0].m.rho.dt[i];
            S[0][i] = drho0 * (layers_[0].m.u[0].v[i] + t0.u[0].v[i]) + dw1[i] -
                      (ub33.v[i] + u33_int) * dzu01[i];
            S[1][i] = drho0 * (layers_[0].m.u[1].v[i] + t0.u[1].v[i]) + dw2[i] -
                      (ub33.v[i] + u33_int) * dzu02[i];
        }
        // Heat source.
        std::vector<double> th_sum(nz), flux(nz);
        for (int i = 0; i < nz; ++i)
            th_sum[i] = layers_[0].m.th.v[i] + t0.th.v[i];
        for (int i = 0; i < nz; ++i) flux[i] = ub33.v[i] * th_sum[i];
        std::vector<double> dflux = zeta_.d1(flux);
        for (int i = 0; i < nz; ++i) {
            S[2][i] = 0.4 * layers_[2].pb.dt[i] - dflux[i] - u33_int * dzth0[i] +
                      0.4 * dwb[i];
        }
        return S;
    }

    // k == 3.
    const MacroOrder t1 = trace_order(interior_[1], nz);
    const Field& ub33 = layers_[3].m.u[2];
    const double u43_int = -ub43_.v[0];

    Field w1 = micro_moment(layers_[3].micro, zeta_, 0, false);
    Field w2 = micro_moment(layers_[3].micro, zeta_, 1, false);
    Field wb = micro_moment(layers_[3].micro, zeta_, 0, true);
    std::vector<double> dw1 = zeta_.d1(w1.v), dw2 = zeta_.d1(w2.v), dwb = zeta_.d1(wb.v);
    std::vector<double> dzu01 = zeta_.d1(layers_[0].m.u[0].v);
    std::vector<double> dzu02 = zeta_.d1(layers_[0].m.u[1].v);
    std::vector<double> dzth0 = zeta_.d1(layers_[0].m.th.v);
    std::vector<double> dzu11 = zeta_.d1(layers_[1].m.u[0].v);
    std::vector<double> dzu12 = zeta_.d1(layers_[1].m.u[1].v);
    std::vector<double> dzth1 = zeta_.d1(layers_[1].m.th.v);
    const double u33_int = interior_[3].m.u[2].v[0];

    // -d/dzeta [u^b_{3,3} (u^b_1 + u^0_1 + zeta u0^(1))_i]
    std::vector<double> m1(nz), m2(nz), mth(nz);
    for (int i = 0; i < nz; ++i) {
        const double z = zeta_.node(i);
        m1[i] = ub33.v[i] * (layers_[1].m.u[0].v[i] + t1.u[0].v[i] + z * u0p1);
        m2[i] = ub33.v[i] * (layers_[1].m.u[1].v[i] + t1.u[1].v[i] + z * u0p2);
        mth[i] = ub33.v[i] * (layers_[1].m.th.v[i] + t1.th.v[i] + z * th0p);
    }
    std::vector<double> dm1 = zeta_.d1(m1), dm2 = zeta_.d1(m2), dmth = zeta_.d1(mth);
    // -d/dzeta [u^b_{4,3}(th^b_0 + th^0_0)]
    std::vector<double> f43(nz);
    for (int i = 0; i < nz; ++i)
        f43[i] = ub43_.v[i] * (layers_[0].m.th.v[i] + t0.th.v[i]);
    std::vector<double> df43 = zeta_.d1(f43);

    for (int i = 0; i < nz; ++i) {
        const double drho1 = layers_[1].m.rho.dt[i];
        S[0][i] = drho1 * (layers_[0].m.u[0].v[i] + t0.u[0].v[i]) - dm1[i] + dw1[i] -
                  u33_int * dzu11[i] - (ub43_.v[i] + u43_int) * dzu01[i];
        S[1][i] = drho1 * (layers_[0].m.u[1].v[i] + t0.u[1].v[i]) - dm2[i] + dw2[i] -
                  u33_int * dzu12[i] - (ub43_.v[i] + u43_int) * dzu02[i];
        S[2][i] = 0.4 * layers_[3].pb.dt[i] - dmth[i] - df43[i] - u43_int * dzth0[i] -
                  u33_int * dzth1[i] + 0.4 * dwb[i];
    }
    return S;
}

void ShearHierarchy::rebuild_derived() {
    const int nz = zeta_.size();
    const int kmax = cfg_.truncation;

    // p^b and rho^b.
    layers_[0].pb = Field(nz);
    layers_[0].m.rho = fscale(layers_[0].m.th, -1.0);
    if (kmax >= 1) {
        layers_[1].pb = Field(nz);
        layers_[1].m.rho = fscale(layers_[1].m.th, -1.0);
    }
    const MacroOrder t0 = trace_order(interior_[0], nz);
    if (kmax >= 2) {
        Field dot(nz);
        for (int d = 0; d < 2; ++d)
            dot = fadd(dot, fadd(fmul(layers_[0].m.u[d], t0.u[d]),
                                 fscale(fmul(layers_[0].m.u[d], layers_[0].m.u[d]), 0.5)));
        layers_[2].pb = fscale(dot, 2.0 / 3.0);
        layers_[2].m.rho = fsub(layers_[2].pb, layers_[2].m.th);
    }
    if (kmax >= 3) {
        const MacroOrder t1 = trace_order(interior_[1], nz);
        const double u0p[2] = {interior_trace(0, 0, 1), interior_trace(0, 1, 1)};
        // H^b_0 = (2/3)[2 u^0_1 . u^b_0 + u^b_0 . u^b_1 + zeta u0^(1) . u^b_0]
        Field hb(nz);
        for (int d = 0; d < 2; ++d) {
            hb = fadd(hb, fscale(fmul(t1.u[d], layers_[0].m.u[d]), 2.0));
            hb = fadd(hb, fmul(layers_[0].m.u[d], layers_[1].m.u[d]));
            hb = fadd(hb, fmul_coord(zeta_, fscale(layers_[0].m.u[d], u0p[d])));
        }
        hb = fscale(hb, 2.0 / 3.0);
        // p^b_3 = (2/3) u^b_1 . (u^b_0 + u^0_0) + H^b_0
        Field pb3(nz);
        for (int d = 0; d < 2; ++d)
            pb3 = fadd(pb3, fmul(layers_[1].m.u[d], fadd(layers_[0].m.u[d], t0.u[d])));
        layers_[3].pb = fadd(fscale(pb3, 2.0 / 3.0), hb);
        layers_[3].m.rho = fsub(layers_[3].pb, layers_[3].m.th);
    }

    // Interior rho fields track the Boussinesq gauges.
    const int nx = x3_.size();
    for (int i = 0; i < nx; ++i) {
        interior_[0].m.rho.v[i] = -interior_[0].m.th.v[i];
        interior_[0].m.rho.dt[i] = -interior_[0].m.th.dt[i];
        interior_[1].m.rho.v[i] = -interior_[1].m.th.v[i];
        interior_[1].m.rho.dt[i] = -interior_[1].m.th.dt[i];
        if (kmax >= 2) {
            const double usq0 = interior_[0].m.u[0].v[i] * interior_[0].m.u[0].v[i] +
                                interior_[0].m.u[1].v[i] * interior_[0].m.u[1].v[i];
            interior_[2].m.rho.v[i] = usq0 / 3.0 - interior_[2].m.th.v[i];
            interior_[2].m.rho.dt[i] = -interior_[2].m.th.dt[i];
        }
        if (kmax >= 3) {
            const double udot = interior_[0].m.u[0].v[i] * interior_[1].m.u[0].v[i] +
                                interior_[0].m.u[1].v[i] * interior_[1].m.u[1].v[i];
            interior_[3].m.rho.v[i] = (2.0 / 3.0) * udot - interior_[3].m.th.v[i];
            interior_[3].m.rho.dt[i] = -interior_[3].m.th.dt[i];
        }
    }

    // Microscopic parts.
    interior_[2].micro.clear();
    interior_[3].micro.clear();
    if (kmax >= 2)
        accumulate_burnett_quadratic(interior_[2].micro, interior_[0].m, interior_[0].m,
                                     0.5, x3_);
    if (kmax >= 3)
        accumulate_burnett_quadratic(interior_[3].micro, interior_[0].m, interior_[1].m,
                                     1.0, x3_);

    layers_[2].micro.clear();
    layers_[3].micro.clear();
    if (kmax >= 2) {
        accumulate_burnett_quadratic(layers_[2].micro, t0, layers_[0].m, 1.0, zeta_);
        accumulate_burnett_quadratic(layers_[2].micro, layers_[0].m, layers_[0].m, 0.5,
                                     zeta_);
    }
    if (kmax >= 3) {
        const MacroOrder t1 = trace_order(interior_[1], nz);
        MacroOrder arg = t1;  // u^b_1 + u^0_1 + zeta u0^(1)
        for (int d = 0; d < 2; ++d) {
            arg.u[d] = fadd(arg.u[d], layers_[1].m.u[d]);
            arg.u[d] = fadd(arg.u[d],
                            fmul_coord(zeta_, fconst(nz, interior_trace(0, d, 1), 0.0)));
        }
        arg.th = fadd(arg.th, layers_[1].m.th);
        arg.th = fadd(arg.th,
                      fmul_coord(zeta_, fconst(nz, interior_trace(0, 3, 1), 0.0)));
        arg.rho = fadd(arg.rho, layers_[1].m.rho);
        accumulate_burnett_quadratic(layers_[3].micro, layers_[0].m, arg, 1.0, zeta_);
        accumulate_burnett_quadratic(layers_[3].micro, t0, layers_[1].m, 1.0, zeta_);
        // Gradient-driven part: -A_hat_{3j} d u^b_{0,j} - B_hat_3 d th^b_0
        // (BGK pseudo-inverses equal the Burnett functions themselves).
        Field g1 = fscale(fderiv(zeta_, layers_[0].m.u[0]), -1.0);
        Field g2 = fscale(fderiv(zeta_, layers_[0].m.u[1]), -1.0);
        Field g3 = fscale(fderiv(zeta_, layers_[0].m.th), -1.0);
        auto acc = [&](int id, const Field& f) {
            auto it = layers_[3].micro.find(id);
            if (it == layers_[3].micro.end())
                layers_[3].micro[id] = f;
            else
                it->second = fadd(it->second, f);
        };
        acc(PolyBasis::A13, g1);
        acc(PolyBasis::A23, g2);
        acc(PolyBasis::B3, g3);
    }
}

void ShearHierarchy::refresh_time_derivatives() {
    const int nz = zeta_.size();
    const int kmax = cfg_.truncation;

    // Layer orders 0 and 1 are unforced heat equations in the shear case.
    for (int k = 0; k <= std::min(1, kmax); ++k) {
        auto& L = layers_[k];
        std::vector<double> lap;
        lap = zeta_.d2(L.m.u[0].v);
        for (int i = 0; i < nz; ++i) L.m.u[0].dt[i] = cfg_.kappa1 * lap[i];
        lap = zeta_.d2(L.m.u[1].v);
        for (int i = 0; i < nz; ++i) L.m.u[1].dt[i] = cfg_.kappa1 * lap[i];
        lap = zeta_.d2(L.m.th.v);
        for (int i = 0; i < nz; ++i) L.m.th.dt[i] = cfg_.kappa2 * lap[i];
        L.m.rho.dt = L.m.th.dt;
        for (auto& x : L.m.rho.dt) x = -x;
    }

    // Normal-velocity reconstructions from the divergence constraints:
    // d/dzeta u^b_{k+1,3} = -d/dt rho^b_{k-2}.
    if (kmax >= 3) {
        std::vector<double> f(nz), fdt(nz);
        for (int i = 0; i < nz; ++i) f[i] = -layers_[0].m.rho.dt[i];
        std::vector<double> lap = zeta_.d2(layers_[0].m.th.dt);
        for (int i = 0; i < nz; ++i) fdt[i] = cfg_.kappa2 * lap[i];
        layers_[3].m.u[2].v = zeta_.integral_from_far(f);
        layers_[3].m.u[2].dt = zeta_.integral_from_far(fdt);
        // u^b_{4,3} from order 1.
        for (int i = 0; i < nz; ++i) f[i] = -layers_[1].m.rho.dt[i];
        lap = zeta_.d2(layers_[1].m.th.dt);
        for (int i = 0; i < nz; ++i) fdt[i] = cfg_.kappa2 * lap[i];
        ub43_.v = zeta_.integral_from_far(f);
        ub43_.dt = zeta_.integral_from_far(fdt);
    }

    // Interior time derivatives.
    if (kmax >= 3) {
        const int nx = x3_.size();
        const double u33 = -layers_[3].m.u[2].v[0];
        const double du33 = -layers_[3].m.u[2].dt[0];
        for (int i = 0; i < nx; ++i) {
            interior_[3].m.u[2].v[i] = u33;
            interior_[3].m.u[2].dt[i] = du33;
        }
    }
    for (int k = 2; k <= kmax; ++k) {
        std::array<std::vector<double>, 2> du;
        std::vector<double> dth;
        interior_rhs(k, du, dth);
        interior_[k].m.u[0].dt = du[0];
        interior_[k].m.u[1].dt = du[1];
        interior_[k].m.th.dt = dth;
    }

    rebuild_derived();

    // Layer orders 2 and 3 (after micro/pb fields are fresh).
    for (int k = 2; k <= kmax; ++k) {
        auto S = layer_sources(k);
        auto& L = layers_[k];
        std::vector<double> lap;
        lap = zeta_.d2(L.m.u[0].v);
        for (int i = 0; i < nz; ++i) L.m.u[0].dt[i] = cfg_.kappa1 * lap[i] + S[0][i];
        lap = zeta_.d2(L.m.u[1].v);
        for (int i = 0; i < nz; ++i) L.m.u[1].dt[i] = cfg_.kappa1 * lap[i] + S[1][i];
        lap = zeta_.d2(L.m.th.v);
        for (int i = 0; i < nz; ++i) L.m.th.dt[i] = cfg_.kappa2 * lap[i] + S[2][i];
        L.m.rho.dt = L.m.th.dt;
        for (auto& x : L.m.rho.dt) x = -x;
        if (k == 2) {
            // rho^b_2 carries the quadratic pressure gauge.
            L.m.rho.dt = fsub(L.pb, L.m.th).dt;
        } else if (k == 3) {
            L.m.rho.dt = fsub(L.pb, L.m.th).dt;
        }
    }
    // Final micro refresh so coefficient dt fields see the new macro dts.
    rebuild_derived();
}

void ShearHierarchy::step() {
    const double dt = cfg_.dt;
    const int kmax = cfg_.truncation;
    const int nz = zeta_.size();

    // Sources frozen at the current time before anything moves.
    std::array<std::array<std::vector<double>, 3>, 4> sources;
    for (int k = 0; k <= kmax; ++k) sources[k] = layer_sources(k);

    // Interior explicit update (orders 0 and 1 steady).
    for (int k = 2; k <= kmax; ++k) {
        std::array<std::vector<double>, 2> du;
        std::vector<double> dth;
        interior_rhs(k, du, dth);
        for (int i = 0; i < x3_.size(); ++i) {
            interior_[k].m.u[0].v[i] += dt * du[0][i];
            interior_[k].m.u[1].v[i] += dt * du[1][i];
            interior_[k].m.th.v[i] += dt * dth[i];
        }
    }

    // Layers: implicit diffusion, explicit sources; Dirichlet data from the
    // new interior traces (slip data for order 3 uses the new order-0 layer).
    for (int k = 0; k <= kmax; ++k) {
        auto& L = layers_[k];
        double bc_u1, bc_u2, bc_th;
        if (k <= 2) {
            bc_u1 = -interior_[k].m.u[0].v[0];
            bc_u2 = -interior_[k].m.u[1].v[0];
            bc_th = -interior_[k].m.th.v[0];
        } else {
            bc_u1 = cfg_.slip_b1 * zeta_.wall_gradient(layers_[0].m.u[0].v) -
                    interior_[3].m.u[0].v[0];
            bc_u2 = cfg_.slip_b1 * zeta_.wall_gradient(layers_[0].m.u[1].v) -
                    interior_[3].m.u[1].v[0];
            bc_th = cfg_.slip_c1 * zeta_.wall_gradient(layers_[0].m.th.v) -
                    interior_[3].m.th.v[0];
        }
        zeta_.diffuse_implicit(L.m.u[0].v, cfg_.kappa1, dt, bc_u1, 0.0, sources[k][0]);
        zeta_.diffuse_implicit(L.m.u[1].v, cfg_.kappa1, dt, bc_u2, 0.0, sources[k][1]);
        zeta_.diffuse_implicit(L.m.th.v, cfg_.kappa2, dt, bc_th, 0.0, sources[k][2]);
        for (int i = 0; i < nz; ++i) {
            const double m = std::max({std::fabs(L.m.u[0].v[i]), std::fabs(L.m.u[1].v[i]),
                                       std::fabs(L.m.th.v[i])});
            if (!(m < cfg_.blowup_bound))
                throw std::runtime_error("hierarchy: layer field exceeded the blow-up bound");
        }
    }

    t_ += dt;
    refresh_time_derivatives();
}

void ShearHierarchy::advance(double t_final) {
    while (t_ < t_final - 1e-12) {
        if (t_ + cfg_.dt > t_final + 1e-12) {
            const double save = cfg_.dt;
            cfg_.dt = t_final - t_;
            step();
            cfg_.dt = save;
        } else {
            step();
        }
    }
}

double ShearHierarchy::interior_trace(int k, int comp, int deriv) const {
    const int npts = std::min(cfg_.taylor_depth + 3, x3_.size());
    if (deriv >= npts)
        throw std::invalid_argument("interior_trace: derivative order exceeds stencil");
    const Field* f = nullptr;
    if (comp < 3)
        f = &interior_[k].m.u[comp];
    else if (comp == 3)
        f = &interior_[k].m.th;
    else
        f = &interior_[k].m.rho;
    // One-sided Vandermonde stencil at x = 0 (exact for degree npts-1).
    std::vector<double> c(npts, 0.0);
    {
        std::vector<std::vector<double>> V(npts, std::vector<double>(npts + 1, 0.0));
        for (int r = 0; r < npts; ++r) {
            double p = 1.0;
            for (int cidx = 0; cidx < npts; ++cidx) {
                V[r][cidx] = p;
                p *= x3_.node(r);
            }
        }
        // Solve V^T a = e_deriv * deriv! : coefficients of the stencil.
        std::vector<std::vector<double>> A(npts, std::vector<double>(npts + 1, 0.0));
        for (int r = 0; r < npts; ++r)
            for (int cidx = 0; cidx < npts; ++cidx) A[r][cidx] = V[cidx][r];
        double fact = 1.0;
        for (int i = 2; i <= deriv; ++i) fact *= i;
        A[deriv][npts] = fact;
        for (int col = 0; col < npts; ++col) {
            int piv = col;
            for (int r = col + 1; r < npts; ++r)
                if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
            std::swap(A[piv], A[col]);
            for (int r = col + 1; r < npts; ++r) {
                const double m = A[r][col] / A[col][col];
                for (int cc = col; cc <= npts; ++cc) A[r][cc] -= m * A[col][cc];
            }
        }
        for (int r = npts - 1; r >= 0; --r) {
            double s = A[r][npts];
            for (int cc = r + 1; cc < npts; ++cc) s -= A[r][cc] * c[cc];
            c[r] = s / A[r][r];
        }
    }
    double acc = 0.0;
    for (int i = 0; i < npts; ++i) acc += c[i] * f->v[i];
    return acc;
}

double ShearHierarchy::divergence_residual(int k) const {
    const int nz = zeta_.size();
    const Field* u_next = nullptr;
    std::vector<double> rhs(nz, 0.0);
    if (k == 2 && cfg_.truncation >= 3) {
        u_next = &layers_[3].m.u[2];
        for (int i = 0; i < nz; ++i) rhs[i] = -layers_[0].m.rho.dt[i];
    } else if (k == 3 && cfg_.truncation >= 3) {
        u_next = &ub43_;
        for (int i = 0; i < nz; ++i) rhs[i] = -layers_[1].m.rho.dt[i];
    } else {
        return 0.0;  // u^b_{1,3} and u^b_{2,3} vanish identically for shear
    }
    double worst = 0.0;
    for (int i = 0; i + 1 < nz; ++i) {
        const double dz = zeta_.node(i + 1) - zeta_.node(i);
        const double lhs = (u_next->v[i + 1] - u_next->v[i]) / dz;
        const double expect = 0.5 * (rhs[i] + rhs[i + 1]);
        worst = std::max(worst, std::fabs(lhs - expect));
    }
    return worst;
}

void ShearHierarchy::layer_heat_step(const Mesh1D& mesh, Field& w, double kappa,
                                     double dt, double wall_value,
                                     const std::vector<double>& source,
                                     const std::vector<double>* drift) {
    std::vector<double> S = source;
    if (drift) {
        const int n = mesh.size();
        std::vector<double> flux(n);
        for (int i = 0; i < n; ++i) flux[i] = w.v[i] * (*drift)[i];
        std::vector<double> dflux = mesh.d1(flux);
        for (int i = 0; i < n; ++i) S[i] -= dflux[i];
    }
    mesh.diffuse_implicit(w.v, kappa, dt, wall_value, 0.0, S);
    std::vector<double> lap = mesh.d2(w.v);
    for (int i = 0; i < mesh.size(); ++i) w.dt[i] = kappa * lap[i] + S[i];
}

}  // namespace kinslab
