#include "sdifflab/ns_solver.hpp"

#include <cmath>
#include <stdexcept>

namespace sdifflab {

FluidState FluidState::make(double t, VectorField u, std::optional<VectorField> v_ext) {
    FluidState s;
    s.t = t;
    if (v_ext) {
        require_compatible(u, *v_ext, "FluidState");
        if (!v_ext->div_free()) {
            // arbitrary forces are projected; the model force is always the
            // group-gradient of a potential and hence already solenoidal
            s.v_ext = leray_project(*v_ext).solenoidal;
        } else {
            s.v_ext = std::move(*v_ext);
        }
    } else {
        s.v_ext = VectorField(u.dim(), u.trunc());
        s.v_ext.set_div_free(true);
    }
    s.p = ScalarField(u.dim(), u.trunc());
    s.u = std::move(u);
    return s;
}

namespace {

VectorField projected_flux(const FluidState& s) {
    VectorField adv = advect(s.u, s.u, Dealias::project_back);
    adv += s.v_ext;
    return leray_project(adv).solenoidal;
}

void check_finite(const VectorField& u, double t) {
    for (const auto& [m, a] : u.coeffs())
        for (int i = 0; i < u.dim(); ++i)
            if (!std::isfinite(a[i]))
                throw std::runtime_error("time step diverged (non-finite coefficient) at t = " +
                                         std::to_string(t));
}

// viscous sign of du/dt = -P(flux) + visc_sign * nu * laplacian(u) in the
// direction actually being integrated (backward runs integrate toward t-)
double viscous_sign(TimeDirection dir) {
    switch (dir) {
        case TimeDirection::forward:
            return 1.0;
        case TimeDirection::backward:
            return -1.0;  // as written for increasing t; the stepper negates dt
        default:
            return 0.0;
    }
}

}  // namespace

VectorField ns_rhs(const FluidState& s, const SolverConfig& cfg) {
    VectorField rhs = projected_flux(s);
    rhs *= -1.0;
    if (cfg.direction != TimeDirection::euler && cfg.nu != 0.0) {
        VectorField visc = laplacian(s.u);
        visc *= viscous_sign(cfg.direction) * cfg.nu;
        rhs += visc;
    }
    rhs.set_div_free(true);
    return rhs;
}

ScalarField pressure_from_velocity(const FluidState& s, const SolverConfig& cfg) {
    (void)cfg;
    VectorField flux = advect(s.u, s.u, Dealias::project_back);
    flux += s.v_ext;
    ScalarField p = leray_project(flux).potential;
    p.set(Mode{}, 0.0);
    return p;
}

namespace {

// per-mode integrating factor exp(-nu |k|^2 h) applied in place
void apply_heat_factor(VectorField& u, double nu, double h) {
    if (nu == 0.0 || h == 0.0) return;
    VectorField out(u.dim(), u.trunc());
    for (const auto& [m, a] : u.coeffs()) {
        const double f = std::exp(-nu * m.norm2() * h);
        Vec v(u.dim());
        for (int i = 0; i < u.dim(); ++i) v[i] = a[i] * f;
        out.add(m, v);
    }
    out.set_div_free(u.div_free());
    u = std::move(out);
}

}  // namespace

FluidState step(const FluidState& s, const SolverConfig& cfg) {
    if (cfg.dt <= 0.0) throw std::invalid_argument("step: dt must be positive");
    const bool bwd = cfg.direction == TimeDirection::backward;
    const double tau = cfg.dt;

    // nonlinear part of the rhs in the integration variable (sigma = -t for
    // backward runs, so the advective sign flips while the heat term stays
    // dissipative)
    auto N = [&](const VectorField& u) {
        FluidState tmp;
        tmp.u = u;
        tmp.v_ext = s.v_ext;
        VectorField f = projected_flux(tmp);
        f *= bwd ? 1.0 : -1.0;
        return f;
    };

    VectorField un = s.u;
    VectorField result(un.dim(), un.trunc());

    const bool viscous = cfg.direction != TimeDirection::euler && cfg.nu != 0.0;
    if (cfg.scheme == Scheme::rk4_explicit || !viscous) {
        if (viscous && cfg.explicit_stability() > 2.5)
            throw std::invalid_argument(
                "step: dt nu d K^2 exceeds the explicit RK4 stability bound, reduce dt");
        auto rhs = [&](const VectorField& u) {
            VectorField f = N(u);
            if (viscous) {
                VectorField visc = laplacian(u);
                visc *= cfg.nu;  // dissipative in the integration variable
                f += visc;
            }
            return f;
        };
        VectorField k1 = rhs(un);
        VectorField k2 = rhs(un + 0.5 * tau * k1);
        VectorField k3 = rhs(un + 0.5 * tau * k2);
        VectorField k4 = rhs(un + tau * k3);
        result = un + (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
        // integrating-factor RK4: the stiff heat term is integrated exactly
        VectorField k1 = N(un);
        VectorField ua = un + (0.5 * tau) * k1;
        apply_heat_factor(ua, cfg.nu, 0.5 * tau);
        VectorField k2 = N(ua);

        VectorField ub = un;
        apply_heat_factor(ub, cfg.nu, 0.5 * tau);
        ub += (0.5 * tau) * k2;
        VectorField k3 = N(ub);

        VectorField uc = un;
        apply_heat_factor(uc, cfg.nu, tau);
        VectorField ek3 = k3;
        apply_heat_factor(ek3, cfg.nu, 0.5 * tau);
        uc += tau * ek3;
        VectorField k4 = N(uc);

        VectorField acc = k1;
        apply_heat_factor(acc, cfg.nu, tau);
        VectorField mid = k2 + k3;
        apply_heat_factor(mid, cfg.nu, 0.5 * tau);
        acc += 2.0 * mid;
        acc += k4;

        result = un;
        apply_heat_factor(result, cfg.nu, tau);
        result += (tau / 6.0) * acc;
    }

    result = leray_project(result).solenoidal;
    result.prune(0.0);
    check_finite(result, s.t);

    FluidState out;
    out.t = bwd ? s.t - cfg.dt : s.t + cfg.dt;
    out.u = std::move(result);
    out.v_ext = s.v_ext;
    out.p = pressure_from_velocity(out, cfg);
    return out;
}

Trajectory integrate(const FluidState& s0, const SolverConfig& cfg, double T, int stride) {
    if (T < 0.0) throw std::invalid_argument("integrate: T must be >= 0");
    Trajectory traj;
    traj.snapshots.push_back(s0);
    const long nsteps = std::lround(T / cfg.dt);
    if (std::abs(nsteps * cfg.dt - T) > 1e-9 * std::max(1.0, T))
        throw std::invalid_argument("integrate: T must be a multiple of dt");
    FluidState cur = s0;
    for (long i = 0; i < nsteps; ++i) {
        cur = step(cur, cfg);
        if ((stride > 0 && (i + 1) % stride == 0) || i + 1 == nsteps)
            traj.snapshots.push_back(cur);
    }
    return traj;
}

FluidState taylor_green(double amplitude, double nu, double t, int K) {
    if (K < 2) throw std::invalid_argument("taylor_green: K must be >= 2 for the pressure modes");
    const double ea = amplitude * std::exp(-2.0 * nu * t);
    VectorField u(2, K);
    // sin x cos y = (sin(x+y) + sin(x-y))/2,  -cos x sin y = -(sin(x+y) - sin(x-y))/2
    u.add(Mode{{1, 1, 0}, Parity::sin}, Vec(0.5 * ea, -0.5 * ea));
    u.add(Mode{{1, -1, 0}, Parity::sin}, Vec(0.5 * ea, 0.5 * ea));
    u.set_div_free(true);
    const double ep = -0.25 * amplitude * amplitude * std::exp(-4.0 * nu * t);
    ScalarField p(2, K);
    p.add(Mode{{2, 0, 0}, Parity::cos}, ep);
    p.add(Mode{{0, 2, 0}, Parity::cos}, ep);
    FluidState s = FluidState::make(t, std::move(u));
    s.p = std::move(p);
    return s;
}

double sg_burgers_residual(const FluidState& s, const SolverConfig& cfg, const QSpectrum& Q,
                           bool skip_leray_in_group_path) {
    if (Q.dim != s.u.dim()) throw std::invalid_argument("sg_burgers_residual: dimension mismatch");
    const int K = s.u.trunc();

    // group path: Leray projection of the unconstrained flux, viscosity via
    // the Lie-derivative Hodge Laplacian of the covariance basis
    VectorField flux = advect(s.u, s.u, Dealias::project_back);
    flux += s.v_ext;
    VectorField rhs_group =
        skip_leray_in_group_path ? flux : leray_project(flux).solenoidal;
    rhs_group *= -1.0;
    if (cfg.nu != 0.0) {
        VectorField box = lie_hodge(Q, s.u, Dealias::project_back);
        box *= cfg.nu;
        rhs_group += box;
    }

    // manifold path: unprojected assembly from ns_rhs ingredients with the
    // spectral pressure split
    ScalarField p = pressure_from_velocity(s, cfg);
    VectorField rhs_m = advect(s.u, s.u, Dealias::project_back);
    rhs_m *= -1.0;
    rhs_m -= s.v_ext;
    rhs_m += gradient(p);
    if (cfg.nu != 0.0) {
        VectorField box = hodge_laplacian(s.u);
        box *= cfg.nu;
        rhs_m += box;
    }

    VectorField diff = rhs_group - retruncate(rhs_m, K);
    return l2_norm(diff);
}

double time_reversal_check(const VectorField& u0, const SolverConfig& cfg, double T, int stride) {
    SolverConfig fwd_cfg = cfg;
    fwd_cfg.direction = TimeDirection::forward;
    Trajectory fwd = integrate(FluidState::make(0.0, u0), fwd_cfg, T, stride);

    VectorField z0 = u0;
    z0 *= -1.0;
    // the backward route runs at dt/2 so the two solves are not exact sign
    // mirrors of each other and the comparison carries numerical content
    SolverConfig bwd_cfg = cfg;
    bwd_cfg.direction = TimeDirection::backward;
    bwd_cfg.dt = cfg.dt / 2.0;
    Trajectory bwd = integrate(FluidState::make(T, z0), bwd_cfg, T, 2 * stride);

    if (fwd.snapshots.size() != bwd.snapshots.size())
        throw std::runtime_error("time_reversal_check: trajectory lengths differ");
    double worst = 0.0;
    for (size_t i = 0; i < bwd.snapshots.size(); ++i) {
        // z(t) should equal -u(T - t); bwd snapshot i sits at t = T - i dt
        VectorField diff = bwd.snapshots[i].u + fwd.snapshots[i].u;
        worst = std::max(worst, l2_norm(diff));
    }
    return worst;
}

double energy_law_residual(const VectorField& u0, const SolverConfig& cfg, double T) {
    SolverConfig c = cfg;
    c.direction = TimeDirection::forward;
    FluidState cur = FluidState::make(0.0, u0);
    const long nsteps = std::lround(T / c.dt);
    double worst = 0.0;
    for (long i = 0; i < nsteps; ++i) {
        const double e0 = energy(cur.u);
        const double diss = l2_inner(hodge_laplacian(cur.u), cur.u);
        FluidState nxt = step(cur, c);
        const double e1 = energy(nxt.u);
        worst = std::max(worst, std::abs(e1 - e0 + c.nu * diss * c.dt));
        cur = std::move(nxt);
    }
    return worst;
}

}  // namespace sdifflab
