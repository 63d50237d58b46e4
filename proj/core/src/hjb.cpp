#include "sdifflab/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdifflab {

size_t ValueFunction::index_of(double t) const {
    for (size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
    throw std::invalid_argument("ValueFunction: time not on the stored grid");
}

namespace {

ScalarField interp(const std::vector<double>& times, const std::vector<ScalarField>& fields,
                   double t) {
    if (fields.empty()) throw std::logic_error("ValueFunction: empty");
    if (t <= times.front()) return fields.front();
    if (t >= times.back()) return fields.back();
    size_t hi = 1;
    while (times[hi] < t) ++hi;
    const size_t lo = hi - 1;
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    ScalarField out = fields[lo];
    out *= 1.0 - w;
    ScalarField b = fields[hi];
    b *= w;
    out += b;
    return out;
}

}  // namespace

ScalarField ValueFunction::W_at(double t) const { return interp(times, W, t); }
ScalarField ValueFunction::Phi_at(double t) const { return interp(times, Phi, t); }

ScalarField cole_hopf(const ScalarField& phi, double nu, const QuadratureGrid& grid, int trunc) {
    std::vector<double> v = grid.sample(phi);
    for (double x : v)
        if (!(x > 0.0))
            throw std::domain_error("cole_hopf: Phi must be strictly positive on the grid");
    for (double& x : v) x = -2.0 * nu * std::log(x);
    return grid.project(v, trunc);
}

ScalarField inverse_cole_hopf(const ScalarField& w, double nu, const QuadratureGrid& grid,
                              int trunc) {
    std::vector<double> v = grid.sample(w);
    for (double& x : v) x = std::exp(-x / (2.0 * nu));
    return grid.project(v, trunc);
}

namespace {

bool is_constant_field(const ScalarField& f) {
    for (const auto& [m, a] : f.coeffs())
        if (!m.is_zero() && a != 0.0) return false;
    return true;
}

void apply_heat(ScalarField& phi, double nu, double dtau) {
    ScalarField out(phi.dim(), phi.trunc());
    for (const auto& [m, a] : phi.coeffs()) out.add(m, a * std::exp(-nu * m.norm2() * dtau));
    phi = std::move(out);
}

}  // namespace

ValueFunction solve_heat_with_potential(const ControlProblem& prob, int steps) {
    if (prob.nu <= 0.0)
        throw std::invalid_argument("solve_heat_with_potential: nu must be positive");
    if (steps < 1) throw std::invalid_argument("solve_heat_with_potential: steps must be >= 1");
    const QuadratureGrid grid = prob.make_grid();

    ValueFunction vf;
    vf.nu = prob.nu;
    vf.times.resize(static_cast<size_t>(steps) + 1);
    vf.Phi.resize(vf.times.size());
    const double dtau = prob.T / steps;
    for (size_t i = 0; i < vf.times.size(); ++i) vf.times[i] = prob.T * static_cast<double>(i) / steps;

    // terminal data exp(-Psi / 2 nu), representability checked by round trip
    ScalarField phi = inverse_cole_hopf(extend_to(prob.Psi, prob.K), prob.nu, grid, prob.K);
    {
        std::vector<double> exact = grid.sample(extend_to(prob.Psi, prob.K));
        for (double& x : exact) x = std::exp(-x / (2.0 * prob.nu));
        const double err = grid.max_error(phi, exact);
        if (err > 1e-8)
            throw std::invalid_argument(
                "solve_heat_with_potential: exp(-Psi/2nu) is not representable at this band "
                "(round-trip error " +
                std::to_string(err) + ")");
    }
    vf.Phi.back() = phi;

    const bool no_potential = prob.V.max_abs_coeff() == 0.0;
    const bool const_potential = !no_potential && is_constant_field(prob.V);
    const double vconst = prob.V.mean();

    std::vector<double> v_vals;
    std::vector<double> half_factor;
    if (!no_potential && !const_potential) {
        v_vals = grid.sample(prob.V);
        half_factor.resize(v_vals.size());
        for (size_t i = 0; i < v_vals.size(); ++i)
            half_factor[i] = std::exp(v_vals[i] * dtau / (4.0 * prob.nu));
    }

    for (int m = steps - 1; m >= 0; --m) {
        if (no_potential) {
            apply_heat(phi, prob.nu, dtau);
        } else if (const_potential) {
            apply_heat(phi, prob.nu, dtau);
            phi *= std::exp(vconst * dtau / (2.0 * prob.nu));
        } else {
            // Strang: half potential, full heat, half potential
            std::vector<double> vals = grid.sample(phi);
            for (size_t i = 0; i < vals.size(); ++i) vals[i] *= half_factor[i];
            phi = grid.project(vals, prob.K);
            apply_heat(phi, prob.nu, dtau);
            vals = grid.sample(phi);
            for (size_t i = 0; i < vals.size(); ++i) vals[i] *= half_factor[i];
            phi = grid.project(vals, prob.K);
        }
        vf.Phi[static_cast<size_t>(m)] = phi;
    }
    return vf;
}

ValueFunction solve_hjb(const ControlProblem& prob, int steps) {
    ValueFunction vf = solve_heat_with_potential(prob, steps);
    const QuadratureGrid grid = prob.make_grid();
    vf.W.resize(vf.Phi.size());
    for (size_t i = 0; i < vf.Phi.size(); ++i)
        vf.W[i] = cole_hopf(vf.Phi[i], prob.nu, grid, prob.K);
    return vf;
}

namespace {

/// dW/dt at a stored time by fourth-order finite differences of the stored
/// slices, so the residuals below see the actual time-stepping error rather
/// than restating the transform identity.
ScalarField w_time_derivative(const ValueFunction& vf, size_t idx) {
    const auto& W = vf.W;
    const size_t n = W.size();
    if (n < 5)
        throw std::invalid_argument("value function needs >= 5 stored times for residuals");
    const double h = vf.times[1] - vf.times[0];
    auto comb = [&](std::initializer_list<std::pair<int, double>> terms) {
        ScalarField out(W[0].dim(), W[0].trunc());
        for (auto [off, c] : terms) {
            ScalarField t = W[static_cast<size_t>(off)];
            t *= c / (12.0 * h);
            out += t;
        }
        return out;
    };
    const int i = static_cast<int>(idx);
    const int last = static_cast<int>(n) - 1;
    if (i >= 2 && i <= last - 2)
        return comb({{i - 2, 1.0}, {i - 1, -8.0}, {i + 1, 8.0}, {i + 2, -1.0}});
    if (i == 0)
        return comb({{0, -25.0}, {1, 48.0}, {2, -36.0}, {3, 16.0}, {4, -3.0}});
    if (i == 1)
        return comb({{0, -3.0}, {1, -10.0}, {2, 18.0}, {3, -6.0}, {4, 1.0}});
    if (i == last)
        return comb(
            {{last, 25.0}, {last - 1, -48.0}, {last - 2, 36.0}, {last - 3, -16.0}, {last - 4, 3.0}});
    return comb(
        {{last, 3.0}, {last - 1, 10.0}, {last - 2, -18.0}, {last - 3, 6.0}, {last - 4, -1.0}});
}

ScalarField grad_squared(const ScalarField& w, const QuadratureGrid& grid, int trunc) {
    VectorField g = gradient(w);
    std::vector<double> acc(grid.size(), 0.0);
    for (int c = 0; c < w.dim(); ++c) {
        std::vector<double> gc = grid.sample(component(g, c));
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += gc[i] * gc[i];
    }
    return grid.project(acc, trunc);
}

}  // namespace

double hjb_residual_at(const ValueFunction& vf, const ControlProblem& prob, size_t idx) {
    if (vf.W.empty()) throw std::invalid_argument("hjb_residual_at: W not computed");
    const QuadratureGrid grid = prob.make_grid();
    const ScalarField& w = vf.W.at(idx);
    ScalarField r = w_time_derivative(vf, idx);
    ScalarField lw = laplacian(w);
    lw *= prob.nu;
    r += lw;
    ScalarField g2 = grad_squared(w, grid, prob.K);
    g2 *= 0.5;
    r -= g2;
    r -= extend_to(prob.V, prob.K);
    return l2_norm(r);
}

double hjb_residual_max(const ValueFunction& vf, const ControlProblem& prob) {
    double worst = 0.0;
    for (size_t i = 0; i < vf.W.size(); ++i)
        worst = std::max(worst, hjb_residual_at(vf, prob, i));
    return worst;
}

VectorField optimal_control(const ValueFunction& vf, double t) {
    ScalarField w = vf.W_at(t);
    VectorField g = gradient(w);
    g *= -1.0;
    return g;
}

BurgersReport burgers_from_value(const ValueFunction& vf, const ControlProblem& prob) {
    BurgersReport rep;
    const QuadratureGrid grid = prob.make_grid();
    for (size_t i = 0; i < vf.W.size(); ++i) {
        const ScalarField& w = vf.W[i];
        VectorField v = gradient(w);
        // Burgers residual at reversed time: -grad(dW/dt) + nu box v + (v.grad)v + grad V
        VectorField r = gradient(w_time_derivative(vf, i));
        r *= -1.0;
        VectorField box = hodge_laplacian(v);
        box *= prob.nu;
        r += box;
        r += advect(v, v, Dealias::project_back);
        r += extend_to(gradient(prob.V), prob.K);
        const double res = l2_norm(r);
        rep.per_time.push_back(res);
        rep.max_residual = std::max(rep.max_residual, res);

        VectorField comm = laplacian(gradient(w)) - gradient(laplacian(w));
        rep.commutation_error = std::max(rep.commutation_error, comm.max_abs_coeff());
    }
    return rep;
}

DppReport dpp_check(const ControlProblem& prob, const ValueFunction& vf, const Vec& x0, double t0,
                    const std::vector<VectorField>& perturbations, double dt, int n_paths,
                    uint64_t seed) {
    if (n_paths <= 0) throw std::invalid_argument("dpp_check: n_paths must be positive");
    DppReport rep;
    rep.W_value = vf.W_at(t0).eval(x0);

    const int nsteps = static_cast<int>(std::lround((prob.T - t0) / dt));
    if (nsteps < 1 || std::abs(nsteps * dt - (prob.T - t0)) > 1e-9)
        throw std::invalid_argument("dpp_check: horizon must be a positive multiple of dt");

    // frozen per-step optimal controls; terminal cost is the solved terminal
    // value W(T, .) so the Monte-Carlo problem matches the spectral one
    std::vector<VectorEvaluator> opt;
    opt.reserve(static_cast<size_t>(nsteps) + 1);
    for (int s = 0; s <= nsteps; ++s)
        opt.emplace_back(optimal_control(vf, t0 + s * dt));
    const ScalarEvaluator terminal(vf.W.back());

    ControlledCostSpec spec;
    spec.V = &prob.V;
    spec.continuation = [&terminal](const Vec& x) { return terminal(x); };
    spec.t0 = t0;
    spec.T = prob.T;
    spec.dt = dt;
    spec.nu = prob.nu;
    spec.x0 = x0;
    spec.n_paths = n_paths;
    spec.seed = seed;
    spec.control_at = [&opt](int s) -> const VectorEvaluator& {
        return opt[static_cast<size_t>(s)];
    };
    rep.optimal = estimate_controlled_cost(spec);
    rep.optimal_within_3sigma =
        std::abs(rep.optimal.value - rep.W_value) <= 3.0 * rep.optimal.stderr_;

    rep.perturbed_above = true;
    for (size_t pi = 0; pi < perturbations.size(); ++pi) {
        std::vector<VectorEvaluator> ctrl;
        ctrl.reserve(opt.size());
        for (int s = 0; s <= nsteps; ++s) {
            VectorField u = optimal_control(vf, t0 + s * dt);
            u += extend_to(retruncate(perturbations[pi], std::min(perturbations[pi].trunc(), u.trunc())),
                           u.trunc());
            ctrl.emplace_back(u);
        }
        ControlledCostSpec pspec = spec;
        pspec.seed = seed + 1000 + pi;
        pspec.control_at = [&ctrl](int s) -> const VectorEvaluator& {
            return ctrl[static_cast<size_t>(s)];
        };
        DppControlResult r;
        r.label = "perturbation-" + std::to_string(pi);
        r.cost = estimate_controlled_cost(pspec);
        r.gap_over_sigma = (r.cost.value - rep.W_value) / std::max(r.cost.stderr_, 1e-300);
        if (r.cost.value < rep.W_value - 3.0 * r.cost.stderr_) rep.perturbed_above = false;
        rep.perturbed.push_back(std::move(r));
    }

    // sub-interval identity over [t0, t0 + h] with continuation W(t0 + h, .)
    const int hsteps = std::max(1, nsteps / 2);
    rep.subinterval_h = hsteps * dt;
    const ScalarField w_cont = vf.W_at(t0 + rep.subinterval_h);
    const ScalarEvaluator cont_eval(w_cont);
    ControlledCostSpec sspec = spec;
    sspec.T = t0 + rep.subinterval_h;
    sspec.seed = seed + 77;
    sspec.continuation = [&cont_eval](const Vec& x) { return cont_eval(x); };
    rep.subinterval = estimate_controlled_cost(sspec);
    rep.subinterval_within_3sigma =
        std::abs(rep.subinterval.value - rep.W_value) <= 3.0 * rep.subinterval.stderr_;
    return rep;
}

HjReport hj_euler(const ControlProblem& prob, const std::vector<double>& nus, int steps,
                  double char_horizon, double char_dt) {
    HjReport rep;
    rep.nus = nus;
    const QuadratureGrid grid = prob.make_grid();
    std::vector<ScalarField> w0s;
    for (double nu : nus) {
        ControlProblem p = prob;
        p.nu = nu;
        ValueFunction vf = solve_hjb(p, steps);
        w0s.push_back(vf.W.front());

        // inviscid residual: drop the nu Lap W term
        double worst = 0.0;
        for (size_t i = 0; i < vf.W.size(); ++i) {
            ScalarField r = w_time_derivative(vf, i);
            ScalarField g2 = grad_squared(vf.W[i], grid, p.K);
            g2 *= 0.5;
            r -= g2;
            r -= extend_to(p.V, p.K);
            worst = std::max(worst, l2_norm(r));
        }
        rep.hj_residuals.push_back(worst);

        // characteristics: unprojected inviscid Burgers from the terminal
        // gradient, compared with grad W(T - t)
        if (char_horizon > 0.0) {
            VectorField v = gradient(vf.W.back());
            const int csteps = static_cast<int>(std::lround(char_horizon / char_dt));
            VectorField gradV = extend_to(gradient(prob.V), prob.K);
            auto rhs = [&](const VectorField& z) {
                VectorField f = advect(z, z, Dealias::project_back);
                f *= -1.0;
                f -= gradV;
                return f;
            };
            for (int s = 0; s < csteps; ++s) {
                VectorField k1 = rhs(v);
                VectorField k2 = rhs(v + (0.5 * char_dt) * k1);
                VectorField k3 = rhs(v + (0.5 * char_dt) * k2);
                VectorField k4 = rhs(v + char_dt * k3);
                v += (char_dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            VectorField ref = gradient(vf.W_at(prob.T - csteps * char_dt));
            rep.characteristic_diffs.push_back(l2_norm(v - ref));
        }
    }
    for (size_t i = 0; i + 1 < w0s.size(); ++i)
        rep.cauchy_diffs.push_back(l2_norm(w0s[i] - w0s[i + 1]));
    return rep;
}

}  // namespace sdifflab
