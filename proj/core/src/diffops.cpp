#include "sdifflab/diffops.hpp"

#include <cmath>

namespace sdifflab {

ScalarField partial_derivative(const ScalarField& f, int m) {
    ScalarField out(f.dim(), f.trunc());
    for (const auto& [mode, a] : f.coeffs()) {
        const double km = mode.k[static_cast<size_t>(m)];
        if (km == 0.0 || a == 0.0) continue;
        if (mode.parity == Parity::cos)
            out.add(Mode{mode.k, Parity::sin}, -a * km);
        else
            out.add(Mode{mode.k, Parity::cos}, a * km);
    }
    return out;
}

VectorField partial_derivative(const VectorField& u, int m) {
    VectorField out(u.dim(), u.trunc());
    for (const auto& [mode, a] : u.coeffs()) {
        const double km = mode.k[static_cast<size_t>(m)];
        if (km == 0.0) continue;
        Vec v(u.dim());
        for (int i = 0; i < u.dim(); ++i) v[i] = a[i] * km;
        if (mode.parity == Parity::cos)
            out.add(Mode{mode.k, Parity::sin}, -1.0 * v);
        else
            out.add(Mode{mode.k, Parity::cos}, v);
    }
    return out;
}

VectorField gradient(const ScalarField& f) {
    VectorField out(f.dim(), f.trunc());
    for (const auto& [mode, a] : f.coeffs()) {
        if (a == 0.0) continue;
        Vec v(f.dim());
        for (int i = 0; i < f.dim(); ++i) v[i] = a * mode.k[static_cast<size_t>(i)];
        if (mode.is_zero()) continue;
        if (mode.parity == Parity::cos)
            out.add(Mode{mode.k, Parity::sin}, -1.0 * v);
        else
            out.add(Mode{mode.k, Parity::cos}, v);
    }
    return out;
}

ScalarField divergence(const VectorField& u) {
    ScalarField out(u.dim(), u.trunc());
    for (const auto& [mode, a] : u.coeffs()) {
        if (mode.is_zero()) continue;
        double dot = 0.0;
        for (int i = 0; i < u.dim(); ++i) dot += a[i] * mode.k[static_cast<size_t>(i)];
        if (dot == 0.0) continue;
        if (mode.parity == Parity::cos)
            out.add(Mode{mode.k, Parity::sin}, -dot);
        else
            out.add(Mode{mode.k, Parity::cos}, dot);
    }
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    ScalarField out(f.dim(), f.trunc());
    for (const auto& [mode, a] : f.coeffs()) out.add(mode, -a * mode.norm2());
    return out;
}

VectorField laplacian(const VectorField& u) {
    VectorField out(u.dim(), u.trunc());
    for (const auto& [mode, a] : u.coeffs()) {
        Vec v(u.dim());
        for (int i = 0; i < u.dim(); ++i) v[i] = -a[i] * mode.norm2();
        out.add(mode, v);
    }
    out.set_div_free(u.div_free());
    return out;
}

VectorField hodge_laplacian(const VectorField& u) {
    VectorField out = laplacian(u);
    out *= -1.0;
    out.set_div_free(u.div_free());
    return out;
}

namespace {

// cos a cos b = (cos(a-b) + cos(a+b))/2      sin a sin b = (cos(a-b) - cos(a+b))/2
// sin a cos b = (sin(a+b) + sin(a-b))/2      cos a sin b = (sin(a+b) - sin(a-b))/2
template <typename Sink>
void combine_terms(const Mode& p, double A, const Mode& q, double B, Sink&& sink) {
    const double half = 0.5 * A * B;
    std::array<int, 3> sum{p.k[0] + q.k[0], p.k[1] + q.k[1], p.k[2] + q.k[2]};
    std::array<int, 3> dif{p.k[0] - q.k[0], p.k[1] - q.k[1], p.k[2] - q.k[2]};
    if (p.parity == Parity::cos && q.parity == Parity::cos) {
        sink(Parity::cos, dif, half);
        sink(Parity::cos, sum, half);
    } else if (p.parity == Parity::sin && q.parity == Parity::sin) {
        sink(Parity::cos, dif, half);
        sink(Parity::cos, sum, -half);
    } else if (p.parity == Parity::sin && q.parity == Parity::cos) {
        sink(Parity::sin, sum, half);
        sink(Parity::sin, dif, half);
    } else {  // cos * sin
        sink(Parity::sin, sum, half);
        sink(Parity::sin, dif, -half);
    }
}

}  // namespace

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("multiply: dimension mismatch");
    ScalarField out(a.dim(), a.trunc() + b.trunc());
    for (const auto& [p, A] : a.coeffs()) {
        if (A == 0.0) continue;
        for (const auto& [q, B] : b.coeffs()) {
            if (B == 0.0) continue;
            combine_terms(p, A, q, B,
                          [&](Parity par, const std::array<int, 3>& k, double v) {
                              out.add_term(par, k, v);
                          });
        }
    }
    return out;
}

ScalarField advect_scalar(const VectorField& u, const ScalarField& f, Dealias dealias) {
    if (u.dim() != f.dim()) throw std::invalid_argument("advect_scalar: dimension mismatch");
    if (u.trunc() != f.trunc())
        throw std::invalid_argument("advect_scalar: mixing truncations is an error");
    ScalarField out(f.dim(), u.trunc() + f.trunc());
    for (int m = 0; m < u.dim(); ++m) {
        ScalarField df = partial_derivative(f, m);
        if (df.mode_count() == 0) continue;
        out += multiply(component(u, m), df);
    }
    if (dealias == Dealias::project_back) return retruncate(out, f.trunc());
    return out;
}

VectorField advect(const VectorField& u, const VectorField& w, Dealias dealias) {
    require_compatible(u, w, "advect");
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<size_t>(u.dim()));
    for (int c = 0; c < u.dim(); ++c)
        comps.push_back(advect_scalar(u, component(w, c), Dealias::keep_exact));
    VectorField out = assemble(comps);
    if (dealias == Dealias::project_back) return retruncate(out, u.trunc());
    return out;
}

VectorField lie_bracket(const VectorField& u, const VectorField& w, Dealias dealias) {
    VectorField out = advect(u, w, Dealias::keep_exact);
    out -= advect(w, u, Dealias::keep_exact);
    if (dealias == Dealias::project_back) return retruncate(out, u.trunc());
    return out;
}

LerayResult leray_project(const VectorField& w) {
    const int d = w.dim();
    VectorField sol(d, w.trunc());
    ScalarField pot(d, w.trunc());
    for (const auto& [mode, raw] : w.coeffs()) {
        Vec a(d);
        for (int i = 0; i < d; ++i) a[i] = raw[i];
        if (mode.is_zero()) {
            sol.add(mode, a);  // constants are divergence-free and belong to the algebra
            continue;
        }
        Vec kv(d);
        for (int i = 0; i < d; ++i) kv[i] = mode.k[static_cast<size_t>(i)];
        const double k2 = kv.norm2();
        const double along = a.dot(kv) / k2;
        if (d == 1) {
            // on T^1 every oscillatory mode is longitudinal
        } else if (d == 2) {
            // transverse construction: coefficients proportional to k-perp,
            // orthogonal to k by the integer cross cancellation
            Vec kp(-kv[1], kv[0]);
            const double alpha = a.dot(kp) / k2;
            if (alpha != 0.0) sol.add(mode, alpha * kp);
        } else {
            Vec par = along * kv;
            Vec t = a - par;
            if (t.norm2() != 0.0) sol.add(mode, t);
        }
        // gradient(q): cos modes of q feed -q k into sin modes, sin modes feed +q k into cos
        if (along != 0.0) {
            if (mode.parity == Parity::cos)
                pot.add(Mode{mode.k, Parity::sin}, along);
            else
                pot.add(Mode{mode.k, Parity::cos}, -along);
        }
    }
    sol.set_div_free(true);
    return LerayResult{std::move(sol), std::move(pot)};
}

namespace {

double parseval_weight(const Mode& m, int dim) {
    return m.is_zero() ? torus_volume(dim) : 0.5 * torus_volume(dim);
}

}  // namespace

double l2_inner(const ScalarField& a, const ScalarField& b) {
    require_compatible(a, b, "l2_inner");
    double s = 0.0;
    const auto& bc = b.coeffs();
    for (const auto& [m, av] : a.coeffs()) {
        auto it = bc.find(m);
        if (it == bc.end()) continue;
        s += parseval_weight(m, a.dim()) * av * it->second;
    }
    return s;
}

double l2_inner(const VectorField& a, const VectorField& b) {
    require_compatible(a, b, "l2_inner");
    double s = 0.0;
    const auto& bc = b.coeffs();
    for (const auto& [m, av] : a.coeffs()) {
        auto it = bc.find(m);
        if (it == bc.end()) continue;
        double dot = 0.0;
        for (int i = 0; i < a.dim(); ++i) dot += av[i] * it->second[i];
        s += parseval_weight(m, a.dim()) * dot;
    }
    return s;
}

double l2_norm(const ScalarField& a) { return std::sqrt(std::max(0.0, l2_inner(a, a))); }
double l2_norm(const VectorField& a) { return std::sqrt(std::max(0.0, l2_inner(a, a))); }

double energy(const VectorField& u) { return 0.5 * l2_inner(u, u); }

ScalarField curl2d(const VectorField& u) {
    if (u.dim() != 2) throw std::invalid_argument("curl2d: requires d = 2");
    ScalarField out = partial_derivative(component(u, 1), 0);
    out -= partial_derivative(component(u, 0), 1);
    return out;
}

double enstrophy(const VectorField& u) {
    ScalarField w = curl2d(u);
    return 0.5 * l2_inner(w, w);
}

Vec momentum(const VectorField& u) {
    Vec m = u.coeff(Mode{});
    return torus_volume(u.dim()) * m;
}

ScalarField dirac_projection(int dim, int trunc, const Vec& x0) {
    if (x0.dim != dim) throw std::invalid_argument("dirac_projection: point dimension mismatch");
    ScalarField out(dim, trunc);
    const double inv_vol = 1.0 / torus_volume(dim);
    out.add(Mode{}, inv_vol);
    // enumerate canonical k != 0 with |k|_inf <= trunc
    std::array<int, 3> k{0, 0, 0};
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int i = 0; i < dim; ++i) {
        lo[i] = -trunc;
        hi[i] = trunc;
    }
    for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0])
        for (k[1] = lo[1]; k[1] <= hi[1]; ++k[1])
            for (k[2] = lo[2]; k[2] <= hi[2]; ++k[2]) {
                if (canonical_sign(k) <= 0) continue;
                Mode mc{k, Parity::cos}, ms{k, Parity::sin};
                double ph = mc.phase(x0);
                out.add(mc, 2.0 * inv_vol * std::cos(ph));
                out.add(ms, 2.0 * inv_vol * std::sin(ph));
            }
    return out;
}

}  // namespace sdifflab
