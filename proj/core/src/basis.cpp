#include "sdifflab/basis.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace sdifflab {

std::vector<Vec> perp_basis(const std::array<int, 3>& k, int dim) {
    Vec kv(dim);
    for (int i = 0; i < dim; ++i) kv[i] = k[static_cast<size_t>(i)];
    const double kn = kv.norm();
    if (kn == 0.0) throw std::invalid_argument("perp_basis: k = 0 has no transverse span");
    std::vector<Vec> out;
    if (dim == 1) return out;  // k-perp is trivial on T^1
    if (dim == 2) {
        out.push_back(Vec(-kv[1] / kn, kv[0] / kn));
        return out;
    }
    // d = 3: cross k with the axis of smallest |k| component for stability
    int ax = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(kv[i]) < std::abs(kv[ax])) ax = i;
    Vec a(0.0, 0.0, 0.0);
    a[ax] = 1.0;
    Vec e1(3);
    e1[0] = kv[1] * a[2] - kv[2] * a[1];
    e1[1] = kv[2] * a[0] - kv[0] * a[2];
    e1[2] = kv[0] * a[1] - kv[1] * a[0];
    e1 *= 1.0 / e1.norm();
    Vec e2(3);
    e2[0] = (kv[1] * e1[2] - kv[2] * e1[1]) / kn;
    e2[1] = (kv[2] * e1[0] - kv[0] * e1[2]) / kn;
    e2[2] = (kv[0] * e1[1] - kv[1] * e1[0]) / kn;
    out.push_back(e1);
    out.push_back(e2);
    return out;
}

Mat QSpectrum::certificate_matrix() const {
    // Per parity pair, cos^2 + sin^2 collapses the pointwise outer product to
    // amp amp^T, so each oscillatory entry carries half of its pair; constant
    // elements contribute amp amp^T outright.
    Mat S(dim);
    for (const auto& el : entries) {
        Vec amp(dim);
        // amplitude vector: the coefficient of the single stored mode
        for (const auto& [m, a] : el.field.coeffs()) {
            for (int i = 0; i < dim; ++i) amp[i] = a[i];
            break;
        }
        const double c2 = el.weight * el.weight;
        const double share = el.mode.is_zero() ? 1.0 : 0.5;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) S(i, j) += c2 * share * amp[i] * amp[j];
    }
    return S;
}

QSpectrum build_basis(int dim, int K, WeightProfile profile, double decay_exponent) {
    if (K < 1) throw std::invalid_argument("build_basis: K must be >= 1");
    if (dim < 1 || dim > 3) throw std::invalid_argument("build_basis: dim must be 1..3");

    QSpectrum Q;
    Q.dim = dim;
    Q.trunc = K;
    Q.profile = profile;
    Q.decay_exponent = profile == WeightProfile::decay ? decay_exponent : 0.0;

    const double vol = torus_volume(dim);
    const double osc_amp = std::sqrt(2.0 / vol);   // |n cos(k.)e|_{L2} = 1
    const double const_amp = std::sqrt(1.0 / vol); // |n e_m|_{L2} = 1

    // canonical wavevector lines, ordered
    std::vector<std::array<int, 3>> lines;
    std::array<int, 3> k{0, 0, 0};
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int i = 0; i < dim; ++i) {
        lo[i] = -K;
        hi[i] = K;
    }
    for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0])
        for (k[1] = lo[1]; k[1] <= hi[1]; ++k[1])
            for (k[2] = lo[2]; k[2] <= hi[2]; ++k[2])
                if (canonical_sign(k) > 0) lines.push_back(k);
    std::sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) {
        auto n2 = [](const std::array<int, 3>& v) {
            return v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        };
        if (n2(a) != n2(b)) return n2(a) < n2(b);
        return a < b;
    });
    Q.direction_count = static_cast<int>(lines.size());

    auto raw_weight = [&](const std::array<int, 3>& kk) {
        if (profile == WeightProfile::flat) return 1.0;
        double n2 = kk[0] * kk[0] + kk[1] * kk[1] + kk[2] * kk[2];
        return n2 == 0.0 ? 1.0 : std::pow(n2, -0.5 * decay_exponent);
    };

    if (dim >= 2) {
        for (const auto& kk : lines) {
            const std::vector<Vec> perp = perp_basis(kk, dim);
            for (int j = 0; j < static_cast<int>(perp.size()); ++j) {
                for (Parity par : {Parity::cos, Parity::sin}) {
                    BasisElement el;
                    el.mode = Mode{kk, par, j};
                    el.weight = raw_weight(kk);
                    VectorField f(dim, K);
                    f.add(Mode{kk, par}, osc_amp * perp[static_cast<size_t>(j)]);
                    f.set_div_free(true);
                    el.field = std::move(f);
                    Q.entries.push_back(std::move(el));
                }
            }
        }
    } else {
        Q.degenerate = true;  // e_{k,j} needs d >= 2
    }

    for (int m = 0; m < dim; ++m) {
        BasisElement el;
        el.mode = Mode{{0, 0, 0}, Parity::cos, m};
        el.weight = 1.0;
        VectorField f(dim, K);
        Vec e(dim);
        e[m] = const_amp;
        f.add(Mode{}, e);
        f.set_div_free(true);
        el.field = std::move(f);
        Q.entries.push_back(std::move(el));
    }

    std::sort(Q.entries.begin(), Q.entries.end(),
              [](const BasisElement& a, const BasisElement& b) { return a.mode < b.mode; });

    // one global rescale so that sum c_i^2 A_i A_i^T = Id exactly
    Mat S = Q.certificate_matrix();
    double iso = S.trace() / dim;
    Mat dev = S - iso * Mat::identity(dim);
    if (dev.max_abs() > 1e-12 * std::max(1.0, iso))
        throw std::runtime_error("build_basis: certificate sum is not isotropic");
    const double lambda = 1.0 / std::sqrt(iso);
    for (auto& el : Q.entries) el.weight *= lambda;
    return Q;
}

double check_pointwise_metric(const QSpectrum& Q, const Vec& v, const Vec& x) {
    double s = 0.0;
    for (const auto& el : Q.entries) {
        double a = el.field.eval(x).dot(v);
        s += el.weight * el.weight * a * a;
    }
    return s;
}

VectorField sum_self_advection(const QSpectrum& Q) {
    VectorField out(Q.dim, 2 * Q.trunc);
    for (const auto& el : Q.entries) {
        VectorField t = advect(el.field, el.field, Dealias::keep_exact);
        t *= el.weight * el.weight;
        out += t;
    }
    return out;
}

int AntisymmetricField::pair_index(int m, int n, int dim) {
    (void)dim;
    if (m == 0 && n == 1) return 0;
    if (m == 0 && n == 2) return 1;
    if (m == 1 && n == 2) return 2;
    throw std::invalid_argument("AntisymmetricField: pair must have m < n");
}

double AntisymmetricField::max_abs_coeff() const {
    double s = 0.0;
    for (const auto& c : comps) s = std::max(s, c.max_abs_coeff());
    return s;
}

AntisymmetricField sum_wedge(const QSpectrum& Q, const VectorField& X) {
    if (X.dim() != Q.dim) throw std::invalid_argument("sum_wedge: dimension mismatch");
    AntisymmetricField out;
    out.dim = Q.dim;
    const int npairs = Q.dim * (Q.dim - 1) / 2;
    const int band = X.trunc() + 2 * Q.trunc;  // content band of A ^ grad_X A
    for (int p = 0; p < npairs; ++p) out.comps.emplace_back(Q.dim, band);
    if (npairs == 0) return out;
    const int w = std::max(X.trunc(), Q.trunc);
    const VectorField Xw = extend_to(X, w);
    for (const auto& el : Q.entries) {
        const VectorField Aw = extend_to(el.field, w);
        VectorField dXA = retruncate(advect(Xw, Aw, Dealias::keep_exact), X.trunc() + Q.trunc);
        const double c2 = el.weight * el.weight;
        for (int m = 0; m < Q.dim; ++m)
            for (int n = m + 1; n < Q.dim; ++n) {
                ScalarField term = multiply(component(el.field, m), component(dXA, n));
                term -= multiply(component(el.field, n), component(dXA, m));
                term *= c2;
                out.comps[static_cast<size_t>(AntisymmetricField::pair_index(m, n, Q.dim))] +=
                    retruncate(term, band);
            }
    }
    return out;
}

ScalarField generator_sum(const QSpectrum& Q, const ScalarField& f) {
    if (f.dim() != Q.dim) throw std::invalid_argument("generator_sum: dimension mismatch");
    const int b1 = f.trunc() + Q.trunc;      // content band of (A . grad) f
    const int b2 = b1 + Q.trunc;             // content band of the second application
    const int w1 = std::max(f.trunc(), Q.trunc);
    ScalarField out(Q.dim, b2);
    for (const auto& el : Q.entries) {
        ScalarField Af = retruncate(
            advect_scalar(extend_to(el.field, w1), extend_to(f, w1), Dealias::keep_exact), b1);
        ScalarField AAf = retruncate(
            advect_scalar(extend_to(el.field, b1), Af, Dealias::keep_exact), b2);
        AAf *= el.weight * el.weight;
        out += AAf;
    }
    return retruncate(out, f.trunc());
}

VectorField lie_hodge(const QSpectrum& Q, const VectorField& u, Dealias dealias) {
    if (u.dim() != Q.dim) throw std::invalid_argument("lie_hodge: dimension mismatch");
    const int b1 = u.trunc() + Q.trunc;
    const int b2 = b1 + Q.trunc;
    const int w1 = std::max(u.trunc(), Q.trunc);
    VectorField out(Q.dim, b2);
    for (const auto& el : Q.entries) {
        VectorField LAu = retruncate(
            lie_bracket(extend_to(el.field, w1), extend_to(u, w1), Dealias::keep_exact), b1);
        VectorField LLu = retruncate(
            lie_bracket(extend_to(el.field, b1), LAu, Dealias::keep_exact), b2);
        LLu *= -el.weight * el.weight;
        out += LLu;
    }
    out.set_div_free(u.div_free());
    if (dealias == Dealias::project_back) return retruncate(out, u.trunc());
    return out;
}

double q_trace(const QSpectrum& Q) {
    double s = 0.0;
    for (const auto& el : Q.entries) s += el.weight * el.weight;
    return s;
}

VectorField qsqrt_expand(const QSpectrum& Q, std::span<const double> xi) {
    if (xi.size() != Q.entries.size())
        throw std::invalid_argument("qsqrt_expand: coefficient count mismatch");
    VectorField out(Q.dim, Q.trunc);
    for (size_t i = 0; i < xi.size(); ++i) {
        VectorField t = Q.entries[i].field;
        t *= Q.entries[i].weight * xi[i];
        out += t;
    }
    out.set_div_free(true);
    return out;
}

CylinderPotential CylinderPotential::separable(std::vector<ScalarField> slots,
                                               std::vector<Vec> pts) {
    if (slots.size() != pts.size())
        throw std::invalid_argument("CylinderPotential: one slot field per point");
    auto shared = std::make_shared<std::vector<ScalarField>>(std::move(slots));
    CylinderPotential P;
    P.points = std::move(pts);
    P.value = [shared](std::span<const Vec> ys) {
        double s = 0.0;
        for (size_t i = 0; i < ys.size(); ++i) s += (*shared)[i].eval(ys[i]);
        return s;
    };
    P.slot_gradient = [shared](std::span<const Vec> ys, int slot) {
        return gradient((*shared)[static_cast<size_t>(slot)]).eval(ys[static_cast<size_t>(slot)]);
    };
    return P;
}

double CylinderPotential::validate_gradients(double eps) const {
    double worst = 0.0;
    std::vector<Vec> ys = points;
    for (size_t i = 0; i < points.size(); ++i) {
        Vec g = slot_gradient(ys, static_cast<int>(i));
        for (int c = 0; c < points[i].dim; ++c) {
            std::vector<Vec> up = ys, dn = ys;
            up[i][c] += eps;
            dn[i][c] -= eps;
            double fd = (value(up) - value(dn)) / (2.0 * eps);
            worst = std::max(worst, std::abs(fd - g[c]));
        }
    }
    return worst;
}

VectorField sdiff_gradient_cylinder(const QSpectrum& Q, const CylinderPotential& P) {
    if (P.points.empty()) throw std::invalid_argument("sdiff_gradient_cylinder: no points");
    VectorField flux(Q.dim, Q.trunc);
    for (size_t i = 0; i < P.points.size(); ++i) {
        const Vec w = P.slot_gradient(P.points, static_cast<int>(i));
        const ScalarField delta = dirac_projection(Q.dim, Q.trunc, P.points[i]);
        for (const auto& [m, a] : delta.coeffs()) {
            Vec v(Q.dim);
            for (int c = 0; c < Q.dim; ++c) v[c] = a * w[c];
            flux.add(m, v);
        }
    }
    return leray_project(flux).solenoidal;
}

VectorField sdiff_gradient_cylinder_expanded(const QSpectrum& Q, const CylinderPotential& P) {
    VectorField flux(Q.dim, Q.trunc);
    for (size_t i = 0; i < P.points.size(); ++i) {
        const Vec w = P.slot_gradient(P.points, static_cast<int>(i));
        const ScalarField delta = dirac_projection(Q.dim, Q.trunc, P.points[i]);
        for (const auto& [m, a] : delta.coeffs()) {
            Vec v(Q.dim);
            for (int c = 0; c < Q.dim; ++c) v[c] = a * w[c];
            flux.add(m, v);
        }
    }
    VectorField out(Q.dim, Q.trunc);
    for (const auto& el : Q.entries) {
        // unweighted orthonormal expansion; completeness at truncation makes
        // this agree with the Leray route
        double coeff = l2_inner(flux, el.field);
        VectorField t = el.field;
        t *= coeff;
        out += t;
    }
    out.set_div_free(true);
    return out;
}

VectorField sdiff_gradient_integral(const QSpectrum& Q, const ScalarField& V) {
    if (V.dim() != Q.dim) throw std::invalid_argument("sdiff_gradient_integral: dimension mismatch");
    const int band = std::max(V.trunc(), Q.trunc);
    VectorField gV = extend_to(gradient(V), band);
    VectorField out(Q.dim, Q.trunc);
    for (const auto& el : Q.entries) {
        double coeff = l2_inner(gV, extend_to(el.field, band));
        VectorField t = el.field;
        t *= coeff;
        out += t;
    }
    out.set_div_free(true);
    return out;
}

Vec flow_point(const VectorField& A, const Vec& x0, double t, int substeps) {
    Vec x = x0;
    const double h = t / substeps;
    for (int s = 0; s < substeps; ++s) {
        Vec k1 = A.eval(x);
        Vec k2 = A.eval(x + 0.5 * h * k1);
        Vec k3 = A.eval(x + 0.5 * h * k2);
        Vec k4 = A.eval(x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x.wrapped();
}

nlohmann::json to_json(const QSpectrum& Q) {
    nlohmann::json j;
    j["dim"] = Q.dim;
    j["trunc"] = Q.trunc;
    j["direction_count"] = Q.direction_count;
    j["degenerate"] = Q.degenerate;
    j["profile"] = Q.profile == WeightProfile::flat ? "flat" : "decay";
    j["decay_exponent"] = Q.decay_exponent;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& el : Q.entries) {
        nlohmann::json k = nlohmann::json::array();
        for (int i = 0; i < Q.dim; ++i) k.push_back(el.mode.k[static_cast<size_t>(i)]);
        entries.push_back({{"k", k},
                           {"parity", to_string(el.mode.parity)},
                           {"j", el.mode.pol},
                           {"c", el.weight}});
    }
    j["entries"] = std::move(entries);
    return j;
}

QSpectrum qspectrum_from_json(const nlohmann::json& j) {
    // weights and structure come from the file; fields are rebuilt from (k, j)
    QSpectrum Q = build_basis(j.at("dim").get<int>(), j.at("trunc").get<int>(),
                              j.at("profile").get<std::string>() == "decay" ? WeightProfile::decay
                                                                            : WeightProfile::flat,
                              j.value("decay_exponent", 1.0));
    const auto& entries = j.at("entries");
    if (entries.size() != Q.entries.size())
        throw std::invalid_argument("qspectrum_from_json: entry count mismatch");
    for (size_t i = 0; i < Q.entries.size(); ++i)
        Q.entries[i].weight = entries[i].at("c").get<double>();
    return Q;
}

}  // namespace sdifflab
