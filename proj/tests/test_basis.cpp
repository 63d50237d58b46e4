#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "sdifflab/basis.hpp"
#include "sdifflab/flow.hpp"
#include "test_util.hpp"

using namespace sdifflab;
using namespace testutil;

TEST_CASE("basis enumeration d=2 K=1") {
    QSpectrum Q = build_basis(2, 1);
    // enumeration oracle: canonical lines with |k|_inf <= 1
    std::set<std::array<int, 3>> expect{{1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, -1, 0}};
    std::set<std::array<int, 3>> got;
    int oscillatory = 0, constants = 0;
    for (const auto& el : Q.entries) {
        if (el.mode.is_zero())
            ++constants;
        else {
            ++oscillatory;
            got.insert(el.mode.k);
        }
    }
    CHECK(Q.direction_count == 4);
    CHECK(got == expect);
    CHECK(oscillatory == 8);
    CHECK(constants == 2);
    CHECK_FALSE(Q.degenerate);
    CHECK_THROWS_AS(build_basis(2, 0), std::invalid_argument);
}

TEST_CASE("basis elements are unit norm and divergence free") {
    for (int K : {1, 2, 3}) {
        QSpectrum Q = build_basis(2, K);
        for (const auto& el : Q.entries) {
            CHECK(l2_norm(el.field) == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(divergence(el.field).max_abs_coeff() == 0.0);
            CHECK(el.weight > 0.0);
            if (!el.mode.is_zero()) {
                // polarization orthogonal to k
                Vec amp = el.field.coeff(Mode{el.mode.k, el.mode.parity});
                double dot = 0.0;
                for (int i = 0; i < 2; ++i) dot += amp[i] * el.mode.k[static_cast<size_t>(i)];
                CHECK(dot == 0.0);
            }
        }
    }
}

TEST_CASE("basis orthonormality") {
    QSpectrum Q = build_basis(2, 2);
    for (size_t i = 0; i < Q.entries.size(); ++i)
        for (size_t j = i; j < Q.entries.size(); ++j) {
            const double ip = l2_inner(Q.entries[i].field, Q.entries[j].field);
            if (i == j)
                CHECK(ip == doctest::Approx(1.0).epsilon(1e-13));
            else
                CHECK(std::abs(ip) < 1e-14);
        }
}

TEST_CASE("line geometry oracle: equal weights 2/N reproduce the identity") {
    // matrix-sum oracle over the oscillatory lines alone: with gamma^2 = 2/N
    // per line, sum gamma^2 (I - k k^T/|k|^2) = I on the symmetric line set
    for (int K : {1, 2, 3}) {
        QSpectrum Q = build_basis(2, K);
        const double g2 = 2.0 / Q.direction_count;
        Mat S(2);
        std::set<std::array<int, 3>> seen;
        for (const auto& el : Q.entries) {
            if (el.mode.is_zero() || !seen.insert(el.mode.k).second) continue;
            Vec kv(2);
            for (int i = 0; i < 2; ++i) kv[i] = el.mode.k[static_cast<size_t>(i)];
            const double k2 = kv.norm2();
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    S(i, j) += g2 * ((i == j ? 1.0 : 0.0) - kv[i] * kv[j] / k2);
        }
        CHECK((S - Mat::identity(2)).max_abs() < 1e-14);
    }
}

TEST_CASE("generator normalization certificate") {
    for (int K : {1, 2, 3, 4}) {
        QSpectrum Q = build_basis(2, K);
        Mat S = Q.certificate_matrix();
        CHECK((S - Mat::identity(2)).max_abs() < 1e-13);
    }
    // decay profile is rescaled to the same certificate
    QSpectrum Qd = build_basis(2, 3, WeightProfile::decay, 1.5);
    CHECK((Qd.certificate_matrix() - Mat::identity(2)).max_abs() < 1e-13);
}

TEST_CASE("pointwise metric identity") {
    QSpectrum Q = build_basis(2, 2);
    PathRng rng(101, 0);
    for (int i = 0; i < 10; ++i) {
        Vec x = random_point(2, rng);
        CHECK(check_pointwise_metric(Q, Vec(1.0, 0.0), x) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(check_pointwise_metric(Q, Vec(0.0, 0.0), x) == 0.0);
        CHECK(check_pointwise_metric(Q, Vec(1.0, 1.0), x) == doctest::Approx(2.0).epsilon(1e-12));
        Vec v = random_point(2, rng);  // arbitrary vector
        CHECK(check_pointwise_metric(Q, v, x) == doctest::Approx(v.norm2()).epsilon(1e-12));
    }
}

TEST_CASE("self advection sum vanishes") {
    QSpectrum Q = build_basis(2, 1);
    CHECK(sum_self_advection(Q).max_abs_coeff() < 1e-15);
    QSpectrum Q3 = build_basis(2, 3);
    CHECK(sum_self_advection(Q3).max_abs_coeff() < 1e-15);

    // negative control: a longitudinal (gradient-type) element self-advects
    QSpectrum bad = build_basis(2, 1);
    VectorField longitudinal(2, 1);
    const double amp = std::sqrt(2.0 / torus_volume(2));
    longitudinal.add(Mode{{1, 0, 0}, Parity::cos}, Vec(amp, 0.0));  // parallel to k
    bad.entries[0].field = longitudinal;
    CHECK(sum_self_advection(bad).max_abs_coeff() > 1e-3);
}

TEST_CASE("wedge sum vanishes") {
    QSpectrum Q = build_basis(2, 2);
    PathRng rng(103, 0);
    for (int i = 0; i < 3; ++i) {
        VectorField X = random_vector(2, 2, rng);
        CHECK(sum_wedge(Q, X).max_abs_coeff() < 1e-12);
    }
    VectorField zero(2, 2);
    CHECK(sum_wedge(Q, zero).max_abs_coeff() == 0.0);

    // negative control: an element mixing two modes with different
    // polarizations has A not parallel to grad_X A
    QSpectrum bad = build_basis(2, 1);
    VectorField mixed = bad.entries[1].field + bad.entries[3].field;
    bad.entries[1].field = mixed;
    VectorField X = random_vector(2, 1, rng);
    CHECK(sum_wedge(bad, X).max_abs_coeff() > 1e-4);
}

TEST_CASE("generator sum equals the Laplacian") {
    QSpectrum Q = build_basis(2, 2);

    ScalarField cosx(2, 1);
    cosx.add(Mode{{1, 0, 0}, Parity::cos}, 1.0);
    ScalarField g = generator_sum(Q, cosx);
    ScalarField diff = g - laplacian(cosx);
    CHECK(diff.max_abs_coeff() < 1e-13);

    ScalarField cst(2, 1);
    cst.add(Mode{}, 3.0);
    CHECK(generator_sum(Q, cst).max_abs_coeff() < 1e-15);

    ScalarField cxy(2, 1);
    cxy.add(Mode{{1, 1, 0}, Parity::cos}, 1.0);
    ScalarField g2 = generator_sum(Q, cxy);
    CHECK(g2.coeff(Mode{{1, 1, 0}, Parity::cos}) == doctest::Approx(-2.0).epsilon(1e-13));

    PathRng rng(107, 0);
    for (int K : {2, 3}) {
        QSpectrum Qk = build_basis(2, K);
        ScalarField f = random_scalar(2, K, rng);
        ScalarField gs = generator_sum(Qk, f);
        ScalarField d = gs - laplacian(f);
        CHECK(d.max_abs_coeff() < 1e-12);
    }
}

TEST_CASE("lie hodge equals the Hodge Laplacian on divergence-free fields") {
    QSpectrum Q = build_basis(2, 2);

    VectorField tg = taylor_green_field(1.0);
    VectorField lh = lie_hodge(Q, tg);
    VectorField expect = tg;
    expect *= 2.0;
    VectorField d = lh - expect;
    CHECK(d.max_abs_coeff() < 1e-13);

    VectorField cst(2, 2);
    cst.add(Mode{}, Vec(0.5, -0.25));
    cst.set_div_free(true);
    CHECK(lie_hodge(Q, cst).max_abs_coeff() < 1e-14);

    PathRng rng(109, 0);
    QSpectrum Q3 = build_basis(2, 3);
    for (int i = 0; i < 3; ++i) {
        VectorField u = random_divfree(2, 2, rng);
        VectorField a = lie_hodge(Q3, u, Dealias::keep_exact);
        VectorField b = extend_to(hodge_laplacian(u), a.trunc());
        VectorField dd = a - b;
        CHECK(dd.max_abs_coeff() < 1e-12);
    }
}

TEST_CASE("q trace and expansion") {
    QSpectrum Q = build_basis(2, 1);
    std::vector<double> zeros(Q.size(), 0.0);
    CHECK(qsqrt_expand(Q, zeros).max_abs_coeff() == 0.0);

    std::vector<double> one(Q.size(), 0.0);
    one[0] = 1.0;
    VectorField f = qsqrt_expand(Q, one);
    VectorField expect = Q.entries[0].field;
    expect *= Q.entries[0].weight;
    VectorField d = f - expect;
    CHECK(d.max_abs_coeff() == 0.0);

    // E |expand(xi)|^2 = q_trace by orthonormality; Monte Carlo within 3 sigma
    PathRng rng(113, 0);
    const int n = 20000;
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> xi(Q.size());
    for (int i = 0; i < n; ++i) {
        for (auto& x : xi) x = rng.next_gaussian();
        const double e = l2_inner(qsqrt_expand(Q, xi), qsqrt_expand(Q, xi));
        sum += e;
        sumsq += e * e;
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sumsq / n - mean * mean) / (n - 1));
    CHECK(std::abs(mean - q_trace(Q)) < 3.0 * sd);
}

TEST_CASE("three-dimensional polarization frames") {
    for (std::array<int, 3> k : {std::array<int, 3>{1, 0, 0}, {1, 2, 3}, {0, 2, -1}, {2, 2, 2}}) {
        std::vector<Vec> e = perp_basis(k, 3);
        REQUIRE(e.size() == 2);
        Vec kv(3);
        for (int i = 0; i < 3; ++i) kv[i] = k[static_cast<size_t>(i)];
        for (const Vec& v : e) {
            CHECK(std::abs(v.dot(kv)) < 1e-14);
            CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-14));
        }
        CHECK(std::abs(e[0].dot(e[1])) < 1e-14);
    }
    CHECK_THROWS_AS(perp_basis({0, 0, 0}, 3), std::invalid_argument);
}

TEST_CASE("degenerate T^1 basis") {
    QSpectrum Q = build_basis(1, 3);
    CHECK(Q.degenerate);
    CHECK(Q.entries.size() == 1);
    CHECK(Q.entries[0].mode.is_zero());
    CHECK((Q.certificate_matrix() - Mat::identity(1)).max_abs() < 1e-14);
}

TEST_CASE("integral potential gradient vanishes") {
    QSpectrum Q = build_basis(2, 2);
    ScalarField V1(2, 1);
    V1.add(Mode{{1, 0, 0}, Parity::cos}, 1.0);
    CHECK(l2_norm(sdiff_gradient_integral(Q, V1)) < 1e-12);

    ScalarField zero(2, 1);
    CHECK(l2_norm(sdiff_gradient_integral(Q, zero)) == 0.0);

    ScalarField Vxy(2, 1);
    Vxy.add(Mode{{1, 1, 0}, Parity::cos}, 0.5);
    Vxy.add(Mode{{1, -1, 0}, Parity::cos}, 0.5);  // cos x cos y
    CHECK(l2_norm(sdiff_gradient_integral(Q, Vxy)) < 1e-12);
}

TEST_CASE("cylinder potential machinery") {
    ScalarField slot(2, 2);
    slot.add(Mode{{1, 0, 0}, Parity::cos}, 0.4);
    slot.add(Mode{{1, 1, 0}, Parity::sin}, 0.2);
    CylinderPotential P = CylinderPotential::separable({slot}, {Vec(1.0, 2.0)});
    CHECK(P.validate_gradients() < 1e-8);
    std::vector<Vec> pts = P.points;
    CHECK(P.value(pts) == doctest::Approx(slot.eval(Vec(1.0, 2.0))));
}

TEST_CASE("constant-gradient cylinder potential") {
    QSpectrum Q = build_basis(2, 2);
    const Vec x1(1.3, 4.1);
    const Vec c(0.7, -0.2);
    CylinderPotential P;
    P.points = {x1};
    P.value = [c](std::span<const Vec> ys) { return c.dot(ys[0]); };
    P.slot_gradient = [c](std::span<const Vec>, int) { return c; };

    VectorField v = sdiff_gradient_cylinder(Q, P);
    CHECK(v.div_free());
    CHECK(divergence(v).max_abs_coeff() < 1e-14);

    // oracle: Leray projection of c carried by the Dirichlet kernel, by hand
    VectorField flux(2, 2);
    ScalarField delta = dirac_projection(2, 2, x1);
    for (const auto& [m, a] : delta.coeffs()) flux.add(m, a * c);
    VectorField expect = leray_project(flux).solenoidal;
    VectorField d = v - expect;
    CHECK(d.max_abs_coeff() < 1e-14);

    // basis-expansion route agrees (completeness at truncation)
    VectorField v2 = sdiff_gradient_cylinder_expanded(Q, P);
    VectorField d2 = v2 - v;
    CHECK(d2.max_abs_coeff() < 1e-12);
}

TEST_CASE("symmetric opposite-gradient pair cancels") {
    QSpectrum Q = build_basis(2, 2);
    const Vec x1(1.0, 1.0);
    CylinderPotential P;
    P.points = {x1, x1};
    P.value = [](std::span<const Vec> ys) { return std::cos(ys[0][0]) - std::cos(ys[1][0]); };
    P.slot_gradient = [](std::span<const Vec> ys, int slot) {
        Vec g(2);
        g[0] = slot == 0 ? -std::sin(ys[0][0]) : std::sin(ys[1][0]);
        return g;
    };
    CHECK(l2_norm(sdiff_gradient_cylinder(Q, P)) < 1e-14);
}

TEST_CASE("cylinder gradient matches the flow directional derivative") {
    // <grad V, A_i> against (V(exp(eps A_i)) - V(e)) / eps, one-sided so the
    // first-order convergence in eps is visible
    QSpectrum Q = build_basis(2, 2);
    ScalarField slot(2, 2);
    slot.add(Mode{{1, 0, 0}, Parity::cos}, 0.5);
    slot.add(Mode{{1, 1, 0}, Parity::sin}, 0.3);
    slot.add(Mode{{0, 2, 0}, Parity::cos}, 0.2);
    const Vec x1(0.9, 2.2);
    CylinderPotential P = CylinderPotential::separable({slot}, {x1});
    VectorField grad = sdiff_gradient_cylinder(Q, P);

    const double V0 = P.value(P.points);
    std::vector<double> errs;
    for (double eps : {2e-2, 1e-2, 5e-3}) {
        double worst = 0.0;
        for (const auto& el : Q.entries) {
            const double lhs = l2_inner(grad, el.field);
            std::vector<Vec> moved = {flow_point(el.field, x1, eps)};
            const double rhs = (P.value(moved) - V0) / eps;
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        errs.push_back(worst);
    }
    // observed first order: halving eps roughly halves the error
    CHECK(errs[1] < 0.65 * errs[0]);
    CHECK(errs[2] < 0.65 * errs[1]);
    CHECK(errs[2] < 5e-3);
}

TEST_CASE("qspectrum json round trip") {
    QSpectrum Q = build_basis(2, 2, WeightProfile::decay, 2.0);
    nlohmann::json j = to_json(Q);
    QSpectrum Q2 = qspectrum_from_json(j);
    REQUIRE(Q2.entries.size() == Q.entries.size());
    for (size_t i = 0; i < Q.entries.size(); ++i) {
        CHECK(Q2.entries[i].mode == Q.entries[i].mode);
        CHECK(Q2.entries[i].weight == Q.entries[i].weight);
    }
    // deterministic ordering: entries sorted by (|k|^2, k, j, parity)
    for (size_t i = 0; i + 1 < Q.entries.size(); ++i)
        CHECK(Q.entries[i].mode < Q.entries[i + 1].mode);
}
