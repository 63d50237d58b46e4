#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdifflab/diffops.hpp"
#include "sdifflab/evaluator.hpp"
#include "sdifflab/field_json.hpp"
#include "sdifflab/fields.hpp"
#include "sdifflab/grid.hpp"
#include "test_util.hpp"

using namespace sdifflab;
using namespace testutil;

namespace {

double field_distance(const VectorField& a, const VectorField& b) {
    VectorField d = a - b;
    return d.max_abs_coeff();
}

}  // namespace

TEST_CASE("scalar evaluation") {
    ScalarField zero(2, 3);
    CHECK(zero.eval(Vec(0.3, 1.2)) == 0.0);

    ScalarField cosx(1, 1);
    cosx.add(Mode{{1, 0, 0}, Parity::cos}, 1.0);
    CHECK(cosx.eval(Vec(0.0)) == doctest::Approx(1.0).epsilon(1e-15));

    ScalarField f(1, 2);
    f.add(Mode{{1, 0, 0}, Parity::cos}, 1.0);
    f.add(Mode{{2, 0, 0}, Parity::sin}, 1.0);
    // cos(pi/2) + sin(pi) = 0
    CHECK(f.eval(Vec(0.5 * kTwoPi / 2.0)) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("vector evaluation") {
    VectorField zero(2, 2);
    Vec v = zero.eval(Vec(1.0, 2.0));
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 0.0);

    VectorField tg = taylor_green_field(1.0);
    Vec at = tg.eval(Vec(M_PI / 2.0, 0.0));
    CHECK(at[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(at[1] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("mode canonicalization and invariants") {
    ScalarField f(2, 2);
    CHECK_THROWS_AS(f.add(Mode{{-1, 0, 0}, Parity::cos}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(f.add(Mode{{0, 0, 0}, Parity::sin}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(f.add(Mode{{3, 0, 0}, Parity::cos}, 1.0), std::invalid_argument);
    // folding: sin with flipped wavevector negates
    f.add_term(Parity::sin, {0, -2, 0}, 1.0);
    CHECK(f.coeff(Mode{{0, 2, 0}, Parity::sin}) == doctest::Approx(-1.0));
    // sin(0) drops, cos(0) accumulates on the mean
    f.add_term(Parity::sin, {0, 0, 0}, 5.0);
    f.add_term(Parity::cos, {0, 0, 0}, 2.5);
    CHECK(f.mean() == doctest::Approx(2.5));
}

TEST_CASE("gradient") {
    ScalarField c(2, 1);
    c.add(Mode{}, 7.0);
    CHECK(gradient(c).max_abs_coeff() == 0.0);

    ScalarField cosx(2, 1);
    cosx.add(Mode{{1, 0, 0}, Parity::cos}, 1.0);
    VectorField g = gradient(cosx);
    CHECK(g.coeff(Mode{{1, 0, 0}, Parity::sin}, 0) == doctest::Approx(-1.0));
    CHECK(g.coeff(Mode{{1, 0, 0}, Parity::sin}, 1) == 0.0);

    // finite-difference oracle on sin(2x)cos(y)
    ScalarField f(2, 2);
    f.add_term(Parity::sin, {2, 1, 0}, 0.5);
    f.add_term(Parity::sin, {2, -1, 0}, 0.5);
    VectorField gf = gradient(f);
    PathRng rng(42, 0);
    for (int i = 0; i < 10; ++i) {
        Vec x = random_point(2, rng);
        Vec fd = fd_gradient(f, x);
        Vec sp = gf.eval(x);
        CHECK(std::abs(fd[0] - sp[0]) < 1e-6);
        CHECK(std::abs(fd[1] - sp[1]) < 1e-6);
    }
}

TEST_CASE("divergence") {
    VectorField tg = taylor_green_field(1.0);
    CHECK(divergence(tg).max_abs_coeff() == 0.0);

    ScalarField cosx(2, 1);
    cosx.add(Mode{{1, 0, 0}, Parity::cos}, 1.0);
    ScalarField lap = divergence(gradient(cosx));
    CHECK(lap.coeff(Mode{{1, 0, 0}, Parity::cos}) == doctest::Approx(-1.0));

    VectorField zero(2, 2);
    CHECK(divergence(zero).max_abs_coeff() == 0.0);
}

TEST_CASE("laplacian") {
    ScalarField cosx(2, 1);
    cosx.add(Mode{{1, 0, 0}, Parity::cos}, 1.0);
    CHECK(laplacian(cosx).coeff(Mode{{1, 0, 0}, Parity::cos}) == doctest::Approx(-1.0));

    ScalarField zero(2, 2);
    CHECK(laplacian(zero).max_abs_coeff() == 0.0);

    // sin(2x)cos(3y) -> -13 sin(2x)cos(3y)
    ScalarField f(2, 3);
    f.add_term(Parity::sin, {2, 3, 0}, 0.5);
    f.add_term(Parity::sin, {2, -3, 0}, 0.5);
    ScalarField lf = laplacian(f);
    CHECK(lf.coeff(Mode{{2, 3, 0}, Parity::sin}) == doctest::Approx(-13.0 * 0.5));
    CHECK(lf.coeff(Mode{{2, -3, 0}, Parity::sin}) == doctest::Approx(-13.0 * 0.5));
}

TEST_CASE("hodge laplacian is minus laplacian componentwise") {
    VectorField tg = taylor_green_field(1.0);
    VectorField box = hodge_laplacian(tg);
    // box TG = 2 TG
    VectorField two_tg = tg;
    two_tg *= 2.0;
    CHECK(field_distance(box, two_tg) < 1e-15);

    VectorField cst(2, 1);
    cst.add(Mode{}, Vec(1.0, -2.0));
    CHECK(hodge_laplacian(cst).max_abs_coeff() == 0.0);

    PathRng rng(7, 0);
    VectorField r = random_vector(2, 2, rng);
    VectorField lhs = hodge_laplacian(r);
    VectorField rhs = laplacian(r);
    rhs *= -1.0;
    CHECK(field_distance(lhs, rhs) == 0.0);
}

TEST_CASE("advection") {
    VectorField tg = taylor_green_field(1.0);

    VectorField cst(2, 2);
    cst.add(Mode{}, Vec(0.7, -0.3));
    CHECK(advect(tg, cst).max_abs_coeff() == 0.0);

    VectorField zero(2, 2);
    CHECK(advect(zero, tg).max_abs_coeff() == 0.0);

    // advect(TG, TG) = (sin 2x / 2, sin 2y / 2), a pure gradient
    VectorField a = advect(tg, tg, Dealias::keep_exact);
    VectorField expect(2, 4);
    expect.add(Mode{{2, 0, 0}, Parity::sin}, Vec(0.5, 0.0));
    expect.add(Mode{{0, 2, 0}, Parity::sin}, Vec(0.0, 0.5));
    CHECK(field_distance(a, extend_to(expect, a.trunc())) < 1e-15);

    // pointwise oracle on random band-limited fields
    PathRng rng(3, 0);
    VectorField u = random_vector(2, 2, rng, 0.5);
    VectorField w = random_vector(2, 2, rng, 0.5);
    VectorField aw = advect(u, w, Dealias::keep_exact);
    for (int i = 0; i < 6; ++i) {
        Vec x = random_point(2, rng);
        Vec oracle = fd_advect(u, w, x);
        Vec got = aw.eval(x);
        CHECK(std::abs(oracle[0] - got[0]) < 1e-6);
        CHECK(std::abs(oracle[1] - got[1]) < 1e-6);
    }
}

TEST_CASE("lie bracket") {
    PathRng rng(11, 0);
    VectorField u = random_vector(2, 2, rng);
    VectorField self = lie_bracket(u, u, Dealias::keep_exact);
    CHECK(self.max_abs_coeff() < 1e-14);

    // both fields depend on x only and point in y: bracket vanishes
    VectorField a(2, 1), b(2, 1);
    a.add(Mode{{1, 0, 0}, Parity::cos}, Vec(0.0, 1.0));
    b.add(Mode{{1, 0, 0}, Parity::sin}, Vec(0.0, 1.0));
    CHECK(lie_bracket(a, b, Dealias::keep_exact).max_abs_coeff() < 1e-15);

    // Jacobi identity on three random fields, no re-truncation anywhere
    VectorField x = random_vector(2, 1, rng, 0.8);
    VectorField y = random_vector(2, 1, rng, 0.8);
    VectorField z = random_vector(2, 1, rng, 0.8);
    auto lift = [](const VectorField& f, int K) { return extend_to(f, K); };
    VectorField t1 = lie_bracket(lift(x, 2), lie_bracket(y, z, Dealias::keep_exact),
                                 Dealias::keep_exact);
    VectorField t2 = lie_bracket(lift(y, 2), lie_bracket(z, x, Dealias::keep_exact),
                                 Dealias::keep_exact);
    VectorField t3 = lie_bracket(lift(z, 2), lie_bracket(x, y, Dealias::keep_exact),
                                 Dealias::keep_exact);
    VectorField sum = t1 + t2 + t3;
    CHECK(sum.max_abs_coeff() < 1e-12);
}

TEST_CASE("leray projection") {
    // pure gradient goes entirely to the potential
    ScalarField sinx(2, 2);
    sinx.add(Mode{{1, 0, 0}, Parity::sin}, 1.0);
    LerayResult lr = leray_project(gradient(sinx));
    CHECK(lr.solenoidal.max_abs_coeff() < 1e-15);
    CHECK(lr.potential.coeff(Mode{{1, 0, 0}, Parity::sin}) == doctest::Approx(1.0));

    VectorField tg = taylor_green_field(1.0);
    LerayResult lr2 = leray_project(tg);
    CHECK(field_distance(lr2.solenoidal, tg) < 1e-15);
    CHECK(lr2.potential.max_abs_coeff() < 1e-15);

    VectorField adv = advect(tg, tg, Dealias::project_back);
    LerayResult lr3 = leray_project(adv);
    CHECK(lr3.solenoidal.max_abs_coeff() < 1e-15);
    CHECK(lr3.potential.coeff(Mode{{2, 0, 0}, Parity::cos}) == doctest::Approx(-0.25));
    CHECK(lr3.potential.coeff(Mode{{0, 2, 0}, Parity::cos}) == doctest::Approx(-0.25));
}

TEST_CASE("leray properties on random fields") {
    PathRng rng(5, 0);
    for (int trial = 0; trial < 5; ++trial) {
        VectorField w = random_vector(2, 3, rng);
        LerayResult lr = leray_project(w);
        // divergence-free split at machine precision, exact reconstruction
        CHECK(divergence(lr.solenoidal).max_abs_coeff() <=
              1e-15 * std::max(1.0, w.max_abs_coeff()));
        VectorField recon = lr.solenoidal + gradient(lr.potential);
        CHECK(field_distance(recon, w) < 1e-14);
        // idempotent
        VectorField pp = leray_project(lr.solenoidal).solenoidal;
        CHECK(field_distance(pp, lr.solenoidal) < 1e-14);
        // self-adjoint
        VectorField v = random_vector(2, 3, rng);
        const double a = l2_inner(lr.solenoidal, v);
        const double b = l2_inner(w, leray_project(v).solenoidal);
        CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("inner products") {
    ScalarField cosx(2, 1);
    cosx.add(Mode{{1, 0, 0}, Parity::cos}, 1.0);
    const double vol = torus_volume(2);
    CHECK(l2_inner(cosx, cosx) == doctest::Approx(vol / 2.0).epsilon(1e-14));

    // quadrature oracle
    const double quad = quadrature(2, 16, [&](const Vec& x) {
        const double v = cosx.eval(x);
        return v * v;
    });
    CHECK(l2_inner(cosx, cosx) == doctest::Approx(quad).epsilon(1e-12));

    ScalarField sinx(2, 1);
    sinx.add(Mode{{1, 0, 0}, Parity::sin}, 1.0);
    CHECK(l2_inner(cosx, sinx) == 0.0);

    VectorField zero(2, 1);
    CHECK(energy(zero) == 0.0);

    PathRng rng(9, 0);
    ScalarField f = random_scalar(2, 2, rng);
    ScalarField g = random_scalar(2, 2, rng);
    const double oracle = quadrature(2, 16, [&](const Vec& x) { return f.eval(x) * g.eval(x); });
    CHECK(l2_inner(f, g) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("advection skew symmetry for divergence-free transport") {
    PathRng rng(13, 0);
    for (int trial = 0; trial < 4; ++trial) {
        VectorField u = random_divfree(2, 2, rng);
        VectorField w = random_vector(2, 2, rng);
        VectorField aw = advect(u, w, Dealias::keep_exact);
        const double ip = l2_inner(aw, extend_to(w, aw.trunc()));
        CHECK(std::abs(ip) < 1e-12 * std::max(1.0, energy(w)));
    }
}

TEST_CASE("gradient divergence duality") {
    PathRng rng(17, 0);
    ScalarField f = random_scalar(2, 2, rng);
    VectorField w = random_vector(2, 2, rng);
    const double a = l2_inner(gradient(f), w);
    const double b = -l2_inner(f, divergence(w));
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("laplacian factorizations") {
    PathRng rng(19, 0);
    ScalarField f = random_scalar(2, 3, rng);
    ScalarField d1 = divergence(gradient(f));
    ScalarField d2 = laplacian(f);
    ScalarField diff = d1 - d2;
    CHECK(diff.max_abs_coeff() < 1e-14);
}

TEST_CASE("truncation mixing is an error") {
    ScalarField a(2, 2), b(2, 3);
    CHECK_THROWS_AS(a += b, std::invalid_argument);
    VectorField u(2, 2), w(2, 3);
    CHECK_THROWS_AS(l2_inner(u, w), std::invalid_argument);
    CHECK_THROWS_AS(advect(u, w), std::invalid_argument);
}

TEST_CASE("dealias modes") {
    PathRng rng(23, 0);
    VectorField u = random_vector(2, 2, rng);
    VectorField w = random_vector(2, 2, rng);
    VectorField exact = advect(u, w, Dealias::keep_exact);
    CHECK(exact.trunc() == 4);
    VectorField proj = advect(u, w, Dealias::project_back);
    CHECK(proj.trunc() == 2);
    CHECK(field_distance(proj, retruncate(exact, 2)) == 0.0);
}

TEST_CASE("json round trip is loss free") {
    PathRng rng(29, 0);
    ScalarField f = random_scalar(2, 3, rng);
    ScalarField f2 = scalar_from_json(to_json(f));
    CHECK(f2.dim() == f.dim());
    CHECK(f2.trunc() == f.trunc());
    ScalarField fd = f2 - f;
    CHECK(fd.max_abs_coeff() == 0.0);

    VectorField u = random_divfree(2, 3, rng);
    // through a serialized string, as files would round trip
    auto text = to_json(u).dump();
    VectorField u2 = vector_from_json(nlohmann::json::parse(text));
    CHECK(u2.div_free() == u.div_free());
    CHECK(field_distance(u2, u) == 0.0);
}

TEST_CASE("quadrature grid projects band-limited samples exactly") {
    PathRng rng(31, 0);
    ScalarField f = random_scalar(2, 3, rng);
    QuadratureGrid grid(2, 16);
    ScalarField back = grid.project(grid.sample(f), 3);
    ScalarField diff = back - f;
    CHECK(diff.max_abs_coeff() < 1e-13);
}

TEST_CASE("compiled evaluators match direct evaluation") {
    PathRng rng(37, 0);
    ScalarField f = random_scalar(2, 4, rng);
    VectorField u = random_vector(2, 4, rng);
    ScalarEvaluator fe(f);
    VectorEvaluator ue(u);
    for (int i = 0; i < 8; ++i) {
        Vec x = random_point(2, rng);
        CHECK(fe(x) == doctest::Approx(f.eval(x)).epsilon(1e-12));
        Vec a = ue(x), b = u.eval(x);
        CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-12));
        CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-12));
        // Jacobian against finite differences
        Mat J;
        ue.eval_with_jacobian(x, J);
        const double eps = 1e-6;
        for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 2; ++n) {
                Vec up = x, dn = x;
                up[n] += eps;
                dn[n] -= eps;
                const double fd = (u.eval(up)[m] - u.eval(dn)[m]) / (2.0 * eps);
                CHECK(std::abs(J(m, n) - fd) < 1e-5);
            }
    }
}

TEST_CASE("momentum and enstrophy") {
    VectorField u(2, 2);
    u.add(Mode{}, Vec(0.25, -0.5));
    Vec m = momentum(u);
    CHECK(m[0] == doctest::Approx(0.25 * torus_volume(2)));
    CHECK(m[1] == doctest::Approx(-0.5 * torus_volume(2)));

    VectorField tg = taylor_green_field(1.0);
    // curl TG = 2 sin x sin y, enstrophy = 0.5 * |curl|^2 = 0.5 * 4 * (2pi)^2/4
    CHECK(enstrophy(tg) == doctest::Approx(0.5 * 4.0 * torus_volume(2) / 4.0).epsilon(1e-13));
}

TEST_CASE("dirac projection reproduces point evaluation of band-limited fields") {
    PathRng rng(41, 0);
    ScalarField f = random_scalar(2, 3, rng);
    Vec x0 = random_point(2, rng);
    ScalarField delta = dirac_projection(2, 3, x0);
    CHECK(l2_inner(delta, f) == doctest::Approx(f.eval(x0)).epsilon(1e-12));
}
