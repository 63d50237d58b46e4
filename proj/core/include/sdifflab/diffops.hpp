#pragma once

#include "sdifflab/fields.hpp"

namespace sdifflab {

/// Products are always expanded exactly at the sum of the input bands; the
/// caller chooses whether to project back ("2/3-rule by enlargement") or keep
/// the exact band for identity tests.
enum class Dealias { project_back, keep_exact };

/// d/d theta_m, exact coefficient shuffle cos <-> sin with factor +-k_m.
ScalarField partial_derivative(const ScalarField& f, int m);
VectorField partial_derivative(const VectorField& u, int m);

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& u);
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& u);

/// Hodge Laplacian on vector fields; on a flat torus Ric = 0, so it is
/// -laplacian componentwise.
VectorField hodge_laplacian(const VectorField& u);

/// Exact product of two band-limited scalars (band = sum of bands).
ScalarField multiply(const ScalarField& a, const ScalarField& b);

/// Covariant/directional derivative (u . grad) w. Both fields must share one
/// truncation K; the result is computed exactly at 2K and, by default,
/// projected back to K.
VectorField advect(const VectorField& u, const VectorField& w,
                   Dealias dealias = Dealias::project_back);
ScalarField advect_scalar(const VectorField& u, const ScalarField& f,
                          Dealias dealias = Dealias::project_back);

/// Lie bracket [u, w] = advect(u, w) - advect(w, u).
VectorField lie_bracket(const VectorField& u, const VectorField& w,
                        Dealias dealias = Dealias::project_back);

/// Modewise orthogonal splitting w = solenoidal + gradient(potential).
/// k = 0 components stay in the solenoidal part; mean(potential) = 0.
struct LerayResult {
    VectorField solenoidal;
    ScalarField potential;
};
LerayResult leray_project(const VectorField& w);

/// L2 inner products carry the torus volume (2 pi)^d explicitly.
double l2_inner(const ScalarField& a, const ScalarField& b);
double l2_inner(const VectorField& a, const VectorField& b);
double l2_norm(const ScalarField& a);
double l2_norm(const VectorField& a);
double energy(const VectorField& u);

/// Scalar vorticity d(u_1)/dx_0 - d(u_0)/dx_1; d = 2 only.
ScalarField curl2d(const VectorField& u);
double enstrophy(const VectorField& u);

/// Mean-mode momentum integral u dv = (2 pi)^d * (k = 0 coefficient).
Vec momentum(const VectorField& u);

/// Band-limited projection of the Dirac mass at x0: the Dirichlet kernel with
/// unit integral, sum_{|k|<=K} cos(k.(x - x0)) / (2 pi)^d.
ScalarField dirac_projection(int dim, int trunc, const Vec& x0);

}  // namespace sdifflab
