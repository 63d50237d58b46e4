#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdifflab/diffops.hpp"
#include "sdifflab/fields.hpp"

namespace sdifflab {

/// One element of the truncated divergence-free basis: a unit-L2 multiple of
/// cos/sin(k.theta) e_{k,j} (or a constant field for k = 0), together with its
/// covariance weight c_k > 0.
struct BasisElement {
    Mode mode;          // k, parity, polarization j
    VectorField field;  // |field|_{L2} = 1, divergence-free by construction
    double weight;      // c_k
};

enum class WeightProfile { flat, decay };

/// Truncated Q-Wiener covariance on the divergence-free algebra: the basis
/// elements with weights rescaled so that the pointwise sum
///   sum_i c_i^2 A_i(x) A_i(x)^T = Id
/// holds exactly (the generator-normalization certificate). With that
/// normalization sum c_i^2 A_i^2 = Laplacian and the pointwise metric identity
/// hold on band-limited inputs.
class QSpectrum {
  public:
    int dim = 0;
    int trunc = 0;                      // K
    std::vector<BasisElement> entries;  // ordered by (|k|^2, k, j, parity)
    int direction_count = 0;            // distinct wavevector lines (k != 0)
    bool degenerate = false;            // d = 1: constants only
    WeightProfile profile = WeightProfile::flat;
    double decay_exponent = 0.0;

    size_t size() const { return entries.size(); }

    /// sum_i c_i^2 A_i(x) A_i(x)^T, assembled symbolically (x-independent once
    /// the parity pairs collapse).
    Mat certificate_matrix() const;
};

/// Builds the torus basis at truncation K: one canonical representative per
/// wavevector line, both parities, all d-1 polarizations of k-perp, plus the d
/// constant fields; weights per profile, then one global rescale to make the
/// certificate exact. On T^1 there are no oscillatory divergence-free fields
/// and the spectrum is flagged degenerate.
QSpectrum build_basis(int dim, int K, WeightProfile profile = WeightProfile::flat,
                      double decay_exponent = 1.0);

/// Orthonormal basis of k-perp, deterministic for serialization.
std::vector<Vec> perp_basis(const std::array<int, 3>& k, int dim);

/// sum_i c_i^2 <A_i(x), v>^2; equals |v|^2 under the certificate.
double check_pointwise_metric(const QSpectrum& Q, const Vec& v, const Vec& x);

/// sum_i c_i^2 (A_i . grad) A_i; zero for the divergence-free torus basis.
VectorField sum_self_advection(const QSpectrum& Q);

/// Antisymmetric 2-tensor field with one scalar slot per component pair.
struct AntisymmetricField {
    int dim = 0;
    std::vector<ScalarField> comps;  // pairs (0,1), (0,2), (1,2)
    static int pair_index(int m, int n, int dim);
    double max_abs_coeff() const;
};

/// sum_i c_i^2 A_i ^ grad_X A_i; zero for the torus basis.
AntisymmetricField sum_wedge(const QSpectrum& Q, const VectorField& X);

/// sum_i c_i^2 A_i(A_i f); equals laplacian(f) on band-limited f.
ScalarField generator_sum(const QSpectrum& Q, const ScalarField& f);

/// -sum_i c_i^2 L_{A_i}(L_{A_i} u); equals hodge_laplacian(u) on
/// divergence-free band-limited u. Products are expanded exactly at the
/// working band f + 2K before the optional projection back to u's band.
VectorField lie_hodge(const QSpectrum& Q, const VectorField& u,
                      Dealias dealias = Dealias::project_back);

double q_trace(const QSpectrum& Q);

/// Maps i.i.d. standard normals to sum_i c_i xi_i A_i.
VectorField qsqrt_expand(const QSpectrum& Q, std::span<const double> xi);

/// Smooth cylinder function on the diffeomorphism group: depends on a
/// configuration g only through g(x_1), ..., g(x_n).
struct CylinderPotential {
    std::vector<Vec> points;
    std::function<double(std::span<const Vec>)> value;
    std::function<Vec(std::span<const Vec>, int)> slot_gradient;

    /// V(y_1,...,y_n) = sum_i V_i(y_i) from per-slot spectral fields.
    static CylinderPotential separable(std::vector<ScalarField> slots, std::vector<Vec> pts);

    /// Max abs deviation of slot_gradient from central finite differences.
    double validate_gradients(double eps = 1e-6) const;
};

/// Pushforward of the group-level gradient of a cylinder potential at the
/// identity: Leray projection of the slot gradients carried by band-limited
/// Dirac kernels at truncation Q.trunc. The result is divergence-free.
VectorField sdiff_gradient_cylinder(const QSpectrum& Q, const CylinderPotential& P);

/// Same gradient expanded over the basis, sum_i <w delta, A_i> A_i; used as
/// the independent route in tests.
VectorField sdiff_gradient_cylinder_expanded(const QSpectrum& Q, const CylinderPotential& P);

/// Gradient at the identity of the integral potential g -> int V(g(x)) dv(x);
/// identically zero because grad V is orthogonal to every divergence-free
/// field. Returned as the explicitly computed basis expansion.
VectorField sdiff_gradient_integral(const QSpectrum& Q, const ScalarField& V);

/// Flow map exp(t A) of a band-limited field by RK4 substeps; exact enough to
/// serve as the directional-derivative oracle for the gradients above.
Vec flow_point(const VectorField& A, const Vec& x0, double t, int substeps = 32);

nlohmann::json to_json(const QSpectrum& Q);
QSpectrum qspectrum_from_json(const nlohmann::json& j);

}  // namespace sdifflab
