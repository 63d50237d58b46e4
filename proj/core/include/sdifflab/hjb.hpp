#pragma once

#include <vector>

#include "sdifflab/diffops.hpp"
#include "sdifflab/fields.hpp"
#include "sdifflab/flow.hpp"
#include "sdifflab/grid.hpp"

namespace sdifflab {

/// Finite-horizon control problem on the torus with running cost
/// |u|^2/2 - V(x) and terminal cost Psi.
struct ControlProblem {
    int dim = 1;
    int K = 16;            // spectral band of the value function
    double nu = 0.25;      // > 0 for the Cole-Hopf route
    double T = 1.0;
    ScalarField V;         // potential on M
    ScalarField Psi;       // terminal cost
    int grid_oversample = 4;  // quadrature points per axis = oversample * K

    QuadratureGrid make_grid() const {
        return QuadratureGrid(dim, std::max(grid_oversample * K, 16));
    }
};

/// Value function and its Cole-Hopf partner on a uniform time grid
/// (ascending times, last one = T).
struct ValueFunction {
    double nu = 0.0;
    std::vector<double> times;
    std::vector<ScalarField> Phi;
    std::vector<ScalarField> W;

    size_t index_of(double t) const;
    /// Coefficientwise linear interpolation of W between stored times.
    ScalarField W_at(double t) const;
    ScalarField Phi_at(double t) const;
};

/// Pointwise Cole-Hopf transform W = -2 nu log Phi on an oversampled grid,
/// projected back to `trunc`. Throws domain_error if Phi is not strictly
/// positive on the grid.
ScalarField cole_hopf(const ScalarField& phi, double nu, const QuadratureGrid& grid, int trunc);
/// Inverse transform Phi = exp(-W / 2 nu).
ScalarField inverse_cole_hopf(const ScalarField& w, double nu, const QuadratureGrid& grid,
                              int trunc);

/// Backward heat equation with potential,
///   dPhi/dt + nu Lap Phi + V Phi / (2 nu) = 0,  Phi(T) = exp(-Psi / 2 nu),
/// integrated from T to 0 on `steps` uniform intervals. Modes decay exactly;
/// a constant V is an exact scalar factor; general V uses Strang splitting.
ValueFunction solve_heat_with_potential(const ControlProblem& prob, int steps);

/// Heat solve plus Cole-Hopf at every stored time.
ValueFunction solve_hjb(const ControlProblem& prob, int steps);

/// L2 residual of dW/dt + nu Lap W - |grad W|^2 / 2 - V at a stored time;
/// dW/dt comes from the heat equation applied to Phi (exact in the separable
/// cases), transformed pointwise.
double hjb_residual_at(const ValueFunction& vf, const ControlProblem& prob, size_t idx);
double hjb_residual_max(const ValueFunction& vf, const ControlProblem& prob);

/// Optimal feedback control u*(t, .) = -grad W(t, .).
VectorField optimal_control(const ValueFunction& vf, double t);

struct BurgersReport {
    double max_residual = 0.0;        // viscous Burgers residual of v = grad W(T - t)
    std::vector<double> per_time;
    double commutation_error = 0.0;   // |Lap grad W - grad Lap W| (flat-torus identity)
};
BurgersReport burgers_from_value(const ValueFunction& vf, const ControlProblem& prob);

struct DppControlResult {
    std::string label;
    McEstimate cost;
    double gap_over_sigma = 0.0;  // (J - W) / stderr
};
struct DppReport {
    double W_value = 0.0;    // W(t0, x0)
    McEstimate optimal;      // cost under u*
    std::vector<DppControlResult> perturbed;
    McEstimate subinterval;  // cost over [t0, t0+h] with continuation W(t0+h, .)
    double subinterval_h = 0.0;
    bool optimal_within_3sigma = false;
    bool perturbed_above = false;    // all perturbed >= W - 3 sigma
    bool subinterval_within_3sigma = false;
};

/// Monte-Carlo dynamic-programming check at (t0, x0): the optimal control
/// reproduces W within noise, perturbed controls do not fall below it, and
/// the sub-interval identity holds with W(t0+h, .) as continuation.
DppReport dpp_check(const ControlProblem& prob, const ValueFunction& vf, const Vec& x0, double t0,
                    const std::vector<VectorField>& perturbations, double dt, int n_paths,
                    uint64_t seed);

struct HjReport {
    std::vector<double> nus;
    std::vector<double> cauchy_diffs;   // |W_{nu_i} - W_{nu_{i+1}}| at t = 0
    std::vector<double> hj_residuals;   // inviscid residual of each W_nu
    std::vector<double> characteristic_diffs;  // vs inviscid Burgers integration
};

/// Vanishing-viscosity study: solve at each nu, report Cauchy differences of
/// W, the inviscid Hamilton-Jacobi residual, and the distance between
/// grad W(T - t) and a short unprojected inviscid Burgers integration of the
/// terminal gradient (the characteristics route).
HjReport hj_euler(const ControlProblem& prob, const std::vector<double>& nus, int steps,
                  double char_horizon, double char_dt);

}  // namespace sdifflab
