#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sdifflab/basis.hpp"
#include "sdifflab/evaluator.hpp"
#include "sdifflab/fields.hpp"
#include "sdifflab/grid.hpp"
#include "sdifflab/rng.hpp"

namespace sdifflab {

/// Particle realization of the stochastic flow: positions wrapped to
/// [0, 2 pi)^d, per-particle Jacobians of the flow map, and the counter-based
/// stream state that makes the Brownian realization reproducible.
struct ParticleEnsemble {
    int dim = 0;
    double t = 0.0;
    uint64_t seed = 0;
    uint64_t step_index = 0;
    std::vector<Vec> positions;
    std::vector<Mat> jacobians;  // empty unless tracking is enabled

    static ParticleEnsemble lattice(int dim, int per_axis, uint64_t seed, bool track_jacobians);
    static ParticleEnsemble at_points(std::vector<Vec> pts, uint64_t seed, bool track_jacobians);
};

/// Noise model of the driving SDE. The group flow is driven by one shared
/// Q-Wiener realization (the same increments move every particle); the
/// manifold-level estimators use independent standard Brownian paths.
struct QWienerNoise {
    const QSpectrum* Q;
    bool shared = true;  // one realization for the whole ensemble
};
struct StandardNoise {};
struct NoNoise {};

struct NoiseModel {
    enum class Kind { q_wiener, standard, none } kind = Kind::none;
    const QSpectrum* Q = nullptr;
    bool shared = true;

    NoiseModel() = default;
    NoiseModel(QWienerNoise n) : kind(Kind::q_wiener), Q(n.Q), shared(n.shared) {}
    NoiseModel(StandardNoise) : kind(Kind::standard) {}
    NoiseModel(NoNoise) : kind(Kind::none) {}
};

/// Per-basis N(0, dt) increments of the Q-Wiener process for one step.
std::vector<double> q_increment(const QSpectrum& Q, double dt, PathRng& rng);

/// One Heun (Stratonovich midpoint) step of
///   dx = sqrt(2 nu) (noise) o dW + u(x) dt
/// with the Jacobian advanced by the variational derivative of the same
/// one-step map. The drift is frozen over the step.
ParticleEnsemble stratonovich_step(const ParticleEnsemble& ens, const VectorField& drift,
                                   const NoiseModel& noise, double nu, double dt);

struct EnsembleSnapshot {
    double t;
    std::vector<Vec> positions;
    std::vector<Mat> jacobians;
};
struct EnsembleTrajectory {
    std::vector<EnsembleSnapshot> snapshots;
};

EnsembleTrajectory evolve(ParticleEnsemble ens, const VectorField& drift, const NoiseModel& noise,
                          double nu, double dt, int nsteps, int stride = 1);

struct VolumeReport {
    double max_det_error = 0.0;              // max |det J - 1| over particles and times
    std::vector<double> per_time_max;
};
VolumeReport volume_check(const EnsembleTrajectory& traj);

/// Conditional-mean forward derivative estimator at fixed starting points.
struct NelsonEstimate {
    Vec value;    // mean increment / eps
    Vec stderr_;  // per-coordinate standard error
};
NelsonEstimate nelson_derivative(const Vec& x0, const VectorField& drift, const NoiseModel& noise,
                                 double nu, double eps, int substeps, int n_paths, uint64_t seed);

/// Same estimator evaluated at several eps along common paths, for the
/// bias-slope regression. With `coupled` set, a zero-drift chain driven by
/// the same increments is subtracted as a control variate: its expectation
/// vanishes (the basis self-advection is zero), and the Brownian part of the
/// variance cancels, which is what makes the O(eps) bias visible above noise.
std::vector<NelsonEstimate> nelson_sweep(const Vec& x0, const VectorField& drift,
                                         const NoiseModel& noise, double nu,
                                         std::span<const double> eps_values, double dt,
                                         int n_paths, uint64_t seed, bool coupled = false);

struct GeneratorCheck {
    double empirical;  // (E f(X_h) - f(x)) / h
    double stderr_;
    double exact;      // nu laplacian f + u . grad f at x
    double next_order; // 0.5 |L^2 f(x)|, the leading bias scale
};
GeneratorCheck generator_check(const QSpectrum& Q, const VectorField& drift, double nu,
                               const ScalarField& f, const Vec& x, double h, int substeps,
                               int n_paths, uint64_t seed);

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    int n = 0;
};

/// Feynman-Kac functional for the backward heat equation with potential:
/// mean of exp(int_t^T V(X_s)/(2 nu) ds) exp(-Psi(X_T)/(2 nu)) over driftless
/// sqrt(2 nu)-Brownian paths.
McEstimate feynman_kac(const ScalarField& V, const ScalarField& Psi, double nu, const Vec& x,
                       double t, double T, double dt, int n_paths, uint64_t seed);

/// Path functional accumulator semantics: trapezoidal rule in time, additive
/// over sub-intervals.
struct ActionAccumulator {
    double running = 0.0;
    double prev_integrand = 0.0;
    bool primed = false;
    void push(double integrand, double dt) {
        if (primed) running += 0.5 * (prev_integrand + integrand) * dt;
        prev_integrand = integrand;
        primed = true;
    }
};

/// Cost of a recorded ensemble trajectory under a fixed control field:
/// int (|u|^2/2 - V) ds + Psi(x_T), averaged over particles.
McEstimate action_estimate(const EnsembleTrajectory& traj, const VectorField& control,
                           const ScalarField& V, const ScalarField& Psi);

/// Fused path simulation + action estimate for the dynamic-programming
/// checks: controls may depend on time through the supplied callback, paths
/// are independent standard-noise realizations, and the terminal value may be
/// replaced by a continuation function (sub-interval form).
struct ControlledCostSpec {
    std::function<const VectorEvaluator&(int step)> control_at;  // frozen per step
    const ScalarField* V = nullptr;
    const ScalarField* Psi = nullptr;                  // used when continuation empty
    std::function<double(const Vec&)> continuation;    // overrides Psi when set
    double t0 = 0.0;
    double T = 1.0;
    double dt = 1e-3;
    double nu = 0.0;
    Vec x0;
    int n_paths = 0;
    uint64_t seed = 0;
    int threads = 0;  // 0 = hardware
};
McEstimate estimate_controlled_cost(const ControlledCostSpec& spec);

}  // namespace sdifflab
