#include "sdifflab/flow.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace sdifflab {

namespace {

// stream-id tags so shared-noise, per-path and auxiliary draws never collide
constexpr uint64_t kStreamSharedNoise = 0x51574E5348415245ull;  // shared step noise
constexpr uint64_t kStreamPath = 0x5041544853545232ull;         // per-path base

uint64_t path_stream(uint64_t path) { return kStreamPath + 0x9E37ull * path + path; }

/// Runs fn(chunk, begin, end) over a fixed chunk grid. The chunk count is
/// independent of the worker count, so any chunk-indexed reduction is
/// reproducible regardless of parallelism.
void parallel_chunks(int n_items, int n_chunks, int threads,
                     const std::function<void(int, int, int)>& fn) {
    if (n_items <= 0) return;
    n_chunks = std::max(1, std::min(n_chunks, n_items));
    const int per = (n_items + n_chunks - 1) / n_chunks;
    int hw = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    hw = std::max(1, std::min(hw, n_chunks));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int c = next.fetch_add(1);
            if (c >= n_chunks) return;
            const int b = c * per;
            const int e = std::min(n_items, b + per);
            if (b < e) fn(c, b, e);
        }
    };
    if (hw == 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(hw));
    for (int i = 0; i < hw; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

constexpr int kChunks = 256;

struct MeanVar {
    double sum = 0.0;
    double sumsq = 0.0;
    long n = 0;
    void push(double x) {
        sum += x;
        sumsq += x * x;
        ++n;
    }
    void merge(const MeanVar& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        n += o.n;
    }
    McEstimate finish() const {
        McEstimate e;
        e.n = static_cast<int>(n);
        if (n == 0) return e;
        e.value = sum / n;
        const double var = std::max(0.0, sumsq / n - e.value * e.value);
        e.stderr_ = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
        return e;
    }
};

// flattened basis data for per-particle noise evaluation
struct QFlat {
    struct El {
        std::array<int, 3> k;
        bool is_sin;
        Vec amp;  // weight already folded in
    };
    int dim = 0;
    std::vector<El> els;

    explicit QFlat(const QSpectrum& Q) : dim(Q.dim) {
        els.reserve(Q.entries.size());
        for (const auto& e : Q.entries) {
            El el;
            el.is_sin = false;
            el.k = {0, 0, 0};
            Vec amp(dim);
            for (const auto& [m, a] : e.field.coeffs()) {
                el.k = m.k;
                el.is_sin = m.parity == Parity::sin;
                for (int i = 0; i < dim; ++i) amp[i] = a[i];
                break;
            }
            el.amp = e.weight * amp;
            els.push_back(el);
        }
    }

    /// sum_i dW_i c_i A_i(x), optionally with its spatial Jacobian.
    void eval(const Vec& x, std::span<const double> dW, Vec& out, Mat* jac) const {
        out = Vec(dim);
        if (jac) *jac = Mat(dim);
        for (size_t i = 0; i < els.size(); ++i) {
            const El& e = els[i];
            double ph = 0.0;
            for (int ax = 0; ax < dim; ++ax) ph += e.k[static_cast<size_t>(ax)] * x[ax];
            const double c = std::cos(ph), s = std::sin(ph);
            const double w = e.is_sin ? s : c;
            const double dw = e.is_sin ? c : -s;
            for (int m = 0; m < dim; ++m) {
                out[m] += dW[i] * e.amp[m] * w;
                if (jac)
                    for (int n = 0; n < dim; ++n)
                        (*jac)(m, n) += dW[i] * e.amp[m] * dw * e.k[static_cast<size_t>(n)];
            }
        }
    }
};

Vec wrap(const Vec& x) { return x.wrapped(); }

// Heun update of position and (optionally) Jacobian for a one-step increment
// map x -> x + G(x); the increment field G already contains dt and sqrt(dt)
// factors. DPhi = I + (DG(x) + DG(pred)(I + DG(x))) / 2.
template <typename EvalG>
void heun_apply(Vec& x, Mat* J, EvalG&& G) {
    Mat dg0, dg1;
    Vec g0(x.dim), g1(x.dim);
    G(x, g0, J ? &dg0 : nullptr);
    Vec pred = x + g0;
    G(pred, g1, J ? &dg1 : nullptr);
    Vec xn = x + 0.5 * (g0 + g1);
    if (J) {
        const Mat I = Mat::identity(x.dim);
        Mat dphi = I + 0.5 * (dg0 + dg1 * (I + dg0));
        *J = dphi * (*J);
    }
    x = wrap(xn);
}

}  // namespace

ParticleEnsemble ParticleEnsemble::lattice(int dim, int per_axis, uint64_t seed,
                                           bool track_jacobians) {
    ParticleEnsemble e;
    e.dim = dim;
    e.seed = seed;
    const double h = kTwoPi / per_axis;
    std::array<int, 3> idx{0, 0, 0};
    long total = 1;
    for (int i = 0; i < dim; ++i) total *= per_axis;
    for (long flat = 0; flat < total; ++flat) {
        long rem = flat;
        for (int i = dim - 1; i >= 0; --i) {
            idx[i] = static_cast<int>(rem % per_axis);
            rem /= per_axis;
        }
        Vec p(dim);
        for (int i = 0; i < dim; ++i) p[i] = (idx[i] + 0.5) * h;
        e.positions.push_back(p);
    }
    if (track_jacobians) e.jacobians.assign(e.positions.size(), Mat::identity(dim));
    return e;
}

ParticleEnsemble ParticleEnsemble::at_points(std::vector<Vec> pts, uint64_t seed,
                                             bool track_jacobians) {
    if (pts.empty()) throw std::invalid_argument("ParticleEnsemble: no points");
    ParticleEnsemble e;
    e.dim = pts.front().dim;
    e.seed = seed;
    e.positions = std::move(pts);
    if (track_jacobians) e.jacobians.assign(e.positions.size(), Mat::identity(e.dim));
    return e;
}

std::vector<double> q_increment(const QSpectrum& Q, double dt, PathRng& rng) {
    if (dt < 0.0) throw std::invalid_argument("q_increment: dt must be >= 0");
    std::vector<double> out(Q.entries.size());
    const double s = std::sqrt(dt);
    for (auto& v : out) v = s * rng.next_gaussian();
    return out;
}

ParticleEnsemble stratonovich_step(const ParticleEnsemble& ens, const VectorField& drift,
                                   const NoiseModel& noise, double nu, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("stratonovich_step: dt must be positive");
    if (drift.dim() != ens.dim)
        throw std::invalid_argument("stratonovich_step: drift dimension mismatch");
    ParticleEnsemble out = ens;
    out.t = ens.t + dt;
    out.step_index = ens.step_index + 1;
    const bool track = !ens.jacobians.empty();
    const double root2nu = std::sqrt(2.0 * nu);
    const VectorEvaluator u_eval(drift);

    if (noise.kind == NoiseModel::Kind::q_wiener && noise.shared) {
        // one Q-Wiener increment moves the whole ensemble: that is the flow
        PathRng rng(ens.seed ^ kStreamSharedNoise, ens.step_index);
        std::vector<double> dW = q_increment(*noise.Q, dt, rng);
        VectorField noise_field = qsqrt_expand(*noise.Q, dW);
        noise_field *= root2nu;
        VectorField total = extend_to(noise_field, std::max(drift.trunc(), noise_field.trunc()));
        VectorField du = drift;
        du *= dt;
        total += extend_to(du, total.trunc());
        const VectorEvaluator g_eval(total);
        for (size_t i = 0; i < out.positions.size(); ++i) {
            auto G = [&](const Vec& x, Vec& g, Mat* jac) {
                g = jac ? g_eval.eval_with_jacobian(x, *jac) : g_eval(x);
            };
            heun_apply(out.positions[i], track ? &out.jacobians[i] : nullptr, G);
        }
        return out;
    }

    std::optional<QFlat> qf;
    if (noise.kind == NoiseModel::Kind::q_wiener) qf.emplace(*noise.Q);

    for (size_t i = 0; i < out.positions.size(); ++i) {
        // disjoint (particle, step) stream ids
        PathRng rng(ens.seed, (static_cast<uint64_t>(i) << 32) | (ens.step_index & 0xffffffffull));
        std::vector<double> dW;
        Vec dB(ens.dim);
        if (noise.kind == NoiseModel::Kind::q_wiener) {
            dW = q_increment(*noise.Q, dt, rng);
        } else if (noise.kind == NoiseModel::Kind::standard) {
            const double s = std::sqrt(dt);
            for (int c = 0; c < ens.dim; ++c) dB[c] = root2nu * s * rng.next_gaussian();
        }
        auto G = [&](const Vec& x, Vec& g, Mat* jac) {
            Mat ju;
            Vec u = jac ? u_eval.eval_with_jacobian(x, ju) : u_eval(x);
            g = dt * u;
            if (jac) *jac = dt * ju;
            if (noise.kind == NoiseModel::Kind::q_wiener) {
                Vec nz(x.dim);
                Mat jn;
                qf->eval(x, dW, nz, jac ? &jn : nullptr);
                g += root2nu * nz;
                if (jac) *jac += root2nu * jn;
            } else if (noise.kind == NoiseModel::Kind::standard) {
                g += dB;
            }
        };
        heun_apply(out.positions[i], track ? &out.jacobians[i] : nullptr, G);
    }
    return out;
}

EnsembleTrajectory evolve(ParticleEnsemble ens, const VectorField& drift, const NoiseModel& noise,
                          double nu, double dt, int nsteps, int stride) {
    EnsembleTrajectory traj;
    traj.snapshots.push_back({ens.t, ens.positions, ens.jacobians});
    for (int i = 0; i < nsteps; ++i) {
        ens = stratonovich_step(ens, drift, noise, nu, dt);
        if ((stride > 0 && (i + 1) % stride == 0) || i + 1 == nsteps)
            traj.snapshots.push_back({ens.t, ens.positions, ens.jacobians});
    }
    return traj;
}

VolumeReport volume_check(const EnsembleTrajectory& traj) {
    VolumeReport r;
    for (const auto& snap : traj.snapshots) {
        double m = 0.0;
        for (const auto& J : snap.jacobians) m = std::max(m, std::abs(J.det() - 1.0));
        r.per_time_max.push_back(m);
        r.max_det_error = std::max(r.max_det_error, m);
    }
    return r;
}

namespace {

// one independent path from x0 over nsteps of size dt; returns terminal point
Vec simulate_path(const Vec& x0, const VectorEvaluator& u_eval,
                  const std::optional<QFlat>& qf, const QSpectrum* Q, double nu, double dt,
                  int nsteps, PathRng& rng) {
    const double root2nu = std::sqrt(2.0 * nu);
    const double s = std::sqrt(dt);
    Vec x = x0;
    std::vector<double> dW;
    for (int k = 0; k < nsteps; ++k) {
        Vec dB(x.dim);
        if (qf) {
            dW.resize(Q->entries.size());
            for (auto& v : dW) v = s * rng.next_gaussian();
        } else {
            for (int c = 0; c < x.dim; ++c) dB[c] = root2nu * s * rng.next_gaussian();
        }
        auto G = [&](const Vec& p, Vec& g, Mat* jac) {
            g = dt * u_eval(p);
            if (qf) {
                Vec nz(p.dim);
                qf->eval(p, dW, nz, nullptr);
                g += root2nu * nz;
            } else {
                g += dB;
            }
            (void)jac;
        };
        heun_apply(x, nullptr, G);
    }
    return x;
}

}  // namespace

NelsonEstimate nelson_derivative(const Vec& x0, const VectorField& drift, const NoiseModel& noise,
                                 double nu, double eps, int substeps, int n_paths, uint64_t seed) {
    if (n_paths <= 0) throw std::invalid_argument("nelson_derivative: n_paths must be positive");
    const VectorEvaluator u_eval(drift);
    std::optional<QFlat> qf;
    if (noise.kind == NoiseModel::Kind::q_wiener) qf.emplace(*noise.Q);
    const double dt = eps / substeps;

    std::vector<std::array<MeanVar, 3>> partial(kChunks);
    parallel_chunks(n_paths, kChunks, 0, [&](int chunk, int b, int e) {
        for (int p = b; p < e; ++p) {
            PathRng rng(seed, path_stream(static_cast<uint64_t>(p)));
            Vec xT = simulate_path(x0, u_eval, qf, noise.Q, nu, dt, substeps, rng);
            for (int c = 0; c < x0.dim; ++c) {
                double d = xT[c] - x0[c];
                // unwrap: increments are far smaller than half the torus
                if (d > 0.5 * kTwoPi) d -= kTwoPi;
                if (d < -0.5 * kTwoPi) d += kTwoPi;
                partial[static_cast<size_t>(chunk)][static_cast<size_t>(c)].push(d / eps);
            }
        }
    });
    std::array<MeanVar, 3> total;
    for (const auto& pc : partial)
        for (int c = 0; c < x0.dim; ++c) total[static_cast<size_t>(c)].merge(pc[static_cast<size_t>(c)]);
    NelsonEstimate est;
    est.value = Vec(x0.dim);
    est.stderr_ = Vec(x0.dim);
    for (int c = 0; c < x0.dim; ++c) {
        McEstimate m = total[static_cast<size_t>(c)].finish();
        est.value[c] = m.value;
        est.stderr_[c] = m.stderr_;
    }
    return est;
}

std::vector<NelsonEstimate> nelson_sweep(const Vec& x0, const VectorField& drift,
                                         const NoiseModel& noise, double nu,
                                         std::span<const double> eps_values, double dt,
                                         int n_paths, uint64_t seed, bool coupled) {
    const VectorEvaluator u_eval(drift);
    std::optional<QFlat> qf;
    if (noise.kind == NoiseModel::Kind::q_wiener) qf.emplace(*noise.Q);
    std::vector<int> step_at;
    for (double e : eps_values) {
        const double ratio = e / dt;
        const int n = static_cast<int>(std::lround(ratio));
        if (std::abs(ratio - n) > 1e-9)
            throw std::invalid_argument("nelson_sweep: every eps must be a multiple of dt");
        step_at.push_back(n);
    }
    const int total_steps = step_at.empty() ? 0 : step_at.back();

    const size_t ne = eps_values.size();
    std::vector<std::vector<std::array<MeanVar, 3>>> partial(
        kChunks, std::vector<std::array<MeanVar, 3>>(ne));
    parallel_chunks(n_paths, kChunks, 0, [&](int chunk, int b, int e) {
        for (int p = b; p < e; ++p) {
            PathRng rng(seed, path_stream(static_cast<uint64_t>(p)));
            Vec x = x0;
            Vec x_free = x0;  // zero-drift chain sharing the increments
            size_t next = 0;
            // unwrapped displacement accumulated along common paths
            Vec disp(x0.dim);
            for (int k = 0; k < total_steps && next < ne; ++k) {
                Vec before = x;
                Vec before_free = x_free;
                const double s = std::sqrt(dt);
                std::vector<double> dW;
                Vec dB(x.dim);
                if (qf) {
                    dW.resize(noise.Q->entries.size());
                    for (auto& v : dW) v = s * rng.next_gaussian();
                } else {
                    for (int c = 0; c < x.dim; ++c)
                        dB[c] = std::sqrt(2.0 * nu) * s * rng.next_gaussian();
                }
                auto G = [&](bool with_drift, const Vec& q, Vec& g) {
                    g = with_drift ? dt * u_eval(q) : Vec(q.dim);
                    if (qf) {
                        Vec nz(q.dim);
                        qf->eval(q, dW, nz, nullptr);
                        g += std::sqrt(2.0 * nu) * nz;
                    } else {
                        g += dB;
                    }
                };
                auto Gd = [&](const Vec& q, Vec& g, Mat*) { G(true, q, g); };
                heun_apply(x, nullptr, Gd);
                for (int c = 0; c < x.dim; ++c) {
                    double d = x[c] - before[c];
                    if (d > 0.5 * kTwoPi) d -= kTwoPi;
                    if (d < -0.5 * kTwoPi) d += kTwoPi;
                    disp[c] += d;
                }
                if (coupled) {
                    auto Gf = [&](const Vec& q, Vec& g, Mat*) { G(false, q, g); };
                    heun_apply(x_free, nullptr, Gf);
                    for (int c = 0; c < x.dim; ++c) {
                        double d = x_free[c] - before_free[c];
                        if (d > 0.5 * kTwoPi) d -= kTwoPi;
                        if (d < -0.5 * kTwoPi) d += kTwoPi;
                        disp[c] -= d;
                    }
                }
                while (next < ne && k + 1 == step_at[next]) {
                    for (int c = 0; c < x.dim; ++c)
                        partial[static_cast<size_t>(chunk)][next][static_cast<size_t>(c)].push(
                            disp[c] / eps_values[next]);
                    ++next;
                }
            }
        }
    });

    std::vector<NelsonEstimate> out(ne);
    for (size_t j = 0; j < ne; ++j) {
        std::array<MeanVar, 3> total;
        for (const auto& pc : partial)
            for (int c = 0; c < x0.dim; ++c)
                total[static_cast<size_t>(c)].merge(pc[j][static_cast<size_t>(c)]);
        out[j].value = Vec(x0.dim);
        out[j].stderr_ = Vec(x0.dim);
        for (int c = 0; c < x0.dim; ++c) {
            McEstimate m = total[static_cast<size_t>(c)].finish();
            out[j].value[c] = m.value;
            out[j].stderr_[c] = m.stderr_;
        }
    }
    return out;
}

GeneratorCheck generator_check(const QSpectrum& Q, const VectorField& drift, double nu,
                               const ScalarField& f, const Vec& x, double h, int substeps,
                               int n_paths, uint64_t seed) {
    const VectorEvaluator u_eval(drift);
    std::optional<QFlat> qf;
    qf.emplace(Q);
    const double dt = h / substeps;
    const double f0 = f.eval(x);

    std::vector<MeanVar> partial(kChunks);
    const ScalarEvaluator f_eval(f);
    parallel_chunks(n_paths, kChunks, 0, [&](int chunk, int b, int e) {
        for (int p = b; p < e; ++p) {
            PathRng rng(seed, path_stream(static_cast<uint64_t>(p)));
            Vec xT = simulate_path(x, u_eval, qf, &Q, nu, dt, substeps, rng);
            partial[static_cast<size_t>(chunk)].push((f_eval(xT) - f0) / h);
        }
    });
    MeanVar total;
    for (const auto& pc : partial) total.merge(pc);
    McEstimate m = total.finish();

    // spectral generator and its square for the leading bias scale
    auto apply_L = [&](const ScalarField& g) {
        const int w = std::max(g.trunc(), drift.trunc());
        ScalarField Lg = advect_scalar(extend_to(drift, w), extend_to(g, w), Dealias::keep_exact);
        ScalarField lap = extend_to(laplacian(g), Lg.trunc());
        lap *= nu;
        Lg += lap;
        return Lg;
    };
    ScalarField Lf = apply_L(f);
    ScalarField LLf = apply_L(Lf);

    GeneratorCheck out;
    out.empirical = m.value;
    out.stderr_ = m.stderr_;
    out.exact = Lf.eval(x);
    out.next_order = 0.5 * std::abs(LLf.eval(x));
    return out;
}

McEstimate feynman_kac(const ScalarField& V, const ScalarField& Psi, double nu, const Vec& x,
                       double t, double T, double dt, int n_paths, uint64_t seed) {
    if (nu <= 0.0) throw std::invalid_argument("feynman_kac: nu must be positive");
    const int nsteps = static_cast<int>(std::lround((T - t) / dt));
    if (nsteps < 0 || std::abs(nsteps * dt - (T - t)) > 1e-9)
        throw std::invalid_argument("feynman_kac: T - t must be a nonnegative multiple of dt");
    const double root2nu = std::sqrt(2.0 * nu);
    const ScalarEvaluator v_eval(V);
    const ScalarEvaluator psi_eval(Psi);
    const double inv2nu = 1.0 / (2.0 * nu);

    std::vector<MeanVar> partial(kChunks);
    parallel_chunks(n_paths, kChunks, 0, [&](int chunk, int b, int e) {
        for (int p = b; p < e; ++p) {
            PathRng rng(seed, path_stream(static_cast<uint64_t>(p)));
            Vec xs = x;
            ActionAccumulator acc;
            acc.push(v_eval(xs) * inv2nu, dt);
            const double s = std::sqrt(dt);
            for (int k = 0; k < nsteps; ++k) {
                Vec step(xs.dim);
                for (int c = 0; c < xs.dim; ++c) step[c] = root2nu * s * rng.next_gaussian();
                xs = (xs + step).wrapped();
                acc.push(v_eval(xs) * inv2nu, dt);
            }
            const double weight = std::exp(acc.running) * std::exp(-psi_eval(xs) * inv2nu);
            partial[static_cast<size_t>(chunk)].push(weight);
        }
    });
    MeanVar total;
    for (const auto& pc : partial) total.merge(pc);
    return total.finish();
}

McEstimate action_estimate(const EnsembleTrajectory& traj, const VectorField& control,
                           const ScalarField& V, const ScalarField& Psi) {
    if (traj.snapshots.size() < 2)
        throw std::invalid_argument("action_estimate: need at least two snapshots");
    const VectorEvaluator u_eval(control);
    const ScalarEvaluator v_eval(V);
    const ScalarEvaluator psi_eval(Psi);
    const size_t n = traj.snapshots.front().positions.size();
    MeanVar mv;
    for (size_t p = 0; p < n; ++p) {
        ActionAccumulator acc;
        for (size_t s = 0; s < traj.snapshots.size(); ++s) {
            const auto& snap = traj.snapshots[s];
            const Vec& xs = snap.positions[p];
            const double integrand = 0.5 * u_eval(xs).norm2() - v_eval(xs);
            const double dt = s == 0 ? 0.0 : snap.t - traj.snapshots[s - 1].t;
            if (s == 0)
                acc.push(integrand, 0.0);
            else
                acc.push(integrand, dt);
        }
        const double J = acc.running + psi_eval(traj.snapshots.back().positions[p]);
        mv.push(J);
    }
    return mv.finish();
}

McEstimate estimate_controlled_cost(const ControlledCostSpec& spec) {
    if (spec.n_paths <= 0) throw std::invalid_argument("estimate_controlled_cost: n_paths");
    const int nsteps = static_cast<int>(std::lround((spec.T - spec.t0) / spec.dt));
    if (nsteps < 0 || std::abs(nsteps * spec.dt - (spec.T - spec.t0)) > 1e-9)
        throw std::invalid_argument("estimate_controlled_cost: horizon not a multiple of dt");
    if (!spec.V || (!spec.Psi && !spec.continuation))
        throw std::invalid_argument("estimate_controlled_cost: missing potential or terminal cost");
    const double root2nu = std::sqrt(2.0 * spec.nu);
    const double s = std::sqrt(spec.dt);
    const ScalarEvaluator v_eval(*spec.V);
    std::optional<ScalarEvaluator> psi_eval;
    if (spec.Psi) psi_eval.emplace(*spec.Psi);

    std::vector<MeanVar> partial(kChunks);
    parallel_chunks(spec.n_paths, kChunks, spec.threads, [&](int chunk, int b, int e) {
        for (int p = b; p < e; ++p) {
            PathRng rng(spec.seed, path_stream(static_cast<uint64_t>(p)));
            Vec x = spec.x0;
            ActionAccumulator acc;
            {
                const Vec u0 = spec.control_at(0)(x);
                acc.push(0.5 * u0.norm2() - v_eval(x), spec.dt);
            }
            for (int k = 0; k < nsteps; ++k) {
                const VectorEvaluator& u_eval = spec.control_at(k);
                Vec dB(x.dim);
                for (int c = 0; c < x.dim; ++c) dB[c] = root2nu * s * rng.next_gaussian();
                // Heun on the drift, additive noise shared between stages
                Vec g0 = spec.dt * u_eval(x) + dB;
                Vec pred = x + g0;
                Vec g1 = spec.dt * u_eval(pred) + dB;
                x = (x + 0.5 * (g0 + g1)).wrapped();
                const Vec uk = spec.control_at(k + 1)(x);
                acc.push(0.5 * uk.norm2() - v_eval(x), spec.dt);
            }
            const double terminal = spec.continuation ? spec.continuation(x) : (*psi_eval)(x);
            partial[static_cast<size_t>(chunk)].push(acc.running + terminal);
        }
    });
    MeanVar total;
    for (const auto& pc : partial) total.merge(pc);
    return total.finish();
}

}  // namespace sdifflab
