#include <benchmark/benchmark.h>

#include "sdifflab/basis.hpp"
#include "sdifflab/diffops.hpp"
#include "sdifflab/evaluator.hpp"
#include "sdifflab/flow.hpp"
#include "sdifflab/ns_solver.hpp"
#include "sdifflab/rng.hpp"

using namespace sdifflab;

namespace {

VectorField random_field(int K, uint64_t seed) {
    PathRng rng(seed, 0);
    VectorField u(2, K);
    std::array<int, 3> k{0, 0, 0};
    for (k[0] = -K; k[0] <= K; ++k[0])
        for (k[1] = -K; k[1] <= K; ++k[1]) {
            int sign = canonical_sign(k);
            if (sign < 0) continue;
            u.add(Mode{k, Parity::cos}, Vec(rng.next_gaussian(), rng.next_gaussian()));
            if (sign > 0) u.add(Mode{k, Parity::sin}, Vec(rng.next_gaussian(), rng.next_gaussian()));
        }
    return u;
}

void bm_advect(benchmark::State& state) {
    const int K = static_cast<int>(state.range(0));
    VectorField u = leray_project(random_field(K, 1)).solenoidal;
    VectorField w = random_field(K, 2);
    for (auto _ : state) benchmark::DoNotOptimize(advect(u, w));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_advect)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void bm_leray(benchmark::State& state) {
    const int K = static_cast<int>(state.range(0));
    VectorField w = random_field(K, 3);
    for (auto _ : state) benchmark::DoNotOptimize(leray_project(w));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_leray)->Arg(4)->Arg(16);

void bm_generator_sum(benchmark::State& state) {
    const int K = static_cast<int>(state.range(0));
    QSpectrum Q = build_basis(2, K);
    VectorField u = leray_project(random_field(K, 4)).solenoidal;
    ScalarField f = component(u, 0);
    for (auto _ : state) benchmark::DoNotOptimize(generator_sum(Q, f));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_generator_sum)->Arg(2)->Arg(4);

void bm_solver_step(benchmark::State& state) {
    SolverConfig cfg;
    cfg.K = static_cast<int>(state.range(0));
    cfg.nu = 0.1;
    cfg.dt = 1e-3;
    FluidState s = FluidState::make(0.0, leray_project(random_field(cfg.K, 5)).solenoidal);
    for (auto _ : state) benchmark::DoNotOptimize(step(s, cfg));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_solver_step)->Arg(3)->Arg(6);

void bm_field_eval(benchmark::State& state) {
    const int K = static_cast<int>(state.range(0));
    VectorField u = random_field(K, 6);
    VectorEvaluator ev(u);
    PathRng rng(7, 0);
    Vec x(rng.next_u01() * kTwoPi, rng.next_u01() * kTwoPi);
    for (auto _ : state) benchmark::DoNotOptimize(ev(x));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_field_eval)->Arg(4)->Arg(16);

void bm_stratonovich_step(benchmark::State& state) {
    QSpectrum Q = build_basis(2, 1);
    VectorField tg = taylor_green(1.0, 0.0, 0.0).u;
    ParticleEnsemble ens = ParticleEnsemble::lattice(2, 32, 11, false);  // 1024 particles
    NoiseModel noise = QWienerNoise{&Q};
    for (auto _ : state) {
        ens = stratonovich_step(ens, tg, noise, 0.1, 1e-3);
        benchmark::DoNotOptimize(ens.positions.front());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(ens.positions.size()));
}
BENCHMARK(bm_stratonovich_step);

}  // namespace

BENCHMARK_MAIN();
