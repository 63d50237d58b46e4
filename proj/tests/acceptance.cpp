// Acceptance suite: twelve gate criteria, one pass/fail line each.
//
// Every criterion maps to named checks of one or two registered experiments,
// run here at the pinned default scales, plus a wall-clock budget. Exit code
// is 0 only if every criterion passes.

#include <chrono>
#include <cstring>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "sdifflab/experiments.hpp"
#include "sdifflab/version.hpp"

using namespace sdifflab;

namespace {

struct Criterion {
    int number;
    std::string title;
    std::vector<std::string> experiments;             // run (memoized) before judging
    std::vector<std::string> checks;                  // qualified "experiment/check" names
    double budget_seconds;
};

class Runner {
  public:
    Runner(uint64_t seed, const std::string& out_dir) : seed_(seed), out_dir_(out_dir) {}

    const Report& get(const std::string& name) {
        auto it = cache_.find(name);
        if (it != cache_.end()) return it->second;
        ExperimentConfig cfg;
        cfg.experiment = name;
        cfg.seed = seed_;
        cfg.out_dir = out_dir_;
        Report rep = run_experiment(cfg);
        return cache_.emplace(name, std::move(rep)).first->second;
    }

  private:
    uint64_t seed_;
    std::string out_dir_;
    std::map<std::string, Report> cache_;
};

const CheckResult* find_check(const Report& rep, const std::string& check) {
    for (const auto& c : rep.checks)
        if (c.name == check) return &c;
    return nullptr;
}

}  // namespace

int main(int argc, char** argv) {
    uint64_t seed = 12345;
    std::string out_dir;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
            seed = std::stoull(argv[++i]);
        else if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc)
            out_dir = argv[++i];
        else {
            std::cerr << "usage: acceptance [--seed S] [--out DIR]\n";
            return 2;
        }
    }

    const std::vector<Criterion> criteria{
        {1, "basis identities exact to 1e-12 on T^2",
         {"basis-identities"},
         {"basis-identities/ell1-pointwise-metric", "basis-identities/ell2-self-advection",
          "basis-identities/ell3-wedge", "basis-identities/ca1-generator-sum",
          "basis-identities/ca2-divergence"},
         10.0},
        {2, "Lie-derivative Hodge Laplacian identity to 1e-12",
         {"basis-identities"},
         {"basis-identities/lie-hodge-identity"},
         10.0},
        {3, "decaying vortex to 1e-8 with the energy law at O(dt^2)",
         {"ns-taylor-green"},
         {"ns-taylor-green/tg-l2-error", "ns-taylor-green/energy-law-order"},
         30.0},
        {4, "inviscid conservation: energy 1e-8, enstrophy 1e-6",
         {"euler-conservation"},
         {"euler-conservation/euler-energy-drift", "euler-conservation/euler-enstrophy-drift"},
         30.0},
        {5, "group/manifold Burgers equivalence to 1e-10 with negative control",
         {"sg-equivalence"},
         {"sg-equivalence/sg-burgers-residual", "sg-equivalence/sg-negative-control"},
         30.0},
        {6, "time reversal agreement to 1e-6",
         {"time-reversal"},
         {"time-reversal/time-reversal-distance"},
         10.0},
        {7, "HJB via Cole-Hopf: residual 1e-8, round trip 1e-10, Burgers 1e-6",
         {"hjb-colehopf", "burgers-from-value"},
         {"hjb-colehopf/hjb-residual-analytic", "hjb-colehopf/colehopf-roundtrip",
          "hjb-colehopf/heat-analytic-error", "hjb-colehopf/optimal-control-closed-form",
          "burgers-from-value/mburgers-residual", "burgers-from-value/gradient-commutation"},
         30.0},
        {8, "dynamic programming: optimum within 3 sigma, perturbations above",
         {"dpp"},
         {"dpp/dpp-optimal-3sigma", "dpp/dpp-perturbed-floor", "dpp/dpp-perturbed-gap",
          "dpp/dpp-subinterval-3sigma"},
         180.0},
        {9, "Feynman-Kac matches the spectral heat solution within 3 sigma + O(dt)",
         {"feynman-kac"},
         {"feynman-kac/feynman-kac-cosine-terminal", "feynman-kac/feynman-kac-constant-potential",
          "feynman-kac/feynman-kac-oscillatory"},
         120.0},
        {10, "stochastic flow: det J at O(dt), Nelson bias linear, generator identity",
         {"flow-volume", "nelson", "generator"},
         {"flow-volume/volume-detj-max", "flow-volume/volume-detj-order",
          "flow-volume/volume-detj-stochastic-trend", "nelson/nelson-within-3sigma",
          "nelson/nelson-bias-linearity", "generator/generator-identity"},
         180.0},
        {11, "group gradients: integral type zero to 1e-12, cylinder oracle first order",
         {"cylinder-gradient"},
         {"cylinder-gradient/integral-gradient-zero", "cylinder-gradient/cylinder-oracle-error",
          "cylinder-gradient/cylinder-oracle-order"},
         30.0},
        {12, "vanishing viscosity: Cauchy and residual trends decrease",
         {"hj-vanishing-viscosity"},
         {"hj-vanishing-viscosity/hj-cauchy-monotone",
          "hj-vanishing-viscosity/hj-residual-monotone",
          "hj-vanishing-viscosity/hj-characteristics-trend"},
         60.0},
    };

    Runner runner(seed, out_dir);
    std::cout << "acceptance suite, tool version " << kVersion << ", seed " << seed << "\n";

    bool all_pass = true;
    for (const auto& cr : criteria) {
        bool pass = true;
        std::string why;
        double runtime = 0.0;
        for (const auto& exp : cr.experiments) {
            const Report& rep = runner.get(exp);
            runtime += rep.runtime_seconds;
        }
        for (const auto& qualified : cr.checks) {
            const auto slash = qualified.find('/');
            const Report& rep = runner.get(qualified.substr(0, slash));
            const CheckResult* c = find_check(rep, qualified.substr(slash + 1));
            if (!c) {
                pass = false;
                why += " [missing check " + qualified + "]";
                continue;
            }
            if (!c->pass) {
                pass = false;
                std::ostringstream os;
                os.precision(6);
                os << " [" << qualified << ": " << c->measured << " " << c->comparator << " "
                   << c->tolerance << " failed]";
                why += os.str();
            }
        }
        if (runtime > cr.budget_seconds) {
            pass = false;
            std::ostringstream os;
            os.precision(3);
            os << " [runtime " << runtime << " s over the " << cr.budget_seconds << " s budget]";
            why += os.str();
        }
        all_pass = all_pass && pass;
        std::cout << (pass ? "PASS" : "FAIL") << " criterion-" << cr.number << ": " << cr.title
                  << " (" << cr.checks.size() << " checks, "
                  << static_cast<int>(runtime * 1000.0) << " ms)" << why << "\n";
    }
    std::cout << (all_pass ? "ACCEPTANCE: PASS" : "ACCEPTANCE: FAIL") << "\n";
    return all_pass ? 0 : 1;
}
