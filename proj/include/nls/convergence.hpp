#pragma once

#include <array>
#include <vector>

#include "nls/evolve.hpp"

namespace nls {

struct FitResult {
    GroupElement g;                        // apply_group(g, f) is the aligned field
    double distance = 0.0;                 // ||apply_group(g, f) - Q||_2
    int iterations = 0;                    // coordinate-search sweeps
    bool converged = false;
    std::array<double, 7> final_steps{};   // log-lambda, x0 (3), xi0 (3)
};

// Minimizes ||apply_group(g, f) - Q||_2 over the 2d + 2 group parameters:
// moment-based initialization, deterministic coordinate search with
// geometric step shrink on (log lambda, x0, xi0), gamma in closed form.
FitResult fit_to_ground_state(const ComplexField& f, const GroundState& q);

struct SequentialConvergenceSample {
    double t = 0.0;
    FitResult fit;
    double running_infimum = 0.0;
};

// Evolves u0 (mu = -1, soliton mass) and fits the group parameters at each
// sample time, reporting the distance profile and its running infimum.
std::vector<SequentialConvergenceSample> sequential_convergence_experiment(
    const ComplexField& u0, const EvolutionConfig& cfg, const GroundState& q,
    const std::vector<double>& sample_times);

struct WeakPairing {
    Complex against_q;                     // inner(g_n f_n, Q) / ||Q||_2^2
    std::array<Complex, 16> battery;       // against fixed band-limited test functions
};

// Weak-convergence proxy of the fitted sequence: L2 pairings only, no
// convergence asserted.
std::vector<WeakPairing> weak_limit_proxy(const std::vector<ComplexField>& fields,
                                          const GroundState& q);

// The 16 fixed test functions of the weak-pairing battery, unit-normalized.
std::vector<ComplexField> weak_test_battery(const Grid& grid);

}  // namespace nls
