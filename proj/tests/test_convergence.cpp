#include <doctest.h>

#include <cmath>
#include <random>

#include "nls/convergence.hpp"
#include "nls/errors.hpp"
#include "nls/spectral.hpp"

using namespace nls;

namespace {

// Q decays like e^{-|x|}, so round-trip group applications pick up periodic
// image tails of size ~e^{-(2-lambda)L}; L = 25 keeps orbit distances below
// 1e-8 for the lambda/x0 ranges used here.
const Grid& grid_1d() {
    static const Grid g = make_grid(1, 512, 25.0);
    return g;
}

const GroundState& q1() {
    static const GroundState q = solve_ground_state(grid_1d(), 1e-10);
    return q;
}

GroupElement random_element(std::mt19937_64& rng) {
    auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
    };
    // Containment budget at (n, L) = (512, 25): the corner round trip
    // (lambda 1.1, x0 0.6) floors near 2.4e-9 in L2.
    GroupElement g;
    g.lambda = uniform(0.92, 1.1);
    g.gamma0 = uniform(-3.0, 3.0);
    g.x0[0] = uniform(-0.6, 0.6);
    g.xi0[0] = uniform(-0.8, 0.8);
    return g;
}

// Band-limited, spatially localized unit-norm noise with a fixed seed. The
// envelope keeps group applications within the containment budget (a
// stationary random field would wrap its tails around the box).
ComplexField noise_field(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
    auto gauss = [&]() {
        const double u1 = std::max(uniform(), 1e-300), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    };
    std::vector<Complex> modes(g.size(), Complex(0, 0));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec3 k = g.wavevector(i);
        if (std::abs(k[0]) <= 0.2 * g.nyquist())
            modes[i] = Complex(gauss(), gauss()) * std::exp(-0.5 * norm2(k, g.dim()));
    }
    spectral::fft(g, modes, +1);
    ComplexField f(g, std::move(modes));
    for (std::size_t i = 0; i < g.size(); ++i)
        f[i] *= std::exp(-norm2(g.point(i), g.dim()) / 8.0);
    return Complex(1.0 / lp_norm(f, 2.0), 0.0) * f;
}

}  // namespace

TEST_CASE("fit recovers exact orbit points") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 3; ++trial) {
        const GroupElement g = random_element(rng);
        const ComplexField f = apply_group(inverse(g), q1().field);
        const FitResult fit = fit_to_ground_state(f, q1());
        CHECK(fit.converged);
        CHECK(fit.distance < 1e-8);
        CHECK(std::abs(fit.g.lambda - g.lambda) < 1e-6);
        CHECK(std::abs(fit.g.x0[0] - g.x0[0]) < 1e-6);
        CHECK(std::abs(fit.g.xi0[0] - g.xi0[0]) < 1e-6);
        CHECK(std::abs(std::remainder(fit.g.gamma0 - g.gamma0, 2.0 * M_PI)) < 1e-6);
    }

    CHECK_THROWS_AS(fit_to_ground_state(Complex(3.0, 0.0) * q1().field, q1()), ArgumentError);
}

TEST_CASE("fit distance is bounded by the perturbation size") {
    const double eps = 1e-3;
    const ComplexField noisy = q1().field + Complex(eps, 0.0) * noise_field(grid_1d(), 2718);
    const FitResult fit = fit_to_ground_state(noisy, q1());
    CHECK(fit.distance <= eps + 1e-8);
    // Reverse triangle inequality floor.
    CHECK(fit.distance >= std::abs(lp_norm(noisy, 2.0) - std::sqrt(q1().mass)) - 1e-12);
}

TEST_CASE("fit on an evolved soliton snapshot recovers the phase") {
    EvolutionConfig cfg;
    cfg.mu = -1;
    cfg.dt0 = 1e-4;
    cfg.t_end = 1.0;
    const ComplexField u1 = evolve_to(q1().field, 1.0, cfg);
    const FitResult fit = fit_to_ground_state(u1, q1());
    CHECK(fit.distance < 1e-6);
    // apply_group multiplies by e^{i gamma}; aligning e^{i t}Q needs -t mod 2pi.
    CHECK(std::abs(std::remainder(fit.g.gamma0 + 1.0, 2.0 * M_PI)) < 1e-4);
}

TEST_CASE("fit stationarity and orbit-distance invariance") {
    std::mt19937_64 rng(1234);
    const ComplexField base =
        q1().field + Complex(5e-3, 0.0) * noise_field(grid_1d(), 99);

    const FitResult fit = fit_to_ground_state(base, q1());
    CHECK(fit.converged);

    // Stationarity: +-10x the final step in each parameter never reduces
    // distance^2.
    auto distance_at = [&](const GroupElement& g) {
        GroupElement full = g;
        const ComplexField w = apply_group(full, base);
        return lp_norm(w - q1().field, 2.0);
    };
    const double d0 = distance_at(fit.g);
    for (int p = 0; p < 3; ++p) {
        for (double sign : {+1.0, -1.0}) {
            GroupElement g = fit.g;
            if (p == 0) g.lambda *= std::exp(sign * 10.0 * fit.final_steps[0]);
            if (p == 1) g.x0[0] += sign * 10.0 * fit.final_steps[1];
            if (p == 2) g.xi0[0] += sign * 10.0 * fit.final_steps[4];
            // gamma re-optimized implicitly by comparing against the fit's
            // gamma; wiggling the others must not win.
            CHECK(distance_at(g) >= d0 - 1e-12);
        }
    }

    // Pre-composition invariance of the orbit distance.
    const GroupElement h = random_element(rng);
    const ComplexField moved = apply_group(h, base);
    const FitResult fit2 = fit_to_ground_state(moved, q1());
    CHECK(std::abs(fit2.distance - fit.distance) < 1e-8);
}

TEST_CASE("sequential convergence experiment") {
    EvolutionConfig cfg;
    cfg.mu = -1;
    cfg.dt0 = 2e-4;
    cfg.t_end = 10.0;
    const std::vector<double> times{0.5, 1.0, 1.5, 2.0};

    SUBCASE("soliton data stays on the orbit") {
        const auto samples = sequential_convergence_experiment(q1().field, cfg, q1(), times);
        REQUIRE(samples.size() == times.size());
        for (const auto& s : samples) {
            CHECK(s.fit.distance < 1e-6);
            CHECK(s.running_infimum <= s.fit.distance + 1e-15);
        }
    }

    SUBCASE("boosted dilated soliton data stays on the orbit") {
        std::mt19937_64 rng(5);
        const GroupElement g = random_element(rng);
        const ComplexField u0 = apply_group(g, q1().field);
        const auto samples = sequential_convergence_experiment(u0, cfg, q1(), {0.4, 0.8});
        for (const auto& s : samples) CHECK(s.fit.distance < 1e-5);
    }

    SUBCASE("perturbed soliton at exact soliton mass: infimum bookkeeping") {
        ComplexField u0 = q1().field + Complex(1e-2, 0.0) * noise_field(grid_1d(), 7);
        u0 = Complex(std::sqrt(q1().mass / mass(u0)), 0.0) * u0;  // renormalize
        const auto samples = sequential_convergence_experiment(u0, cfg, q1(), {0.25, 0.5, 1.0});
        REQUIRE(!samples.empty());
        const double d0 = fit_to_ground_state(u0, q1()).distance;
        CHECK(samples.back().running_infimum <= d0 + 1e-6);
    }

    SUBCASE("mass gate") {
        CHECK_THROWS_AS(
            sequential_convergence_experiment(Complex(1.05, 0.0) * q1().field, cfg, q1(), times),
            ArgumentError);
        EvolutionConfig defoc = cfg;
        defoc.mu = 1;
        CHECK_THROWS_AS(sequential_convergence_experiment(q1().field, defoc, q1(), times),
                        ArgumentError);
    }
}

TEST_CASE("weak limit proxy distinguishes weak from strong convergence") {
    const Grid& g = grid_1d();

    SUBCASE("constant sequence at Q pairs to one") {
        const std::vector<ComplexField> seq{q1().field, q1().field};
        const auto pairings = weak_limit_proxy(seq, q1());
        for (const auto& p : pairings) {
            CHECK(std::abs(p.against_q - Complex(1.0, 0.0)) < 1e-7);
        }
    }

    SUBCASE("high-frequency ripple: pairing tends to 1, L2 distance does not") {
        // Q + ripple of fixed L2 size and increasing frequency.
        const double ripple_size = 0.3;
        std::vector<double> freq_fracs{0.3, 0.5, 0.7};
        double prev_gap = 1e9;
        for (double frac : freq_fracs) {
            const double k = frac * g.nyquist();
            ComplexField ripple = ComplexField::from_function(g, [&](const Vec3& x) {
                return Complex(std::exp(-0.5 * x[0] * x[0]), 0.0) * std::polar(1.0, k * x[0]);
            });
            ripple = Complex(ripple_size / lp_norm(ripple, 2.0), 0.0) * ripple;
            const ComplexField f = q1().field + ripple;
            // Pair directly (no fit: the ripple biases the moment estimates);
            // the proxy's point is the pairing itself.
            const Complex pairing = inner_product(f, q1().field) / q1().mass;
            const double gap = std::abs(pairing - Complex(1.0, 0.0));
            CHECK(gap < prev_gap);
            prev_gap = gap;
            CHECK(lp_norm(f - q1().field, 2.0) > 0.9 * ripple_size);
        }
        CHECK(prev_gap < 1e-4);
    }

    SUBCASE("slightly supercritical blowup snapshots: pairings logged only") {
        // Amplitude 1.05 puts the mass a few percent above the threshold;
        // snapshots along the focusing run are fitted and paired, with no
        // asserted limit.
        EvolutionConfig cfg;
        cfg.mu = -1;
        cfg.dt0 = 5e-4;
        cfg.t_end = 0.6;
        std::vector<ComplexField> seq;
        ComplexField u = Complex(1.05, 0.0) * q1().field;
        for (double t : {0.2, 0.4}) {
            u = evolve_to(u, t, cfg);
            seq.push_back(u);
        }
        const auto pairings = weak_limit_proxy(seq, q1());
        REQUIRE(pairings.size() == seq.size());
        for (const auto& p : pairings) {
            CHECK(std::isfinite(p.against_q.real()));
            CHECK(std::abs(p.against_q) < 2.0);
            for (const Complex& b : p.battery) CHECK(std::isfinite(b.real()));
        }
    }

    SUBCASE("battery is unit-normalized and deterministic") {
        const auto battery = weak_test_battery(g);
        REQUIRE(battery.size() == 16);
        for (const auto& b : battery) CHECK(lp_norm(b, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
        const auto battery2 = weak_test_battery(g);
        for (std::size_t i = 0; i < battery.size(); ++i)
            CHECK(lp_norm(battery[i] - battery2[i], 2.0) == 0.0);
    }
}
