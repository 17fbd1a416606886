#include <doctest.h>

#include <cmath>
#include <random>

#include "nls/errors.hpp"
#include "nls/evolve.hpp"
#include "nls/spectral.hpp"

using namespace nls;

namespace {

const Grid& grid_1d() {
    static const Grid g = make_grid(1, 512, 12.0);
    return g;
}

const GroundState& q1() {
    static const GroundState q = solve_ground_state(grid_1d(), 1e-10);
    return q;
}

ComplexField random_bandlimited(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
    auto gauss = [&]() {
        const double u1 = std::max(uniform(), 1e-300), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    };
    std::vector<Complex> modes(g.size(), Complex(0, 0));
    const double kcut = 0.25 * g.nyquist();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec3 k = g.wavevector(i);
        double kinf = 0.0;
        for (int a = 0; a < g.dim(); ++a) kinf = std::max(kinf, std::abs(k[a]));
        // Gaussian spectral envelope keeps the field smooth and contained.
        if (kinf <= kcut)
            modes[i] = Complex(gauss(), gauss()) * std::exp(-2.0 * norm2(k, g.dim()));
    }
    spectral::fft(g, modes, +1);
    return ComplexField(g, std::move(modes));
}

}  // namespace

TEST_CASE("conserved_quantities closed forms") {
    const GroundState& q = q1();

    // E(Q) = 0 for mu = -1 (Pohozaev).
    const ConservedQuantities cq = conserved_quantities(q.field, -1);
    CHECK(std::abs(cq.energy) < 1e-6 * cq.grad_sq);

    // Real fields carry no momentum.
    CHECK(std::abs(cq.momentum[0]) < 1e-14);

    // Plane-wave modulation shifts momentum by k0 * mass.
    const double k0 = 3.0 * M_PI / grid_1d().half_width();
    ComplexField f(grid_1d());
    for (std::size_t i = 0; i < f.samples().size(); ++i)
        f[i] = q.field[i] * std::polar(1.0, k0 * grid_1d().point(i)[0]);
    const ConservedQuantities cf = conserved_quantities(f, -1);
    CHECK(cf.momentum[0] == doctest::Approx(k0 * cq.mass).epsilon(1e-10));

    CHECK_THROWS_AS(conserved_quantities(f, 0), ArgumentError);
}

TEST_CASE("variance: Gaussian moments, parallel axis, dense-grid oracle") {
    const Grid& g = grid_1d();
    const ComplexField gauss = ComplexField::from_function(g, [](const Vec3& x) {
        return Complex(std::exp(-0.5 * x[0] * x[0]), 0.0);
    });
    const VarianceResult v = variance(gauss, kZeroVec);
    CHECK(v.value / mass(gauss) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK_FALSE(v.tail_warning);

    // Parallel-axis identity about a shifted center (centroid at 0).
    const Vec3 shifted{1.5, 0, 0};
    const VarianceResult vs = variance(gauss, shifted);
    CHECK(vs.value == doctest::Approx(v.value + 1.5 * 1.5 * mass(gauss)).epsilon(1e-10));

    // Q variance against a 4x finer grid oracle.
    const Grid fine = make_grid(1, 2048, 12.0);
    const GroundState qf = ground_state_1d_closed_form(fine);
    const GroundState qc = ground_state_1d_closed_form(g);
    const double vq = variance(qc.field, kZeroVec).value;
    const double vq_fine = variance(qf.field, kZeroVec).value;
    CHECK(std::abs(vq - vq_fine) < 1e-6 * vq_fine);

    // A field pushed against the box edge trips the tail warning.
    const ComplexField edge = ComplexField::from_function(g, [&](const Vec3& x) {
        return Complex(std::exp(-0.5 * (x[0] - 9.0) * (x[0] - 9.0)), 0.0);
    });
    CHECK(variance(edge, kZeroVec).tail_warning);
}

TEST_CASE("virial identity on evolved trajectories") {
    EvolutionConfig cfg;
    cfg.dt0 = 2.5e-4;
    cfg.t_end = 0.2;
    cfg.record_stride = 80;  // records every 0.02

    const ComplexField gauss = ComplexField::from_function(grid_1d(), [](const Vec3& x) {
        return Complex(std::exp(-0.5 * x[0] * x[0]), 0.0);
    });

    SUBCASE("focusing Gaussian matches 16 E within 1%") {
        cfg.mu = -1;
        const Trajectory traj = run_evolution(gauss, cfg);
        REQUIRE(traj.records.size() >= 5);
        const VirialReport rep = virial_check(traj);
        CHECK(rep.max_rel_error < 0.01);
    }

    SUBCASE("zero-energy soliton data gives vanishing second difference") {
        cfg.mu = -1;
        const Trajectory traj = run_evolution(q1().field, cfg);
        const VirialReport rep = virial_check(traj);
        CHECK(rep.max_abs_error < 1e-4 * q1().grad_sq);
    }

    SUBCASE("defocusing second differences are positive") {
        cfg.mu = 1;
        const Trajectory traj = run_evolution(gauss, cfg);
        const VirialReport rep = virial_check(traj);
        for (double s : rep.second_differences) CHECK(s > 0.0);
    }

    SUBCASE("too few records is an error") {
        cfg.mu = 1;
        cfg.record_stride = 400;
        const Trajectory traj = run_evolution(gauss, cfg);
        CHECK_THROWS_AS(virial_check(traj), ArgumentError);
    }
}

TEST_CASE("gn_check: extremizer, strict inequality, scale invariance, battery") {
    const GroundState& q = q1();
    CHECK(std::abs(gn_check(q.field, q.mass).ratio - 1.0) < 1e-5);

    const ComplexField gauss = ComplexField::from_function(grid_1d(), [](const Vec3& x) {
        return Complex(std::exp(-0.5 * x[0] * x[0]), 0.0);
    });
    CHECK(gn_check(gauss, q.mass).ratio < 1.0);

    for (unsigned seed = 0; seed < 20; ++seed) {
        const ComplexField f = random_bandlimited(grid_1d(), 1000 + seed);
        CHECK(gn_check(f, q.mass).ratio <= 1.0 + 1e-5);
    }

    CHECK_THROWS_AS(gn_check(ComplexField(grid_1d()), q.mass), ArgumentError);
}

TEST_CASE("scattering norm accumulation") {
    EvolutionConfig cfg;
    cfg.mu = -1;
    cfg.dt0 = 1e-3;
    cfg.t_end = 2.0;
    cfg.record_stride = 50;

    SUBCASE("zero field accumulates zero") {
        Trajectory traj;
        traj.times = {0.0};
        traj.snapshots.emplace_back(grid_1d());
        CHECK(scattering_norm_accumulate(traj) == 0.0);
    }

    SUBCASE("soliton grows like T^{1/6} in d = 1") {
        const Trajectory traj = run_evolution(q1().field, cfg);
        const double s = scattering_norm_accumulate(traj);
        const double expected = std::pow(2.0, 1.0 / 6.0) * lp_norm(q1().field, 6.0);
        CHECK(s == doctest::Approx(expected).epsilon(1e-4));
    }

    SUBCASE("small defocusing data: increments decay with the horizon") {
        cfg.mu = 1;
        cfg.t_end = 4.0;
        const ComplexField small = ComplexField::from_function(grid_1d(), [](const Vec3& x) {
            return Complex(0.3 * std::exp(-0.5 * x[0] * x[0]), 0.0);
        });
        const Trajectory traj = run_evolution(small, cfg);
        // The running accumulation is monotone nondecreasing in the horizon.
        for (std::size_t i = 1; i < traj.records.size(); ++i)
            CHECK(traj.records[i].spacetime_norm_partial >=
                  traj.records[i - 1].spacetime_norm_partial);
        // spacetime_norm_partial is the running accumulation at each record.
        auto partial_at = [&](double t) {
            double v = 0.0;
            for (const auto& r : traj.records)
                if (r.t <= t + 1e-9) v = r.spacetime_norm_partial;
            const int d = grid_1d().dim();
            return std::pow(v, 2.0 * (d + 2.0) / d);  // undo the outer exponent
        };
        const double inc_early = partial_at(2.0) - partial_at(1.0);
        const double inc_late = partial_at(4.0) - partial_at(3.0);
        CHECK(inc_late < 0.5 * inc_early);
    }
}
