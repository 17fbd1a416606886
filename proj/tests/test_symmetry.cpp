#include <doctest.h>

#include <cmath>
#include <random>

#include "nls/diagnostics.hpp"
#include "nls/errors.hpp"
#include "nls/ground_state.hpp"
#include "nls/symmetry.hpp"

using namespace nls;

namespace {

double param_distance(const GroupElement& a, const GroupElement& b) {
    double m = std::abs(a.lambda - b.lambda);
    m = std::max(m, std::abs(a.gamma0 - b.gamma0));
    for (std::size_t i = 0; i < 3; ++i) {
        m = std::max(m, std::abs(a.x0[i] - b.x0[i]));
        m = std::max(m, std::abs(a.xi0[i] - b.xi0[i]));
    }
    return m;
}

GroupElement random_element(std::mt19937_64& rng, int d) {
    auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
    };
    // Ranges chosen so even composed pairs keep width-1 data inside the
    // containment budget of the test boxes.
    GroupElement g;
    g.lambda = uniform(0.85, 1.15);
    g.gamma0 = uniform(-3.0, 3.0);
    for (int a = 0; a < d; ++a) {
        g.x0[static_cast<std::size_t>(a)] = uniform(-0.8, 0.8);
        g.xi0[static_cast<std::size_t>(a)] = uniform(-0.8, 0.8);
    }
    return g;
}

ComplexField gaussian_2d(const Grid& g) {
    return ComplexField::from_function(g, [](const Vec3& x) {
        return Complex(std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])), 0.0) *
               std::polar(1.0, 0.4 * x[0] - 0.2 * x[1]);
    });
}

}  // namespace

TEST_CASE("compose and inverse parameter identities") {
    std::mt19937_64 rng(2024);
    GroupElement two;
    two.lambda = 2.0;
    const GroupElement half = inverse(two);
    CHECK(half.lambda == doctest::Approx(0.5));
    CHECK(param_distance(half, GroupElement{0.5, kZeroVec, kZeroVec, 0.0}) < 1e-15);

    for (int trial = 0; trial < 50; ++trial) {
        const GroupElement g = random_element(rng, 3);
        CHECK(param_distance(compose(identity_element(), g), g) < 1e-14);
        CHECK(param_distance(compose(g, identity_element()), g) < 1e-14);
        CHECK(param_distance(compose(g, inverse(g)), identity_element()) < 1e-12);
        CHECK(param_distance(compose(inverse(g), g), identity_element()) < 1e-12);

        const GroupElement h = random_element(rng, 3);
        const GroupElement k = random_element(rng, 3);
        // Associativity.
        CHECK(param_distance(compose(compose(g, h), k), compose(g, compose(h, k))) < 1e-12);
    }
}

TEST_CASE("apply_group: identity, isometry, composition law") {
    const Grid grid = make_grid(2, 128, 12.0);
    const ComplexField f = gaussian_2d(grid);

    const ComplexField same = apply_group(identity_element(), f);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        max_diff = std::max(max_diff, std::abs(same[i] - f[i]));
    CHECK(max_diff < 1e-12);

    std::mt19937_64 rng(7);
    const double mf = mass(f);
    for (int trial = 0; trial < 5; ++trial) {
        const GroupElement g1 = random_element(rng, 2);
        const GroupElement g2 = random_element(rng, 2);

        const ComplexField gf = apply_group(g1, f);
        CHECK(std::abs(mass(gf) - mf) < 1e-8 * mf);

        const ComplexField ab = apply_group(g2, apply_group(g1, f));
        const ComplexField composed = apply_group(compose(g2, g1), f);
        CHECK(lp_norm(ab - composed, 2.0) < 1e-8 * std::sqrt(mf));
    }

    GroupElement bad;
    bad.lambda = 8.0;
    CHECK_THROWS_AS(apply_group(bad, f), ArgumentError);

    std::mt19937_64 rng_roundtrip(99);
    for (int trial = 0; trial < 3; ++trial) {
        const GroupElement g = random_element(rng_roundtrip, 2);
        const ComplexField back = apply_group(compose(g, inverse(g)), f);
        CHECK(lp_norm(back - f, 2.0) < 1e-8 * std::sqrt(mf));
    }
}

TEST_CASE("galilean boost momentum shift and mass invariance") {
    const Grid grid = make_grid(2, 64, 10.0);
    const ComplexField u = ComplexField::from_function(grid, [](const Vec3& x) {
        return Complex(std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])), 0.0);
    });

    const ComplexField same = galilean_boost(u, kZeroVec, 0.0);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        max_diff = std::max(max_diff, std::abs(same[i] - u[i]));
    CHECK(max_diff < 1e-12);

    const Vec3 xi{1.0, 0.0, 0.0};
    const ComplexField v = galilean_boost(u, xi, 0.0);
    const ConservedQuantities cu = conserved_quantities(u, 1);
    const ConservedQuantities cv = conserved_quantities(v, 1);
    CHECK(std::abs(cu.momentum[0]) < 1e-12);
    CHECK(std::abs(cv.momentum[0] - 0.5 * cu.mass) < 1e-10);
    CHECK(std::abs(cv.momentum[1]) < 1e-10);
    CHECK(std::abs(cv.mass - cu.mass) < 1e-12 * cu.mass);
}

TEST_CASE("boost convention translates to the group element with xi/2") {
    const Grid grid = make_grid(1, 128, 10.0);
    const ComplexField f = ComplexField::from_function(grid, [](const Vec3& x) {
        return Complex(std::exp(-0.5 * x[0] * x[0]), 0.2 * std::exp(-x[0] * x[0]));
    });
    const Vec3 xi{0.8, 0, 0};
    const ComplexField boosted = galilean_boost(f, xi, 0.0);
    GroupElement g;
    g.xi0 = Vec3{0.4, 0, 0};  // half the boost frequency
    const ComplexField via_group = apply_group(g, f);
    CHECK(lp_norm(boosted - via_group, 2.0) < 1e-12);
}

TEST_CASE("pseudoconformal transform") {
    const Grid grid = make_grid(1, 512, 12.0);

    SUBCASE("mass isometry on a contained Gaussian") {
        const ComplexField u = ComplexField::from_function(grid, [](const Vec3& x) {
            return Complex(std::exp(-0.5 * x[0] * x[0]), 0.0);
        });
        const ComplexField v = pseudoconformal(u, 2.0);
        CHECK(std::abs(mass(v) - mass(u)) < 1e-8 * mass(u));
        CHECK_THROWS_AS(pseudoconformal(u, 0.0), ArgumentError);
        CHECK_THROWS_AS(pseudoconformal(u, 8.0), ArgumentError);
    }

    SUBCASE("peak height scales as |t|^{-d/2} Q(0)") {
        const GroundState q = ground_state_1d_closed_form(grid);
        const double t = 0.8;
        // snapshot of e^{is} Q at s = 1/t
        const ComplexField u = std::polar(1.0, 1.0 / t) * q.field;
        const ComplexField v = pseudoconformal(u, t);
        const double peak = std::abs(v[grid.index(grid.n() / 2)]);
        const double expected = std::pow(t, -0.5) * std::pow(3.0, 0.25);
        CHECK(std::abs(peak - expected) < 1e-6);
    }

    SUBCASE("double application is the identity map") {
        // |t| near 1 keeps both resampling windows inside the box; far from
        // 1, the lambda = 1/t evaluation window wraps periodic images in.
        const ComplexField u = ComplexField::from_function(grid, [](const Vec3& x) {
            return Complex(std::exp(-0.5 * x[0] * x[0]), 0.1 * std::exp(-x[0] * x[0]));
        });
        const double t = 1.25;
        const ComplexField v = pseudoconformal(u, t);
        const ComplexField w = pseudoconformal(v, 1.0 / t);
        CHECK(lp_norm(w - u, 2.0) < 1e-6 * lp_norm(u, 2.0));
    }
}
