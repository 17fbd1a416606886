#include "nls/presets.hpp"

#include <cmath>
#include <random>

#include "nls/errors.hpp"
#include "nls/snapshot.hpp"
#include "nls/spectral.hpp"
#include "nls/symmetry.hpp"

namespace nls {

bool preset_needs_ground_state(const std::string& preset) {
    return preset == "soliton" || preset == "boosted_soliton" ||
           preset == "perturbed_soliton" || preset == "scaled_soliton";
}

ComplexField seeded_noise(const Grid& grid, unsigned long seed) {
    std::mt19937_64 rng(seed);
    // Box-Muller on raw 53-bit uniforms keeps the stream platform-exact
    // (std::normal_distribution is implementation-defined).
    auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
    auto gauss = [&]() {
        const double u1 = std::max(uniform(), 1e-300), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    };
    std::vector<Complex> modes(grid.size(), Complex(0, 0));
    const double kcut = 0.2 * grid.nyquist();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Vec3 k = grid.wavevector(i);
        double kinf = 0.0;
        for (int a = 0; a < grid.dim(); ++a) kinf = std::max(kinf, std::abs(k[a]));
        if (kinf <= kcut)
            modes[i] = Complex(gauss(), gauss()) * std::exp(-0.5 * norm2(k, grid.dim()));
    }
    spectral::fft(grid, modes, +1);
    ComplexField f(grid, std::move(modes));
    for (std::size_t i = 0; i < grid.size(); ++i)
        f[i] *= std::exp(-norm2(grid.point(i), grid.dim()) / 8.0);
    return Complex(1.0 / lp_norm(f, 2.0), 0.0) * f;
}

ComplexField make_initial_field(const RunConfig& cfg, const GroundState* q) {
    const Grid grid = cfg.build_grid();
    const int d = grid.dim();

    if (cfg.preset.rfind("file:", 0) == 0) {
        Snapshot snap = read_snapshot(cfg.preset.substr(5));
        if (!(snap.field.grid() == grid))
            throw ConfigError("preset: snapshot grid does not match the configured grid");
        return snap.field;
    }

    if (cfg.preset == "gaussian") {
        const double a = cfg.preset_amplitude, w = cfg.preset_width;
        ComplexField f = ComplexField::from_function(grid, [&](const Vec3& x) {
            return Complex(a * std::exp(-0.5 * norm2(x, d) / (w * w)), 0.0);
        });
        if (norm2(cfg.preset_boost, d) > 0.0) f = galilean_boost(f, cfg.preset_boost, 0.0);
        f.set_time(0.0);
        return f;
    }

    GroundState solved{ComplexField(grid), 0, 0, 0, 0, {}};
    if (q == nullptr) {
        solved = solve_ground_state(grid, cfg.ground_state_tol());
        q = &solved;
    }
    if (!(q->field.grid() == grid))
        throw ConfigError("preset: ground state grid does not match the configured grid");

    if (cfg.preset == "soliton") {
        return cfg.preset_amplitude == 1.0 ? q->field
                                           : Complex(cfg.preset_amplitude, 0.0) * q->field;
    }
    if (cfg.preset == "boosted_soliton") {
        ComplexField f = galilean_boost(q->field, cfg.preset_boost, 0.0);
        f.set_time(0.0);
        return f;
    }
    if (cfg.preset == "scaled_soliton") {
        GroupElement g;
        g.lambda = cfg.preset_scale;
        ComplexField f = apply_group(g, q->field);
        f.set_time(0.0);
        return f;
    }
    if (cfg.preset == "perturbed_soliton") {
        const ComplexField noise = seeded_noise(grid, static_cast<unsigned long>(cfg.preset_seed));
        ComplexField f = q->field + Complex(cfg.preset_size, 0.0) * noise;
        // Renormalized to the soliton mass: the convergence experiments
        // require it exactly.
        f = Complex(std::sqrt(q->mass / mass(f)), 0.0) * f;
        f.set_time(0.0);
        return f;
    }
    throw ConfigError("preset: unknown preset '" + cfg.preset + "'");
}

}  // namespace nls
