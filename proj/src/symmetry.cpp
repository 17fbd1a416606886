#include "nls/symmetry.hpp"

#include <cmath>
#include <string>

#include "nls/errors.hpp"
#include "nls/spectral.hpp"

namespace nls {

namespace {

void require_finite(const GroupElement& g) {
    bool ok = std::isfinite(g.lambda) && g.lambda > 0.0 && std::isfinite(g.gamma0);
    for (int a = 0; a < 3; ++a)
        ok = ok && std::isfinite(g.x0[static_cast<std::size_t>(a)]) &&
             std::isfinite(g.xi0[static_cast<std::size_t>(a)]);
    if (!ok) throw ArgumentError("group element: parameters must be finite with lambda > 0");
}

}  // namespace

GroupElement identity_element() { return GroupElement{}; }

GroupElement compose(const GroupElement& g2, const GroupElement& g1) {
    require_finite(g1);
    require_finite(g2);
    // Substitute the g1 action into the g2 action:
    //   lambda = l1 l2, x0 = l1 x02 + x01, xi = xi2 + l2 xi1,
    //   gamma = gamma2 + gamma1 + x02 . xi1.
    GroupElement out;
    out.lambda = g1.lambda * g2.lambda;
    for (std::size_t a = 0; a < 3; ++a) {
        out.x0[a] = g1.lambda * g2.x0[a] + g1.x0[a];
        out.xi0[a] = g2.xi0[a] + g2.lambda * g1.xi0[a];
    }
    out.gamma0 = g2.gamma0 + g1.gamma0 + dot(g2.x0, g1.xi0, 3);
    return out;
}

GroupElement inverse(const GroupElement& g) {
    require_finite(g);
    GroupElement out;
    out.lambda = 1.0 / g.lambda;
    for (std::size_t a = 0; a < 3; ++a) {
        out.x0[a] = -g.x0[a] / g.lambda;
        out.xi0[a] = -g.xi0[a] / g.lambda;
    }
    out.gamma0 = -g.gamma0 + dot(g.x0, g.xi0, 3) / g.lambda;
    return out;
}

ComplexField apply_group(const GroupElement& g, const ComplexField& f) {
    require_finite(g);
    if (g.lambda < kMinApplyScale || g.lambda > kMaxApplyScale)
        throw ArgumentError("apply_group: lambda " + std::to_string(g.lambda) +
                            " outside the per-application range [1/4, 4]; compose instead");
    const Grid& grid = f.grid();
    const int d = grid.dim();

    ComplexField out = spectral::resample_affine(f, g.lambda, g.x0);
    const double amp = std::pow(g.lambda, 0.5 * d);
    const Complex phase0 = std::polar(amp, g.gamma0);
    for (std::size_t i = 0; i < out.samples().size(); ++i) {
        const Vec3 x = grid.point(i);
        out[i] *= phase0 * std::polar(1.0, dot(x, g.xi0, d));
    }
    return out;
}

ComplexField galilean_boost(const ComplexField& f, const Vec3& xi0, double t) {
    const Grid& grid = f.grid();
    const int d = grid.dim();
    Vec3 shift = kZeroVec;
    for (int a = 0; a < d; ++a) shift[static_cast<std::size_t>(a)] = xi0[static_cast<std::size_t>(a)] * t;

    ComplexField out = spectral::translate(f, shift);
    const double xi_sq = norm2(xi0, d);
    const Complex time_phase = std::polar(1.0, -0.25 * xi_sq * t);
    for (std::size_t i = 0; i < out.samples().size(); ++i) {
        const Vec3 x = grid.point(i);
        out[i] *= time_phase * std::polar(1.0, 0.5 * dot(xi0, x, d));
    }
    out.set_time(t);
    return out;
}

ComplexField pseudoconformal(const ComplexField& f, double t) {
    if (t == 0.0) throw ArgumentError("pseudoconformal: t must be nonzero");
    const double inv_t = 1.0 / t;
    if (std::abs(inv_t) < kMinApplyScale || std::abs(inv_t) > kMaxApplyScale)
        throw ArgumentError("pseudoconformal: |1/t| outside the resampling budget");

    const Grid& grid = f.grid();
    const int d = grid.dim();

    ComplexField conj_f(grid, f.time());
    for (std::size_t i = 0; i < conj_f.samples().size(); ++i) conj_f[i] = std::conj(f[i]);

    ComplexField out = spectral::resample_affine(conj_f, inv_t, kZeroVec);
    const double amp = std::pow(std::abs(t), -0.5 * d);
    for (std::size_t i = 0; i < out.samples().size(); ++i) {
        const Vec3 x = grid.point(i);
        out[i] *= amp * std::polar(1.0, norm2(x, d) / (4.0 * t));
    }
    out.set_time(t);
    return out;
}

}  // namespace nls
