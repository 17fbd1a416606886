#include "nls/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nls/diagnostics.hpp"
#include "nls/errors.hpp"
#include "nls/spectral.hpp"

namespace nls {

namespace {

ComplexField power_nonlinearity(const ComplexField& f) {
    const double q = 4.0 / f.grid().dim();
    ComplexField out(f.grid(), f.time());
    for (std::size_t i = 0; i < out.samples().size(); ++i)
        out[i] = std::pow(std::abs(f[i]), q) * f[i];
    return out;
}

// Rolls the lattice so the peak sample sits at the box center, then fixes
// the global phase so the peak value is real positive.
void center_and_normalize_phase(ComplexField& f) {
    const Grid& g = f.grid();
    std::size_t peak = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < f.samples().size(); ++i) {
        const double a = std::abs(f[i]);
        if (a > best) { best = a; peak = i; }
    }
    int ix[3];
    g.unravel(peak, ix);
    const int c = g.n() / 2;
    int shift[3] = {c - ix[0], c - ix[1], c - ix[2]};
    bool any = false;
    for (int a = 0; a < g.dim(); ++a) any = any || shift[a] != 0;
    if (any) {
        std::vector<Complex> rolled(f.samples().size());
        const int n = g.n();
        for (std::size_t i = 0; i < rolled.size(); ++i) {
            int jx[3];
            g.unravel(i, jx);
            int sx[3];
            for (int a = 0; a < 3; ++a) sx[a] = ((jx[a] - shift[a]) % n + n) % n;
            rolled[i] = f[g.index(sx[0], sx[1], sx[2])];
        }
        f.samples() = std::move(rolled);
    }
    const Complex pv = f[g.index(c, g.dim() > 1 ? c : 0, g.dim() > 2 ? c : 0)];
    if (std::abs(pv) > 0.0) {
        const Complex phase = std::conj(pv) / std::abs(pv);
        for (Complex& z : f.samples()) z *= phase;
    }
}

GroundState certify(ComplexField field, std::vector<double> history) {
    GroundState q{std::move(field), 0.0, 0.0, 0.0, 0.0, {}};
    q.residual = elliptic_residual(q.field);
    q.mass = mass(q.field);
    const ConservedQuantities c = conserved_quantities(q.field, -1);
    q.grad_sq = c.grad_sq;
    q.energy = c.energy;
    q.residual_history = std::move(history);
    return q;
}

}  // namespace

double elliptic_residual(const ComplexField& f) {
    const ComplexField lap = spectral::laplacian(f);
    const ComplexField nl = power_nonlinearity(f);
    std::vector<Complex> r(f.samples().size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = lap[i] - f[i] + nl[i];
    return lp_norm(ComplexField(f.grid(), std::move(r)), 2.0) / lp_norm(f, 2.0);
}

GroundState ground_state_1d_closed_form(const Grid& grid) {
    if (grid.dim() != 1)
        throw ArgumentError("ground_state_1d_closed_form: grid dimension must be 1");
    const double amp = std::pow(3.0, 0.25);
    const double period = 2.0 * grid.half_width();
    // Sum the periodic images: the raw restriction has a derivative kink at
    // the wrap (the profile decays like e^{-|x|}), which would dominate the
    // spectral residual.
    ComplexField f = ComplexField::from_function(grid, [&](const Vec3& x) {
        double s = 0.0;
        for (int j = -2; j <= 2; ++j) s += amp / std::sqrt(std::cosh(2.0 * (x[0] + period * j)));
        return Complex(s, 0.0);
    });
    return certify(std::move(f), {});
}

GroundState solve_ground_state(const Grid& grid, double tol, const ComplexField* seed) {
    if (!(tol > 0.0 && tol <= 1e-4))
        throw ArgumentError("solve_ground_state: tol must lie in (0, 1e-4]");

    const int d = grid.dim();
    const double p = 1.0 + 4.0 / d;
    const double gamma = p / (p - 1.0);
    constexpr int kMaxIterations = 800;

    ComplexField q = seed != nullptr
                         ? *seed
                         : ComplexField::from_function(grid, [d](const Vec3& x) {
                               return Complex(std::exp(-0.5 * norm2(x, d)), 0.0);
                           });
    if (seed != nullptr && !(q.grid() == grid))
        throw ArgumentError("solve_ground_state: seed grid mismatch");

    std::vector<double> history;
    double last_residual = 1.0;
    for (int it = 0; it < kMaxIterations; ++it) {
        const ComplexField nl = power_nonlinearity(q);
        const double m_num = mass(q) + spectral::gradient_norm_sq(q);  // <(1-Delta)Q, Q>
        const double m_den = inner_product(nl, q).real();              // <|Q|^{4/d}Q, Q>
        if (!(m_den > 0.0))
            throw SolverError("solve_ground_state: degenerate iterate", last_residual);
        const double m = m_num / m_den;

        ComplexField next = spectral::helmholtz_inverse(nl);
        const double factor = std::pow(m, gamma);
        for (Complex& z : next.samples()) z = Complex(factor * z.real(), 0.0);

        const double change = lp_norm(next - q, 2.0) / lp_norm(q, 2.0);
        q = std::move(next);
        last_residual = elliptic_residual(q);
        history.push_back(last_residual);
        if (change < tol && last_residual < tol) {
            center_and_normalize_phase(q);
            return certify(std::move(q), std::move(history));
        }
    }
    throw SolverError("solve_ground_state: no convergence within " +
                          std::to_string(kMaxIterations) + " iterations",
                      last_residual);
}

PohozaevReport pohozaev_report(const GroundState& q) {
    PohozaevReport out;
    out.grad_ratio = q.grad_sq / q.mass;
    out.energy = q.energy;
    return out;
}

}  // namespace nls
