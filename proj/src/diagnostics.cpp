#include "nls/diagnostics.hpp"

#include <cmath>

#include "nls/errors.hpp"
#include "nls/evolve.hpp"
#include "nls/spectral.hpp"

namespace nls {

ConservedQuantities conserved_quantities(const ComplexField& f, int mu) {
    if (mu != 1 && mu != -1) throw ArgumentError("conserved_quantities: mu must be +1 or -1");
    const Grid& g = f.grid();
    const int d = g.dim();
    const int n = g.n();
    const int nyq = g.nyquist_index();
    const auto& k = g.wavenumbers();

    ConservedQuantities out;
    out.mass = mass(f);

    // One forward transform yields grad_sq and momentum by Parseval.
    const std::vector<Complex> c = spectral::coefficients(f);
    const double parseval = g.cell_volume() * static_cast<double>(g.size());
    std::vector<double> gterms(c.size());
    std::vector<double> pterms(c.size());
    for (int axis = 0; axis < 3; ++axis) out.momentum[static_cast<std::size_t>(axis)] = 0.0;

    std::size_t idx = 0;
    const int n1 = d > 1 ? n : 1;
    const int n2 = d > 2 ? n : 1;
    Vec3 mom = kZeroVec;
    for (int m2 = 0; m2 < n2; ++m2)
        for (int m1 = 0; m1 < n1; ++m1)
            for (int m0 = 0; m0 < n; ++m0, ++idx) {
                const double w = std::norm(c[idx]);
                double k2 = 0.0;
                // The Nyquist mode is dropped from odd/even derivative
                // bookkeeping the same way the gradient operator drops it.
                if (m0 != nyq) {
                    const double kk = k[static_cast<std::size_t>(m0)];
                    k2 += kk * kk;
                    mom[0] += kk * w;
                }
                if (d > 1 && m1 != nyq) {
                    const double kk = k[static_cast<std::size_t>(m1)];
                    k2 += kk * kk;
                    mom[1] += kk * w;
                }
                if (d > 2 && m2 != nyq) {
                    const double kk = k[static_cast<std::size_t>(m2)];
                    k2 += kk * kk;
                    mom[2] += kk * w;
                }
                gterms[idx] = k2 * w;
            }
    out.grad_sq = pairwise_sum(gterms) * parseval;
    for (int axis = 0; axis < d; ++axis)
        out.momentum[static_cast<std::size_t>(axis)] = mom[static_cast<std::size_t>(axis)] * parseval;

    const double p = 2.0 + 4.0 / d;
    std::vector<double> nlterms(f.samples().size());
    for (std::size_t i = 0; i < nlterms.size(); ++i)
        nlterms[i] = std::pow(std::abs(f[i]), p);
    out.potential_norm = pairwise_sum(nlterms) * g.cell_volume();

    out.energy = 0.5 * out.grad_sq + mu * (static_cast<double>(d) / (2.0 * d + 4.0)) * out.potential_norm;
    return out;
}

VarianceResult variance(const ComplexField& f, const Vec3& center) {
    const Grid& g = f.grid();
    const double half = 0.5 * g.half_width();
    std::vector<double> terms(f.samples().size());
    std::vector<double> tail(f.samples().size(), 0.0);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const Vec3 x = g.point(i);
        double r2 = 0.0;
        bool outside = false;
        for (int a = 0; a < g.dim(); ++a) {
            const double dx = x[static_cast<std::size_t>(a)] - center[static_cast<std::size_t>(a)];
            r2 += dx * dx;
            if (std::abs(x[static_cast<std::size_t>(a)]) > half) outside = true;
        }
        const double w = std::norm(f[i]);
        terms[i] = r2 * w;
        if (outside) tail[i] = w;
    }
    VarianceResult out;
    out.value = pairwise_sum(terms) * g.cell_volume();
    const double tail_mass = pairwise_sum(tail) * g.cell_volume();
    out.tail_warning = tail_mass > 1e-8 * mass(f);
    return out;
}

VirialReport virial_check(const Trajectory& traj) {
    const auto& rec = traj.records;
    if (rec.size() < 5) throw ArgumentError("virial_check: need at least 5 recorded variances");
    const double dt = rec[1].t - rec[0].t;
    for (std::size_t i = 1; i < rec.size(); ++i) {
        const double step = rec[i].t - rec[i - 1].t;
        if (std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw ArgumentError("virial_check: record times are not uniformly spaced");
    }
    const double target = 16.0 * rec.front().energy;
    VirialReport out;
    for (std::size_t i = 1; i + 1 < rec.size(); ++i) {
        const double second =
            (rec[i + 1].variance - 2.0 * rec[i].variance + rec[i - 1].variance) / (dt * dt);
        out.second_differences.push_back(second);
        const double abs_err = std::abs(second - target);
        out.max_abs_error = std::max(out.max_abs_error, abs_err);
        if (target != 0.0)
            out.max_rel_error = std::max(out.max_rel_error, abs_err / std::abs(target));
    }
    if (target == 0.0) out.max_rel_error = out.max_abs_error;
    return out;
}

GnReport gn_check(const ComplexField& f, double q_mass) {
    const double m = mass(f);
    if (!(m > 0.0)) throw ArgumentError("gn_check: zero field");
    const int d = f.grid().dim();
    GnReport out;
    const ConservedQuantities q = conserved_quantities(f, 1);
    out.lhs = q.potential_norm;
    out.rhs = (static_cast<double>(d) + 2.0) / d * std::pow(m / q_mass, 2.0 / d) * q.grad_sq;
    out.ratio = out.lhs / out.rhs;
    return out;
}

double scattering_norm_accumulate(const Trajectory& traj) {
    const auto& times = traj.times;
    if (times.empty()) return 0.0;
    if (times.size() == 1) return 0.0;
    const double dt = times[1] - times[0];
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs(times[i] - times[i - 1] - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw ArgumentError("scattering_norm_accumulate: non-uniform record stride");

    const int d = traj.snapshots.front().grid().dim();
    const double p = 2.0 + 4.0 / d;
    double acc = 0.0;
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        const double term = std::pow(lp_norm(traj.snapshots[i], p), p);
        const double w = (i == 0 || i + 1 == traj.snapshots.size()) ? 0.5 : 1.0;
        acc += w * dt * term;
    }
    return std::pow(acc, d / (2.0 * (d + 2.0)));
}

}  // namespace nls
