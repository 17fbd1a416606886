#include "nls/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nls/errors.hpp"
#include "nls/spectral.hpp"

namespace nls {

namespace {

constexpr double kDtUnderflow = 1e-12;

// |u|^{4/d} = (|u|^2)^{2/d} with the small-d cases inlined.
inline double rotation_rate(double abs_sq, int d) {
    switch (d) {
        case 1: return abs_sq * abs_sq;
        case 2: return abs_sq;
        default: {
            const double c = std::cbrt(abs_sq);
            return c * c;
        }
    }
}

void nonlinear_half_rotation(ComplexField& f, double dt_half, int mu) {
    const int d = f.grid().dim();
    const double scale = -static_cast<double>(mu) * dt_half;
    for (Complex& z : f.samples()) {
        const double theta = scale * rotation_rate(std::norm(z), d);
        z *= std::polar(1.0, theta);
    }
}

Vec3 mass_centroid(const ComplexField& f) {
    const Grid& g = f.grid();
    Vec3 num = kZeroVec;
    double den = 0.0;
    for (std::size_t i = 0; i < f.samples().size(); ++i) {
        const double w = std::norm(f[i]);
        const Vec3 x = g.point(i);
        for (int a = 0; a < g.dim(); ++a) num[static_cast<std::size_t>(a)] += w * x[static_cast<std::size_t>(a)];
        den += w;
    }
    Vec3 c = kZeroVec;
    if (den > 0.0)
        for (int a = 0; a < g.dim(); ++a) c[static_cast<std::size_t>(a)] = num[static_cast<std::size_t>(a)] / den;
    return c;
}

DiagnosticRecord make_record(const ComplexField& u, int mu, const GroundState* q,
                             double spacetime_partial) {
    DiagnosticRecord rec;
    rec.t = u.time();
    const ConservedQuantities c = conserved_quantities(u, mu);
    rec.mass = c.mass;
    rec.energy = c.energy;
    rec.momentum = c.momentum;
    rec.grad_sq = c.grad_sq;
    rec.linf = lp_norm(u, std::numeric_limits<double>::infinity());
    const Vec3 centroid = mass_centroid(u);
    rec.variance = variance(u, centroid).value;
    rec.spacetime_norm_partial = spacetime_partial;
    if (q != nullptr) {
        const double mass_ratio = std::sqrt(rec.mass / q->mass);
        if (std::abs(mass_ratio - 1.0) <= 0.1) {
            const GroupElement g = track_modulation(u, *q);
            rec.lambda = g.lambda;
            rec.x_center = g.x0;
            rec.xi = g.xi0;
            rec.gamma = g.gamma0;
        }
    }
    return rec;
}

}  // namespace

void EvolutionConfig::validate() const {
    if (mu != 1 && mu != -1) throw ConfigError("evolution: mu must be +1 or -1");
    if (!(dt0 > 0.0)) throw ConfigError("evolution: dt0 must be positive");
    if (!(t_end > 0.0)) throw ConfigError("evolution: t_end must be positive");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
        throw ConfigError("evolution: cfl_safety must lie in (0, 1]");
    if (!(blowup_gradient_factor > 1.0))
        throw ConfigError("evolution: blowup_gradient_factor must exceed 1");
    if (record_stride < 1) throw ConfigError("evolution: record_stride must be >= 1");
    if (!(nonlinear_rate_constant > 0.0))
        throw ConfigError("evolution: nonlinear rate constant must be positive");
}

ComplexField strang_step(const ComplexField& f, double dt, int mu) {
    if (!(dt > 0.0)) throw ArgumentError("strang_step: dt must be positive");
    ComplexField u(f.grid(), f.samples(), f.time());
    nonlinear_half_rotation(u, 0.5 * dt, mu);

    auto& data = u.samples();
    spectral::fft(u.grid(), data, -1);
    const Grid& g = u.grid();
    const double scale = 1.0 / static_cast<double>(g.size());
    const int n = g.n();
    const int d = g.dim();
    const auto& k = g.wavenumbers();
    std::size_t idx = 0;
    const int n1 = d > 1 ? n : 1;
    const int n2 = d > 2 ? n : 1;
    for (int m2 = 0; m2 < n2; ++m2) {
        const double k2c = d > 2 ? k[static_cast<std::size_t>(m2)] * k[static_cast<std::size_t>(m2)] : 0.0;
        for (int m1 = 0; m1 < n1; ++m1) {
            const double k2b = k2c + (d > 1 ? k[static_cast<std::size_t>(m1)] * k[static_cast<std::size_t>(m1)] : 0.0);
            for (int m0 = 0; m0 < n; ++m0, ++idx) {
                const double k2 = k2b + k[static_cast<std::size_t>(m0)] * k[static_cast<std::size_t>(m0)];
                data[idx] *= std::polar(scale, -k2 * dt);
            }
        }
    }
    spectral::fft(u.grid(), data, +1);

    nonlinear_half_rotation(u, 0.5 * dt, mu);
    u.set_time(f.time() + dt);
    return u;
}

Trajectory run_evolution(const ComplexField& u0, const EvolutionConfig& cfg,
                         const GroundState* q) {
    cfg.validate();
    u0.check_finite();
    if (!(cfg.t_end > u0.time()))
        throw ConfigError("evolution: horizon must exceed the initial time");

    const int d = u0.grid().dim();
    Trajectory traj;
    ComplexField u = u0;
    const double grad0 = std::sqrt(spectral::gradient_norm_sq(u0));

    double spacetime_acc = 0.0;  // running integral of ||u||_{2+4/d}^{2+4/d}
    const double p = 2.0 + 4.0 / d;
    const double st_expo = d / (2.0 * (d + 2.0));
    double last_pnorm = std::pow(lp_norm(u, p), p);
    double last_record_t = u.time();

    auto record = [&](const ComplexField& snap) {
        if (!traj.times.empty()) {
            const double pnorm = std::pow(lp_norm(snap, p), p);
            spacetime_acc += 0.5 * (snap.time() - last_record_t) * (last_pnorm + pnorm);
            last_pnorm = pnorm;
        }
        last_record_t = snap.time();
        traj.times.push_back(snap.time());
        traj.snapshots.push_back(snap);
        traj.records.push_back(make_record(snap, cfg.mu, q, std::pow(spacetime_acc, st_expo)));
    };

    record(u);

    long step = 0;
    while (true) {
        const double linf = lp_norm(u, std::numeric_limits<double>::infinity());
        double dt = cfg.dt0;
        if (linf > 0.0)
            dt = std::min(dt, cfg.nonlinear_rate_constant / rotation_rate(linf * linf, d));
        dt *= cfg.cfl_safety;
        const bool final_step = u.time() + dt >= cfg.t_end;
        if (final_step) dt = cfg.t_end - u.time();
        if (dt < kDtUnderflow) {
            // A clamped final step below round-off means the horizon is hit.
            traj.termination =
                final_step ? Termination::horizon_reached : Termination::step_underflow;
            if (traj.times.back() != u.time()) record(u);
            break;
        }

        u = strang_step(u, dt, cfg.mu);
        ++step;

        const bool on_stride = step % cfg.record_stride == 0;
        if (on_stride || final_step) {
            u.check_finite();
            const double grad = std::sqrt(spectral::gradient_norm_sq(u));
            const bool gradient_blowup = grad > cfg.blowup_gradient_factor * grad0;
            const bool aliasing = spectral::top_octave_mass_fraction(u) > cfg.nyquist_guard_fraction;
            record(u);
            if (gradient_blowup || aliasing) {
                traj.termination = Termination::blowup_detected;
                break;
            }
        }
        if (final_step) {
            traj.termination = Termination::horizon_reached;
            break;
        }
    }
    return traj;
}

ComplexField evolve_to(const ComplexField& u0, double t_target, const EvolutionConfig& cfg) {
    cfg.validate();
    if (t_target < u0.time()) throw ArgumentError("evolve_to: target before initial time");
    const int d = u0.grid().dim();
    ComplexField u = u0;
    while (u.time() < t_target) {
        const double linf = lp_norm(u, std::numeric_limits<double>::infinity());
        double dt = cfg.dt0;
        if (linf > 0.0)
            dt = std::min(dt, cfg.nonlinear_rate_constant / rotation_rate(linf * linf, d));
        dt *= cfg.cfl_safety;
        dt = std::min(dt, t_target - u.time());
        if (dt < kDtUnderflow) {
            if (t_target - u.time() < 1e-10) break;  // target reached to round-off
            throw SolverError("evolve_to: step underflow", dt);
        }
        u = strang_step(u, dt, cfg.mu);
    }
    u.set_time(t_target);
    return u;
}

GroupElement track_modulation(const ComplexField& f, const GroundState& q) {
    const double mf = mass(f);
    if (std::abs(std::sqrt(mf / q.mass) - 1.0) > 0.1)
        throw ArgumentError("track_modulation: field mass not within 10% of the soliton mass");
    return modulation_estimate(f, q);
}

GroupElement modulation_estimate(const ComplexField& f, const GroundState& q) {
    const Grid& g = f.grid();
    const int d = g.dim();

    const ConservedQuantities c = conserved_quantities(f, -1);
    Vec3 xi_raw = kZeroVec;
    for (int a = 0; a < d; ++a)
        xi_raw[static_cast<std::size_t>(a)] = c.momentum[static_cast<std::size_t>(a)] / c.mass;

    // De-boost, then read scale and center from moments.
    ComplexField deboosted(g, f.time());
    for (std::size_t i = 0; i < f.samples().size(); ++i) {
        const Vec3 x = g.point(i);
        deboosted[i] = f[i] * std::polar(1.0, -dot(xi_raw, x, d));
    }
    const double grad_f = std::sqrt(spectral::gradient_norm_sq(deboosted));
    const double grad_q = std::sqrt(q.grad_sq);

    GroupElement out;
    out.lambda = grad_q / grad_f;
    out.x0 = mass_centroid(f);
    for (int a = 0; a < d; ++a)
        out.xi0[static_cast<std::size_t>(a)] = -xi_raw[static_cast<std::size_t>(a)] * out.lambda;
    out.gamma0 = 0.0;
    if (out.lambda >= kMinApplyScale && out.lambda <= kMaxApplyScale) {
        const ComplexField aligned = apply_group(out, f);
        out.gamma0 = -std::arg(inner_product(aligned, q.field));
    }
    return out;
}

BlowupReport estimate_blowup(const Trajectory& traj) {
    if (traj.termination != Termination::blowup_detected)
        throw ArgumentError("estimate_blowup: trajectory was not flagged blowup_detected");

    std::vector<double> t, lam;
    for (const DiagnosticRecord& r : traj.records)
        if (r.lambda.has_value()) {
            t.push_back(r.t);
            lam.push_back(*r.lambda);
        }
    if (t.size() < 20)
        throw ArgumentError("estimate_blowup: need at least 20 recorded lambda values");

    const double t_last = t.back();
    const double span = t_last - t.front();

    // Power-law fit: for fixed T, log lam = log c + alpha log(T - t) is linear.
    auto power_sse = [&](double T, double* alpha_out) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double x = std::log(T - t[i]);
            const double y = std::log(lam[i]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        const double denom = n * sxx - sx * sx;
        const double alpha = (n * sxy - sx * sy) / denom;
        const double b = (sy - alpha * sx) / n;
        double sse = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double r = std::log(lam[i]) - (b + alpha * std::log(T - t[i]));
            sse += r * r;
        }
        if (alpha_out) *alpha_out = alpha;
        return sse;
    };

    // Deterministic scan over candidate blowup times, then golden polish.
    double best_T = t_last + 1e-3 * span, best_sse = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 400; ++i) {
        const double offset = span * std::pow(10.0, -4.0 + 4.0 * i / 400.0);
        const double T = t_last + offset;
        const double sse = power_sse(T, nullptr);
        if (sse < best_sse) { best_sse = sse; best_T = T; }
    }
    {
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = best_T * (1.0 - 1e-3) + 1e-3 * t_last, b = best_T + 0.1 * (best_T - t_last);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = power_sse(x1, nullptr), f2 = power_sse(x2, nullptr);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) { b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = power_sse(x1, nullptr); }
            else { a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = power_sse(x2, nullptr); }
        }
        best_T = 0.5 * (a + b);
    }

    BlowupReport out;
    power_sse(best_T, &out.rate_exponent);
    out.t_estimate = best_T;

    // Log-log ansatz: lam ~ c sqrt((T-t)/ln|ln(T-t)|); c by least squares,
    // R^2 over the same sample set.
    double lam_mean = 0.0;
    for (double v : lam) lam_mean += v;
    lam_mean /= static_cast<double>(lam.size());
    auto loglog_model = [](double tau) -> double {
        // sqrt(tau / ln|ln tau|), meaningful once tau < 1/e.
        const double denom = std::log(std::abs(std::log(tau)));
        if (!(denom > 1e-12)) return -1.0;
        return std::sqrt(tau / denom);
    };
    auto loglog_r2 = [&](double T) {
        double num = 0, den = 0;
        std::vector<double> model(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double m = loglog_model(T - t[i]);
            if (m < 0.0) return -std::numeric_limits<double>::infinity();
            model[i] = m;
            num += lam[i] * m;
            den += m * m;
        }
        const double c = den > 0 ? num / den : 0.0;
        double ss_res = 0, ss_tot = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            ss_res += (lam[i] - c * model[i]) * (lam[i] - c * model[i]);
            ss_tot += (lam[i] - lam_mean) * (lam[i] - lam_mean);
        }
        return ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
    };
    out.loglog_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 400; ++i) {
        const double offset = span * std::pow(10.0, -4.0 + 4.0 * i / 400.0);
        const double score = loglog_r2(t_last + offset);
        if (score > out.loglog_score) out.loglog_score = score;
    }
    return out;
}

}  // namespace nls
