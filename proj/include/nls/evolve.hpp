#pragma once

#include <span>
#include <vector>

#include "nls/diagnostics.hpp"
#include "nls/field.hpp"
#include "nls/ground_state.hpp"
#include "nls/symmetry.hpp"

namespace nls {

struct EvolutionConfig {
    int mu = 1;                            // +1 defocusing, -1 focusing
    double dt0 = 1e-3;                     // initial / maximum step
    double t_end = 1.0;                    // absolute horizon
    double cfl_safety = 1.0;               // in (0, 1]
    double blowup_gradient_factor = 20.0;  // > 1
    int record_stride = 10;                // steps between diagnostics
    double nonlinear_rate_constant = 0.1;  // c in dt <= c / ||u||_inf^{4/d}
    double nyquist_guard_fraction = 0.1;   // top-octave mass fraction abort

    void validate() const;
};

enum class Termination { horizon_reached, blowup_detected, step_underflow };

struct Trajectory {
    std::vector<double> times;            // recorded times, strictly increasing
    std::vector<ComplexField> snapshots;  // one per recorded time
    std::vector<DiagnosticRecord> records;
    Termination termination = Termination::horizon_reached;
};

// One Strang split step: exact half nonlinear phase rotation, full kinetic
// Fourier multiplier e^{-i|k|^2 dt}, half nonlinear rotation. Mass is
// conserved to round-off.
ComplexField strang_step(const ComplexField& f, double dt, int mu);

// Steps from u0.time() to cfg.t_end with dt = cfl * min(dt0, c/||u||_inf^{4/d}),
// recording every record_stride steps. Modulation parameters are tracked
// when a GroundState is supplied and the mass is within 10% of the soliton's.
Trajectory run_evolution(const ComplexField& u0, const EvolutionConfig& cfg,
                         const GroundState* q = nullptr);

// Advances a field to exactly t_target under the same stepping rule,
// without recording.
ComplexField evolve_to(const ComplexField& u0, double t_target, const EvolutionConfig& cfg);

// Moment-based estimate of the group element aligning f with Q:
// xi from momentum/mass, x0 from the mass centroid, lambda from gradient
// norms of the de-boosted field, gamma from the inner product with Q.
// track_modulation additionally requires the mass within 10% of the
// soliton's; modulation_estimate is the ungated version the fitter seeds
// from.
GroupElement track_modulation(const ComplexField& f, const GroundState& q);
GroupElement modulation_estimate(const ComplexField& f, const GroundState& q);

struct BlowupReport {
    double t_estimate = 0.0;     // fitted blowup time
    double rate_exponent = 0.0;  // alpha in lambda ~ c (T - t)^alpha
    double loglog_score = 0.0;   // R^2 of the log-log ansatz fit
};

// Least-squares fits of the tracked lambda(t) against c (T-t)^alpha and the
// log-log ansatz sqrt((T-t)/ln|ln(T-t)|). Diagnostic only.
BlowupReport estimate_blowup(const Trajectory& traj);

}  // namespace nls
