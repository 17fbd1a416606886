#pragma once

#include <optional>
#include <vector>

#include "nls/field.hpp"

namespace nls {

struct Trajectory;

// Per-time diagnostics row. Optional entries stay empty when the producing
// run did not track them; the CSV writer emits empty cells for those.
struct DiagnosticRecord {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    Vec3 momentum = kZeroVec;
    double variance = 0.0;
    double grad_sq = 0.0;
    double linf = 0.0;
    std::optional<double> lambda;
    std::optional<Vec3> x_center;
    std::optional<Vec3> xi;
    std::optional<double> gamma;
    double spacetime_norm_partial = 0.0;
    std::optional<double> morawetz_value;
    std::optional<double> fit_distance;
};

struct ConservedQuantities {
    double mass = 0.0;
    double energy = 0.0;
    Vec3 momentum = kZeroVec;
    double grad_sq = 0.0;          // ||grad u||_2^2
    double potential_norm = 0.0;   // ||u||_{2+4/d}^{2+4/d}
};

// mass = ||f||_2^2, energy = 1/2 ||grad f||^2 + mu d/(2d+4) ||f||_{2+4/d}^{2+4/d},
// momentum = Im int grad(f) conj(f).
ConservedQuantities conserved_quantities(const ComplexField& f, int mu);

struct VarianceResult {
    double value = 0.0;
    bool tail_warning = false;  // mass outside the central half-box > 1e-8 of total
};

// int |x - center|^2 |f|^2 by lattice quadrature.
VarianceResult variance(const ComplexField& f, const Vec3& center);

struct VirialReport {
    double max_rel_error = 0.0;   // vs 16 E(u0)
    double max_abs_error = 0.0;
    std::vector<double> second_differences;  // one per interior record
};

// Central second difference of the recorded variance against 16 E(u0).
VirialReport virial_check(const Trajectory& traj);

struct GnReport {
    double lhs = 0.0;    // ||f||_{2+4/d}^{2+4/d}
    double rhs = 0.0;    // ((d+2)/d) (||f||_2/||Q||_2)^{4/d} ||grad f||_2^2
    double ratio = 0.0;
};

// Sharp Gagliardo-Nirenberg check; q_mass is ||Q||_2^2.
GnReport gn_check(const ComplexField& f, double q_mass);

// (sum_t dt ||u(t)||_{2+4/d}^{2+4/d})^{d/(2(d+2))} over the recorded snapshots,
// trapezoidal in time.
double scattering_norm_accumulate(const Trajectory& traj);

}  // namespace nls
