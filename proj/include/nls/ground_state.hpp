#pragma once

#include <vector>

#include "nls/field.hpp"

namespace nls {

// Ground state of Delta Q + |Q|^{4/d} Q = Q with certification data.
struct GroundState {
    ComplexField field;
    double residual = 0.0;   // relative L2 residual of the elliptic equation
    double mass = 0.0;       // ||Q||_2^2
    double grad_sq = 0.0;    // ||grad Q||_2^2
    double energy = 0.0;     // E(Q), mu = -1
    std::vector<double> residual_history;  // per Petviashvili iteration
};

// Q(x) = 3^{1/4} sech^{1/2}(2x), d = 1 only.
GroundState ground_state_1d_closed_form(const Grid& grid);

// Petviashvili fixed point Q <- M^gamma (1-Delta)^{-1}(|Q|^{4/d} Q) with
// M = <(1-Delta)Q, Q> / <|Q|^{4/d}Q, Q> and gamma = p/(p-1), p = 1 + 4/d.
// Output is real, positive at the peak, peak at the box center. The default
// seed is a centered Gaussian of width 1.
GroundState solve_ground_state(const Grid& grid, double tol,
                               const ComplexField* seed = nullptr);

struct PohozaevReport {
    double grad_ratio = 0.0;  // ||grad Q||^2 / ||Q||^2, contract: d/2
    double energy = 0.0;      // E(Q) with mu = -1, contract: 0
};

PohozaevReport pohozaev_report(const GroundState& q);

// Relative L2 residual ||Delta f - f + |f|^{4/d} f|| / ||f||.
double elliptic_residual(const ComplexField& f);

}  // namespace nls
