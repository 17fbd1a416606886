#pragma once

// Independent numerical oracles used only by tests. These must not share
// code paths with the library implementations they check.

#include <cstddef>
#include <vector>

namespace oracles {

struct RadialGroundState {
    double peak = 0.0;  // Q(0)
    double mass = 0.0;  // ||Q||_{L^2(R^d)}^2 from the radial quadrature
};

// Shooting solve of Q'' + (d-1)Q'/r - Q + Q^{1+4/d} = 0, Q'(0) = 0:
// adaptive Runge-Kutta on [0, r_max], bisection on Q(0) until the solution
// decays below 1e-8 without a sign change.
RadialGroundState shoot_ground_state(int d, double r_max);

}  // namespace oracles
