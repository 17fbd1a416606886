#include "oracles.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracles {

namespace {

// State: (Q, Q', mass integral). The mass component integrates
// surface(d) * Q^2 r^{d-1} alongside the profile.
using State = std::array<double, 3>;

double surface_measure(int d) {
    switch (d) {
        case 1: return 2.0;
        case 2: return 2.0 * M_PI;
        default: return 4.0 * M_PI;
    }
}

State derivative(int d, double p, double r, const State& s) {
    const double q = s[0], dq = s[1];
    const double nl = q > 0.0 ? std::pow(q, p) : -std::pow(-q, p);
    return {dq, -(d - 1) / r * dq + q - nl,
            surface_measure(d) * q * q * std::pow(r, d - 1)};
}

// One adaptive step of the classic RKF45 embedded pair.
bool rkf45_step(int d, double p, double& r, State& s, double& h, double tol) {
    static constexpr double a2 = 0.25, a3 = 3.0 / 8, a4 = 12.0 / 13, a5 = 1.0, a6 = 0.5;
    static constexpr double b21 = 0.25;
    static constexpr double b31 = 3.0 / 32, b32 = 9.0 / 32;
    static constexpr double b41 = 1932.0 / 2197, b42 = -7200.0 / 2197, b43 = 7296.0 / 2197;
    static constexpr double b51 = 439.0 / 216, b52 = -8.0, b53 = 3680.0 / 513, b54 = -845.0 / 4104;
    static constexpr double b61 = -8.0 / 27, b62 = 2.0, b63 = -3544.0 / 2565, b64 = 1859.0 / 4104,
                            b65 = -11.0 / 40;
    static constexpr double c1 = 16.0 / 135, c3 = 6656.0 / 12825, c4 = 28561.0 / 56430,
                            c5 = -9.0 / 50, c6 = 2.0 / 55;
    static constexpr double d1 = 25.0 / 216, d3 = 1408.0 / 2565, d4 = 2197.0 / 4104, d5 = -0.2;

    auto add = [](const State& x, double f, const State& k) {
        return State{x[0] + f * k[0], x[1] + f * k[1], x[2] + f * k[2]};
    };
    const State k1 = derivative(d, p, r, s);
    const State k2 = derivative(d, p, r + a2 * h, add(s, h * b21, k1));
    State tmp = add(add(s, h * b31, k1), h * b32, k2);
    const State k3 = derivative(d, p, r + a3 * h, tmp);
    tmp = add(add(add(s, h * b41, k1), h * b42, k2), h * b43, k3);
    const State k4 = derivative(d, p, r + a4 * h, tmp);
    tmp = add(add(add(add(s, h * b51, k1), h * b52, k2), h * b53, k3), h * b54, k4);
    const State k5 = derivative(d, p, r + a5 * h, tmp);
    tmp = add(add(add(add(add(s, h * b61, k1), h * b62, k2), h * b63, k3), h * b64, k4), h * b65, k5);
    const State k6 = derivative(d, p, r + a6 * h, tmp);

    State high{}, low{};
    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
        high[i] = s[i] + h * (c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c5 * k5[i] + c6 * k6[i]);
        low[i] = s[i] + h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i]);
        err = std::max(err, std::abs(high[i] - low[i]));
    }
    const double scale = tol * (1.0 + std::abs(s[0]));
    if (err > scale && h > 1e-12) {
        h *= std::max(0.1, 0.9 * std::pow(scale / err, 0.2));
        return false;
    }
    r += h;
    s = high;
    if (err > 0.0) h = std::min(h * std::min(5.0, 0.9 * std::pow(scale / err, 0.2)), 0.1);
    return true;
}

enum class Shot { crossed_zero, turned_up, decayed };

struct ShotResult {
    Shot shot;
    double r_stop = 0.0;
    double q_stop = 0.0;
    double mass = 0.0;  // radial mass integral up to r_stop
};

ShotResult integrate_shot(int d, double p, double a, double r_max) {
    const double r0 = 1e-6;
    // Series start from the regular center: Q''(0) = (a - a^p)/d. The mass
    // component is seeded with the [0, r0] sliver (flat profile there).
    const double q2 = (a - std::pow(a, p)) / d;
    State s{a + 0.5 * q2 * r0 * r0, q2 * r0,
            surface_measure(d) * a * a * std::pow(r0, d) / d};
    double r = r0, h = 1e-4;
    Shot shot = Shot::turned_up;
    while (r < r_max) {
        if (!rkf45_step(d, p, r, s, h, 1e-12)) continue;
        if (s[0] <= 0.0) { shot = Shot::crossed_zero; break; }
        if (s[1] > 0.0) { shot = Shot::turned_up; break; }
        if (s[0] < 1e-9) { shot = Shot::decayed; break; }
    }
    if (r >= r_max && s[0] > 0.0 && s[1] <= 0.0 && s[0] < 1e-8) shot = Shot::decayed;
    return {shot, r, std::max(s[0], 0.0), s[2]};
}

}  // namespace

RadialGroundState shoot_ground_state(int d, double r_max) {
    const double p = 1.0 + 4.0 / d;
    double lo = 1.05, hi = d == 1 ? 2.0 : (d == 2 ? 3.5 : 6.0);

    if (integrate_shot(d, p, hi, r_max).shot != Shot::crossed_zero)
        throw std::runtime_error("shooting oracle: upper bracket does not overshoot");

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const ShotResult res = integrate_shot(d, p, mid, r_max);
        if (res.shot == Shot::crossed_zero)
            hi = mid;
        else
            lo = mid;
        if (hi - lo < 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    }

    const double a = 0.5 * (lo + hi);
    const ShotResult final_shot = integrate_shot(d, p, a, r_max);
    // Beyond the stop point Q ~ c r^{-(d-1)/2} e^{-r}, so the remaining
    // radial mass integral is q_stop^2 r_stop^{d-1} / 2.
    const double tail = surface_measure(d) * final_shot.q_stop * final_shot.q_stop *
                        std::pow(final_shot.r_stop, d - 1) / 2.0;
    RadialGroundState out;
    out.peak = a;
    out.mass = final_shot.mass + tail;
    return out;
}

}  // namespace oracles
