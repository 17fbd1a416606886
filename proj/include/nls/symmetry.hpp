#pragma once

#include "nls/field.hpp"

namespace nls {

// Parameters of the symmetry action
//   (g f)(x) = lambda^{d/2} e^{i x.xi0} e^{i gamma0} f(lambda x + x0).
struct GroupElement {
    double lambda = 1.0;
    Vec3 x0 = kZeroVec;
    Vec3 xi0 = kZeroVec;
    double gamma0 = 0.0;
};

GroupElement identity_element();

// apply(g2, apply(g1, f)) = apply(compose(g2, g1), f).
GroupElement compose(const GroupElement& g2, const GroupElement& g1);

// compose(g, inverse(g)) = identity (both sides).
GroupElement inverse(const GroupElement& g);

// Per-application scale budget for band-limited resampling.
inline constexpr double kMinApplyScale = 0.25;
inline constexpr double kMaxApplyScale = 4.0;

ComplexField apply_group(const GroupElement& g, const ComplexField& f);

// v(t,x) = e^{i (xi0/2).(x - (xi0/2) t)} u(t, x - xi0 t). The xi0/2 phase
// convention here is a factor of two off the group element's xi0; a boost
// by xi0 at t = 0 equals apply_group with xi0_group = xi0/2.
ComplexField galilean_boost(const ComplexField& f, const Vec3& xi0, double t);

// v(t,x) = |t|^{-d/2} conj(u)(1/t, x/t) e^{i|x|^2/(4t)}, x from the box
// center; f is the snapshot of u at time 1/t.
ComplexField pseudoconformal(const ComplexField& f, double t);

}  // namespace nls
