#pragma once

#include <optional>
#include <vector>

#include "nls/field.hpp"

namespace nls {

struct Trajectory;

// Radial cutoff profile: 1 on [0,1], quintic C^2 smoothstep down to 0 on
// [1,2], 0 beyond. Nonincreasing.
double morawetz_chi(double r);
double morawetz_chi_prime(double r);

// Radial weights of the two-point functional:
//   phi(|z|) = R^{-d} int chi^2((z-s)/R) chi^2(s/R) ds,
//   psi(r)   = (1/r) int_0^r phi(s) ds.
// Both reduce to R-independent base tables B(rho) = phi at unit scale and
// C(rho) = int_0^rho B, with phi(r) = B(r/R), psi(r) = (R/r) C(r/R). The
// derivative identities psi' = (phi - psi)/r and
// lap psi = (phi' + (d-3) psi')/r then hold exactly, which the
// time-derivative identity relies on.
class MorawetzWeights {
public:
    static MorawetzWeights build(double R, const Grid& grid);

    double radius() const { return radius_; }
    int dim() const { return dim_; }

    double phi(double r) const;
    double dphi(double r) const;
    double lap_phi(double r) const;
    double psi(double r) const;
    double dpsi(double r) const;
    double lap_psi(double r) const;

    // int_0^infty phi(s) ds; r * psi(r) increases to this bound.
    double phi_integral() const;

    // max |lap psi| over the lookup range, measured at build time.
    double measured_max_lap_psi() const;

    // Sampled lookup tables on [0, r_max] with spacing <= h/2 (certification
    // and CSV dumps; evaluation goes through the base interpolant).
    const std::vector<double>& phi_table() const { return phi_table_; }
    const std::vector<double>& psi_table() const { return psi_table_; }
    double table_spacing() const { return table_spacing_; }
    double r_max() const { return r_max_; }

private:
    MorawetzWeights() = default;
    double base(double rho) const;        // B
    double base_d1(double rho) const;     // B'
    double base_d2(double rho) const;     // B''
    double base_cum(double rho) const;    // C

    int dim_ = 0;
    double radius_ = 0.0;
    double table_spacing_ = 0.0;
    double r_max_ = 0.0;
    double base_step_ = 0.0;
    std::vector<double> base_table_;      // B on [0, 4 + pad]
    std::vector<double> base_d1_table_;   // B'
    std::vector<double> base_d2_table_;   // B''
    std::vector<double> base_cum_table_;  // C
    double cum_total_ = 0.0;              // C(4)
    double max_lap_psi_ = 0.0;
    std::vector<double> phi_table_;
    std::vector<double> psi_table_;
};

MorawetzWeights build_weights(double R, const Grid& grid);

// M = int int |Iu(y)|^2 Im[conj(Iu) grad Iu](x) . (x-y) psi(|x-y|) dx dy,
// evaluated as sum_j int m_j (rho * K_j) with K_j(z) = z_j psi(|z|) via
// spectral convolution on the wrapped difference lattice.
double interaction_morawetz(const ComplexField& f, const MorawetzWeights& w,
                            std::optional<double> cutoff = std::nullopt);

struct MorawetzRhs {
    double gradient_term = 0.0;   // pair of Re[d_j conj(u) d_k u] against rho
    double momentum_term = 0.0;   // -2 m x m pair
    double mass_term = 0.0;       // -(1/2) rho x rho against lap phi + (d-1) lap psi
    double nonlinear_term = 0.0;  // mu 2/(d+2) |u|^{2+4/d} x rho against d psi + r psi'
    double total = 0.0;
};

// The four bulk terms of dM/dt with I = identity. A frequency cutoff is the
// commutator-error path, which is unsupported.
MorawetzRhs morawetz_rhs(const ComplexField& f, const MorawetzWeights& w, int mu,
                         std::optional<double> cutoff = std::nullopt);

// chi^2((y - center)/R)-weighted mass and momentum of f.
double localized_mass(const ComplexField& f, const Vec3& center, const MorawetzWeights& w);
Vec3 localized_momentum(const ComplexField& f, const Vec3& center, const MorawetzWeights& w);

// The unique xi zeroing the chi^2-localized momentum:
// xi_j = -int chi^2((y-s)/R) Im[conj(f) d_j f] dy / int chi^2((y-s)/R) |f|^2 dy.
Vec3 optimal_galilean_shift(const ComplexField& f, const Vec3& center, const MorawetzWeights& w);

// E(chi((x-center)/R) e^{ix.xi} f) with the boost phase expanded exactly:
// E(w) + xi . P(w) + |xi|^2 M(w) / 2 for the windowed field w.
double localized_energy(const ComplexField& f, const Vec3& center, double R,
                        const Vec3& xi, int mu);

// (int_0^T lambda(t)^3 dt) / sup_{[0,T]} lambda(t) over the recorded
// modulation history.
double cascade_ratio(const Trajectory& traj);

}  // namespace nls
