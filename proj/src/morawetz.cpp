#include "nls/morawetz.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "nls/diagnostics.hpp"
#include "nls/errors.hpp"
#include "nls/evolve.hpp"
#include "nls/spectral.hpp"

namespace nls {

double morawetz_chi(double r) {
    r = std::abs(r);
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double s = r - 1.0;
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double morawetz_chi_prime(double r) {
    r = std::abs(r);
    if (r <= 1.0 || r >= 2.0) return 0.0;
    const double s = r - 1.0;
    return -30.0 * s * s * (1.0 - s) * (1.0 - s);
}

namespace {

double chi_second(double r) {
    r = std::abs(r);
    if (r <= 1.0 || r >= 2.0) return 0.0;
    const double s = r - 1.0;
    return -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
}

// chi^2 as an even function on R and its derivatives (continuous: chi is C^2
// with chi'(1) = chi'(2) = chi''(1) = chi''(2) = 0).
double chi_sq(double x) {
    const double c = morawetz_chi(x);
    return c * c;
}
double chi_sq_d1(double x) {
    const double a = std::abs(x);
    const double v = 2.0 * morawetz_chi(a) * morawetz_chi_prime(a);
    return x < 0.0 ? -v : v;
}
double chi_sq_d2(double x) {
    const double a = std::abs(x);
    const double cp = morawetz_chi_prime(a);
    return 2.0 * (cp * cp + morawetz_chi(a) * chi_second(a));
}

// 16-point Gauss-Legendre on [-1, 1].
constexpr int kGL = 16;
constexpr double kGLx[kGL] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGLw[kGL] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <typename F>
double gl_segment(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < kGL; ++i) s += kGLw[i] * f(mid + half * kGLx[i]);
    return s * half;
}

// Integrates f over [a, b] split at the given breakpoints. Exact for
// piecewise polynomials of degree <= 31 between breakpoints.
template <typename F>
double gl_piecewise(F&& f, double a, double b, std::vector<double> breaks) {
    breaks.push_back(a);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double lo = std::max(a, breaks[i]);
        const double hi = std::min(b, breaks[i + 1]);
        if (hi > lo) total += gl_segment(f, lo, hi);
    }
    return total;
}

std::vector<double> correlation_breaks(double rho) {
    return {-2.0, -1.0, 1.0, 2.0, rho - 2.0, rho - 1.0, rho + 1.0, rho + 2.0};
}

struct BaseTable {
    double step = 0.0;
    std::vector<double> b, b1, b2, cum;  // B, B', B'', C on [0, 4 + pad]
    double cum_total = 0.0;
};

// d = 1: the correlation integrand is piecewise polynomial, so piecewise
// Gauss-Legendre evaluates B, B', B'' to round-off.
BaseTable build_base_1d() {
    BaseTable t;
    const int n = 4401;
    t.step = 4.4 / (n - 1);
    t.b.resize(n);
    t.b1.resize(n);
    t.b2.resize(n);
    t.cum.resize(n);
    for (int i = 0; i < n; ++i) {
        const double rho = t.step * i;
        if (rho >= 4.0) { t.b[i] = t.b1[i] = t.b2[i] = 0.0; continue; }
        const double lo = std::max(-2.0, rho - 2.0), hi = 2.0;
        const auto breaks = correlation_breaks(rho);
        t.b[i] = gl_piecewise([rho](double u) { return chi_sq(rho - u) * chi_sq(u); }, lo, hi, breaks);
        t.b1[i] = gl_piecewise([rho](double u) { return chi_sq_d1(rho - u) * chi_sq(u); }, lo, hi, breaks);
        t.b2[i] = gl_piecewise([rho](double u) { return chi_sq_d2(rho - u) * chi_sq(u); }, lo, hi, breaks);
    }
    // Cumulative integral, node by node (each gap is polynomial too).
    t.cum[0] = 0.0;
    for (int i = 1; i < n; ++i) {
        const double a = t.step * (i - 1), b = t.step * i;
        auto B = [&](double rho) {
            if (rho >= 4.0) return 0.0;
            return gl_piecewise([rho](double u) { return chi_sq(rho - u) * chi_sq(u); },
                                std::max(-2.0, rho - 2.0), 2.0, correlation_breaks(rho));
        };
        t.cum[i] = t.cum[i - 1] + gl_segment(B, a, b);
    }
    t.cum_total = t.cum[static_cast<std::size_t>(std::lround(4.0 / t.step))];
    return t;
}

// d = 3: bipolar reduction of the radial correlation,
// B(rho) = (2 pi / rho) int r chi^2(r) [G(rho + r) - G(|rho - r|)] dr with
// G(s) = int_0^s t chi^2(t) dt; every piece is polynomial.
BaseTable build_base_3d() {
    auto G = [](double s) {
        s = std::min(s, 2.0);
        if (s <= 0.0) return 0.0;
        return gl_piecewise([](double u) { return u * chi_sq(u); }, 0.0, s, {1.0});
    };
    auto B = [&](double rho) -> double {
        if (rho >= 4.0) return 0.0;
        if (rho < 1e-9)
            return 4.0 * M_PI *
                   gl_piecewise([](double r) { return r * r * chi_sq(r) * chi_sq(r); }, 0.0, 2.0, {1.0});
        std::vector<double> breaks = {1.0, 2.0, rho, rho - 1.0, rho - 2.0, rho + 1.0,
                                      rho + 2.0, 1.0 - rho, 2.0 - rho};
        const double val = gl_piecewise(
            [&](double r) { return r * chi_sq(r) * (G(rho + r) - G(std::abs(rho - r))); }, 0.0, 2.0,
            breaks);
        return 2.0 * M_PI / rho * val;
    };

    BaseTable t;
    const int n = 2201;
    t.step = 4.4 / (n - 1);
    t.b.resize(n);
    for (int i = 0; i < n; ++i) t.b[i] = B(t.step * i);
    // Derivatives by 5-point stencils (B is even about 0).
    t.b1.resize(n);
    t.b2.resize(n);
    auto at = [&](int i) { return t.b[static_cast<std::size_t>(std::abs(i))]; };
    for (int i = 0; i < n; ++i) {
        if (i + 2 < n) {
            t.b1[i] = (at(i - 2) - 8 * at(i - 1) + 8 * at(i + 1) - at(i + 2)) / (12 * t.step);
            t.b2[i] = (-at(i - 2) + 16 * at(i - 1) - 30 * at(i) + 16 * at(i + 1) - at(i + 2)) /
                      (12 * t.step * t.step);
        } else {
            t.b1[i] = t.b2[i] = 0.0;
        }
    }
    if (n > 0) t.b1[0] = 0.0;  // even function
    t.cum.assign(n, 0.0);
    for (int i = 1; i < n; ++i) {
        const double a = t.step * (i - 1), b = t.step * i;
        t.cum[i] = t.cum[i - 1] + gl_segment(B, a, b);
    }
    t.cum_total = t.cum[static_cast<std::size_t>(std::lround(4.0 / t.step))];
    return t;
}

// d = 2: FFT self-correlation of chi^2 sampled on [-4, 4)^2, read off along
// an axis. The correlation support (radius 4) fits the box without wrap.
BaseTable build_base_2d() {
    const int nc = 2048;
    const double box = 8.0, delta = box / nc;
    const Grid cg(2, nc, box / 2.0);
    std::vector<Complex> buf(cg.size());
    for (int i1 = 0; i1 < nc; ++i1)
        for (int i0 = 0; i0 < nc; ++i0) {
            const double x = cg.coordinate(i0), y = cg.coordinate(i1);
            buf[cg.index(i0, i1)] = Complex(chi_sq(std::sqrt(x * x + y * y)), 0.0);
        }
    spectral::fft(cg, buf, -1);
    for (Complex& z : buf) z = Complex(std::norm(z), 0.0);
    spectral::fft(cg, buf, +1);
    // correlation(z) = IFFT(|F|^2)/N * delta^d, sampled at z = (j delta, 0)
    const double scale = delta * delta / static_cast<double>(cg.size());

    BaseTable t;
    t.step = delta;
    const int n = static_cast<int>(std::floor(4.4 / delta)) + 1;
    t.b.resize(n);
    for (int j = 0; j < n; ++j)
        t.b[j] = j < nc / 2 ? buf[cg.index(j, 0)].real() * scale : 0.0;
    for (int j = 0; j < n; ++j)
        if (t.step * j >= 4.0) t.b[j] = 0.0;

    t.b1.resize(n);
    t.b2.resize(n);
    auto at = [&](int i) { return t.b[static_cast<std::size_t>(std::abs(i))]; };
    for (int i = 0; i < n; ++i) {
        if (i + 2 < n) {
            t.b1[i] = (at(i - 2) - 8 * at(i - 1) + 8 * at(i + 1) - at(i + 2)) / (12 * t.step);
            t.b2[i] = (-at(i - 2) + 16 * at(i - 1) - 30 * at(i) + 16 * at(i + 1) - at(i + 2)) /
                      (12 * t.step * t.step);
        } else {
            t.b1[i] = t.b2[i] = 0.0;
        }
    }
    t.b1[0] = 0.0;
    // Cumulative Simpson on the uniform table.
    t.cum.assign(n, 0.0);
    for (int i = 1; i < n; ++i) {
        if (i >= 2 && i % 2 == 0)
            t.cum[i] = t.cum[i - 2] + t.step / 3.0 * (at(i - 2) + 4.0 * at(i - 1) + at(i));
        else
            t.cum[i] = t.cum[i - 1] + t.step / 12.0 *
                                          (5.0 * at(i) + 8.0 * at(i - 1) -
                                           (i >= 2 ? at(i - 2) : at(1)));
    }
    t.cum_total = t.cum[static_cast<std::size_t>(std::lround(4.0 / t.step))];
    return t;
}

const BaseTable& base_table(int d) {
    static std::mutex mutex;
    static std::map<int, BaseTable> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;
    BaseTable t = d == 1 ? build_base_1d() : (d == 2 ? build_base_2d() : build_base_3d());
    return cache.emplace(d, std::move(t)).first->second;
}

// Catmull-Rom on a uniform table with even extension below 0 and clamped
// extension above.
double interp_even(const std::vector<double>& tab, double step, double x) {
    const double u = x / step;
    const long i = static_cast<long>(std::floor(u));
    const double f = u - i;
    const long last = static_cast<long>(tab.size()) - 1;
    auto at = [&](long j) {
        j = std::abs(j);
        return tab[static_cast<std::size_t>(std::min(j, last))];
    };
    const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
    return p1 + 0.5 * f * (p2 - p0 + f * (2 * p0 - 5 * p1 + 4 * p2 - p3 + f * (3 * (p1 - p2) + p3 - p0)));
}

double wrap_displacement(int q, int n, double h) { return (q < n / 2 ? q : q - n) * h; }

std::vector<Complex> fft_real(const Grid& g, const std::vector<double>& v) {
    std::vector<Complex> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = Complex(v[i], 0.0);
    spectral::fft(g, out, -1);
    return out;
}

// Periodic convolution given the transform of one factor; result is real
// for real inputs (imaginary part discarded).
std::vector<double> convolve_with(const Grid& g, const std::vector<Complex>& a_hat,
                                  const std::vector<double>& kernel) {
    std::vector<Complex> k_hat = fft_real(g, kernel);
    const double scale = g.cell_volume() / static_cast<double>(g.size());
    for (std::size_t i = 0; i < k_hat.size(); ++i) k_hat[i] *= a_hat[i] * scale;
    spectral::fft(g, k_hat, +1);
    std::vector<double> out(k_hat.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = k_hat[i].real();
    return out;
}

double weighted_sum(const Grid& g, const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> terms(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) terms[i] = a[i] * b[i];
    return pairwise_sum(terms) * g.cell_volume();
}

struct FieldData {
    std::vector<double> rho;                 // |u|^2
    std::vector<std::vector<double>> m;      // Im[conj(u) d_j u]
    std::vector<std::vector<double>> gre;    // Re[d_j conj(u) d_k u], packed j*d+k
};

FieldData field_data(const ComplexField& u, bool need_gradient_pairs) {
    const Grid& g = u.grid();
    const int d = g.dim();
    FieldData out;
    out.rho.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out.rho[i] = std::norm(u[i]);
    const auto grad = spectral::gradient(u);
    out.m.assign(static_cast<std::size_t>(d), std::vector<double>(g.size()));
    for (int j = 0; j < d; ++j)
        for (std::size_t i = 0; i < g.size(); ++i)
            out.m[static_cast<std::size_t>(j)][i] = std::imag(std::conj(u[i]) * grad[static_cast<std::size_t>(j)][i]);
    if (need_gradient_pairs) {
        out.gre.assign(static_cast<std::size_t>(d * d), std::vector<double>(g.size()));
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (std::size_t i = 0; i < g.size(); ++i)
                    out.gre[static_cast<std::size_t>(j * d + k)][i] =
                        std::real(std::conj(grad[static_cast<std::size_t>(j)][i]) *
                                  grad[static_cast<std::size_t>(k)][i]);
    }
    return out;
}

// Samples a radial-tensor kernel on the wrapped difference lattice.
template <typename F>
std::vector<double> sample_kernel(const Grid& g, F&& fn) {
    std::vector<double> out(g.size());
    const int n = g.n();
    const double h = g.spacing();
    const int d = g.dim();
    const int n1 = d > 1 ? n : 1;
    const int n2 = d > 2 ? n : 1;
    std::size_t idx = 0;
    for (int q2 = 0; q2 < n2; ++q2)
        for (int q1 = 0; q1 < n1; ++q1)
            for (int q0 = 0; q0 < n; ++q0, ++idx) {
                Vec3 z{wrap_displacement(q0, n, h),
                       d > 1 ? wrap_displacement(q1, n, h) : 0.0,
                       d > 2 ? wrap_displacement(q2, n, h) : 0.0};
                out[idx] = fn(z, std::sqrt(norm2(z, d)));
            }
    return out;
}

void require_weights_grid(const ComplexField& f, const MorawetzWeights& w) {
    if (f.grid().dim() != w.dim())
        throw ArgumentError("morawetz: weights dimension does not match the field grid");
}

}  // namespace

MorawetzWeights MorawetzWeights::build(double R, const Grid& grid) {
    const double h = grid.spacing();
    const double L = grid.half_width();
    if (!(R >= 4.0 * h))
        throw ConfigError("morawetz weights: R must be at least 4 lattice spacings");
    if (!(4.0 * R <= L))
        throw ConfigError("morawetz weights: support radius 4R must fit inside the box");

    MorawetzWeights w;
    w.dim_ = grid.dim();
    w.radius_ = R;
    const BaseTable& t = base_table(grid.dim());
    w.base_step_ = t.step;
    w.base_table_ = t.b;
    w.base_d1_table_ = t.b1;
    w.base_d2_table_ = t.b2;
    w.base_cum_table_ = t.cum;
    w.cum_total_ = t.cum_total;

    w.table_spacing_ = 0.5 * h;
    w.r_max_ = std::sqrt(static_cast<double>(grid.dim())) * L + h;
    const std::size_t count = static_cast<std::size_t>(std::ceil(w.r_max_ / w.table_spacing_)) + 1;
    w.phi_table_.resize(count);
    w.psi_table_.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double r = w.table_spacing_ * static_cast<double>(i);
        w.phi_table_[i] = w.phi(r);
        w.psi_table_[i] = w.psi(r);
        w.max_lap_psi_ = std::max(w.max_lap_psi_, std::abs(w.lap_psi(r)));
    }

    // Build-time certification of the weight laws.
    const double phi0 = w.phi(0.0);
    if (std::abs(w.psi_table_[0] - phi0) > 1e-10 * phi0)
        throw ConfigError("morawetz weights: psi(0+) != phi(0)");
    for (std::size_t i = 1; i < count; ++i) {
        if (w.phi_table_[i] > w.phi_table_[i - 1] + 1e-12 * phi0)
            throw ConfigError("morawetz weights: phi is not nonincreasing");
        if (w.psi_table_[i] > w.psi_table_[i - 1] + 1e-12 * phi0)
            throw ConfigError("morawetz weights: psi is not nonincreasing");
        const double r = w.table_spacing_ * static_cast<double>(i);
        if (r * w.psi_table_[i] > w.phi_integral() * (1.0 + 1e-10))
            throw ConfigError("morawetz weights: r psi(r) exceeds the phi integral");
        if (r >= 4.0 * R && w.phi_table_[i] != 0.0)
            throw ConfigError("morawetz weights: phi not supported in [0, 4R]");
        if (r <= R && w.phi_table_[i] < 0.5 * phi0)
            throw ConfigError("morawetz weights: phi dips below the certified floor on [0, R]");
    }
    return w;
}

MorawetzWeights build_weights(double R, const Grid& grid) { return MorawetzWeights::build(R, grid); }

double MorawetzWeights::base(double rho) const { return rho >= 4.0 ? 0.0 : interp_even(base_table_, base_step_, rho); }
double MorawetzWeights::base_d1(double rho) const {
    if (rho >= 4.0) return 0.0;
    const double v = interp_even(base_d1_table_, base_step_, std::abs(rho));
    return rho < 0.0 ? -v : v;
}
double MorawetzWeights::base_d2(double rho) const { return rho >= 4.0 ? 0.0 : interp_even(base_d2_table_, base_step_, rho); }
double MorawetzWeights::base_cum(double rho) const {
    if (rho >= 4.0) return cum_total_;
    return interp_even(base_cum_table_, base_step_, rho);
}

double MorawetzWeights::phi(double r) const { return base(r / radius_); }
double MorawetzWeights::dphi(double r) const { return base_d1(r / radius_) / radius_; }

double MorawetzWeights::lap_phi(double r) const {
    const double rho = r / radius_;
    if (rho >= 4.0) return 0.0;
    if (rho < 1e-3) return dim_ * base_d2(0.0) / (radius_ * radius_);
    return (base_d2(rho) + (dim_ - 1) * base_d1(rho) / rho) / (radius_ * radius_);
}

double MorawetzWeights::psi(double r) const {
    const double rho = r / radius_;
    if (rho < 1e-3) return base(0.0) + base_d2(0.0) * rho * rho / 6.0;
    return base_cum(rho) / rho;
}

double MorawetzWeights::dpsi(double r) const {
    const double rho = r / radius_;
    if (rho < 1e-3) return base_d2(0.0) * rho / (3.0 * radius_);
    return (phi(r) - psi(r)) / r;
}

double MorawetzWeights::lap_psi(double r) const {
    const double rho = r / radius_;
    if (rho < 1e-3) return base_d2(0.0) * dim_ / (3.0 * radius_ * radius_);
    return (dphi(r) + (dim_ - 3) * dpsi(r)) / r;
}

double MorawetzWeights::phi_integral() const { return radius_ * cum_total_; }
double MorawetzWeights::measured_max_lap_psi() const { return max_lap_psi_; }

double interaction_morawetz(const ComplexField& f, const MorawetzWeights& w,
                            std::optional<double> cutoff) {
    require_weights_grid(f, w);
    const ComplexField u = cutoff.has_value() ? spectral::truncate(f, *cutoff) : f;
    const Grid& g = u.grid();
    const int d = g.dim();

    const FieldData fd = field_data(u, false);
    const std::vector<Complex> rho_hat = fft_real(g, fd.rho);

    double total = 0.0;
    for (int j = 0; j < d; ++j) {
        const std::vector<double> kernel = sample_kernel(g, [&](const Vec3& z, double r) {
            return z[static_cast<std::size_t>(j)] * w.psi(r);
        });
        const std::vector<double> conv = convolve_with(g, rho_hat, kernel);
        total += weighted_sum(g, fd.m[static_cast<std::size_t>(j)], conv);
    }
    return total;
}

MorawetzRhs morawetz_rhs(const ComplexField& f, const MorawetzWeights& w, int mu,
                         std::optional<double> cutoff) {
    require_weights_grid(f, w);
    if (mu != 1 && mu != -1) throw ArgumentError("morawetz_rhs: mu must be +1 or -1");
    if (cutoff.has_value())
        throw ArgumentError(
            "morawetz_rhs: frequency truncation is the commutator-error path, which is unsupported");

    const Grid& g = f.grid();
    const int d = g.dim();
    const FieldData fd = field_data(f, true);
    const std::vector<Complex> rho_hat = fft_real(g, fd.rho);
    std::vector<std::vector<Complex>> m_hat(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) m_hat[static_cast<std::size_t>(k)] = fft_real(g, fd.m[static_cast<std::size_t>(k)]);

    MorawetzRhs out;

    // Gradient and momentum pair terms share the tensor kernel
    // A_jk(z) = delta_jk psi + z_j z_k psi'(r)/r.
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            const std::vector<double> a_jk = sample_kernel(g, [&](const Vec3& z, double r) {
                const double diag = j == k ? w.psi(r) : 0.0;
                if (r == 0.0) return diag;
                return diag + z[static_cast<std::size_t>(j)] * z[static_cast<std::size_t>(k)] * w.dpsi(r) / r;
            });
            const std::vector<double> conv_rho = convolve_with(g, rho_hat, a_jk);
            out.gradient_term += 2.0 * weighted_sum(g, fd.gre[static_cast<std::size_t>(j * d + k)], conv_rho);
            const std::vector<double> conv_mk = convolve_with(g, m_hat[static_cast<std::size_t>(k)], a_jk);
            out.momentum_term += -2.0 * weighted_sum(g, fd.m[static_cast<std::size_t>(j)], conv_mk);
        }

    {
        const std::vector<double> mass_kernel = sample_kernel(g, [&](const Vec3&, double r) {
            return w.lap_phi(r) + (d - 1) * w.lap_psi(r);
        });
        const std::vector<double> conv = convolve_with(g, rho_hat, mass_kernel);
        out.mass_term = -0.5 * weighted_sum(g, fd.rho, conv);
    }

    {
        const std::vector<double> nl_kernel = sample_kernel(g, [&](const Vec3&, double r) {
            return d * w.psi(r) + r * w.dpsi(r);
        });
        const std::vector<double> conv = convolve_with(g, rho_hat, nl_kernel);
        std::vector<double> pot(g.size());
        const double expo = 1.0 + 2.0 / d;
        for (std::size_t i = 0; i < g.size(); ++i) pot[i] = std::pow(fd.rho[i], expo);
        out.nonlinear_term = mu * 2.0 / (d + 2.0) * weighted_sum(g, pot, conv);
    }

    out.total = out.gradient_term + out.momentum_term + out.mass_term + out.nonlinear_term;
    return out;
}

double localized_mass(const ComplexField& f, const Vec3& center, const MorawetzWeights& w) {
    require_weights_grid(f, w);
    const Grid& g = f.grid();
    std::vector<double> terms(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec3 x = g.point(i);
        double r2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const double dx = x[static_cast<std::size_t>(a)] - center[static_cast<std::size_t>(a)];
            r2 += dx * dx;
        }
        terms[i] = chi_sq(std::sqrt(r2) / w.radius()) * std::norm(f[i]);
    }
    return pairwise_sum(terms) * g.cell_volume();
}

Vec3 localized_momentum(const ComplexField& f, const Vec3& center, const MorawetzWeights& w) {
    require_weights_grid(f, w);
    const Grid& g = f.grid();
    const auto grad = spectral::gradient(f);
    Vec3 out = kZeroVec;
    for (int j = 0; j < g.dim(); ++j) {
        std::vector<double> terms(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Vec3 x = g.point(i);
            double r2 = 0.0;
            for (int a = 0; a < g.dim(); ++a) {
                const double dx = x[static_cast<std::size_t>(a)] - center[static_cast<std::size_t>(a)];
                r2 += dx * dx;
            }
            terms[i] = chi_sq(std::sqrt(r2) / w.radius()) *
                       std::imag(std::conj(f[i]) * grad[static_cast<std::size_t>(j)][i]);
        }
        out[static_cast<std::size_t>(j)] = pairwise_sum(terms) * g.cell_volume();
    }
    return out;
}

Vec3 optimal_galilean_shift(const ComplexField& f, const Vec3& center, const MorawetzWeights& w) {
    const double denom = localized_mass(f, center, w);
    if (!(denom >= 1e-12 * mass(f)))
        throw ArgumentError("optimal_galilean_shift: vanishing localized mass");
    const Vec3 p = localized_momentum(f, center, w);
    Vec3 xi = kZeroVec;
    for (int a = 0; a < f.grid().dim(); ++a)
        xi[static_cast<std::size_t>(a)] = -p[static_cast<std::size_t>(a)] / denom;
    return xi;
}

double localized_energy(const ComplexField& f, const Vec3& center, double R,
                        const Vec3& xi, int mu) {
    const Grid& g = f.grid();
    const int d = g.dim();
    for (int a = 0; a < d; ++a)
        if (std::abs(center[static_cast<std::size_t>(a)]) + 2.0 * R > g.half_width())
            throw ArgumentError("localized_energy: window support clips the box");

    ComplexField windowed(g, f.time());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec3 x = g.point(i);
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) {
            const double dx = x[static_cast<std::size_t>(a)] - center[static_cast<std::size_t>(a)];
            r2 += dx * dx;
        }
        windowed[i] = morawetz_chi(std::sqrt(r2) / R) * f[i];
    }
    const ConservedQuantities c = conserved_quantities(windowed, mu);
    return c.energy + dot(xi, c.momentum, d) + 0.5 * norm2(xi, d) * c.mass;
}

double cascade_ratio(const Trajectory& traj) {
    std::vector<double> t, lam;
    for (const DiagnosticRecord& r : traj.records) {
        if (!r.lambda.has_value()) throw ArgumentError("cascade_ratio: missing modulation data");
        t.push_back(r.t);
        lam.push_back(*r.lambda);
    }
    if (t.size() < 2) throw ArgumentError("cascade_ratio: need at least two records");
    double integral = 0.0, sup = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sup = std::max(sup, lam[i]);
        if (i > 0)
            integral += 0.5 * (t[i] - t[i - 1]) *
                        (lam[i] * lam[i] * lam[i] + lam[i - 1] * lam[i - 1] * lam[i - 1]);
    }
    return integral / sup;
}

}  // namespace nls
