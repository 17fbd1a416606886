#include "nls/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "nls/errors.hpp"

namespace nls::spectral {

namespace {

// FFTW planning is not thread-safe; execution via fftw_execute_dft on fresh
// buffers is. Plans are created FFTW_UNALIGNED so they run on any buffer.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int dim, int n, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto key = std::make_tuple(dim, n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::vector<Complex> scratch(static_cast<std::size_t>(std::pow(n, dim)));
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        int dims[3] = {n, n, n};
        fftw_plan plan = fftw_plan_dft(dim, dims, buf, buf, sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    PlanCache() = default;
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

// Applies a diagonal Fourier multiplier: out_m = mult(k_m) * in_m.
template <typename Mult>
ComplexField apply_multiplier(const ComplexField& f, Mult&& mult) {
    ComplexField out(f.grid(), f.samples(), f.time());
    auto& data = out.samples();
    fft(f.grid(), data, FFTW_FORWARD);
    const Grid& g = f.grid();
    const double scale = 1.0 / static_cast<double>(g.size());
    const int n = g.n();
    const int d = g.dim();
    const auto& k = g.wavenumbers();
    std::size_t idx = 0;
    const int n1 = d > 1 ? n : 1;
    const int n2 = d > 2 ? n : 1;
    for (int m2 = 0; m2 < n2; ++m2)
        for (int m1 = 0; m1 < n1; ++m1)
            for (int m0 = 0; m0 < n; ++m0, ++idx) {
                Vec3 kv{k[static_cast<std::size_t>(m0)],
                        d > 1 ? k[static_cast<std::size_t>(m1)] : 0.0,
                        d > 2 ? k[static_cast<std::size_t>(m2)] : 0.0};
                data[idx] *= mult(kv, m0, m1, m2) * scale;
            }
    fft(f.grid(), data, FFTW_BACKWARD);
    return out;
}

}  // namespace

void fft(const Grid& grid, std::vector<Complex>& data, int sign) {
    if (data.size() != grid.size()) throw ArgumentError("fft: buffer size mismatch");
    fftw_plan plan = PlanCache::instance().get(grid.dim(), grid.n(), sign);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, buf, buf);
}

std::vector<Complex> coefficients(const ComplexField& f) {
    std::vector<Complex> c = f.samples();
    fft(f.grid(), c, FFTW_FORWARD);
    const double scale = 1.0 / static_cast<double>(f.grid().size());
    for (Complex& z : c) z *= scale;
    return c;
}

std::vector<ComplexField> gradient(const ComplexField& f) {
    const Grid& g = f.grid();
    const int nyq = g.nyquist_index();
    std::vector<ComplexField> out;
    out.reserve(static_cast<std::size_t>(g.dim()));
    for (int axis = 0; axis < g.dim(); ++axis) {
        out.push_back(apply_multiplier(f, [&](const Vec3& k, int m0, int m1, int m2) {
            const int m = axis == 0 ? m0 : (axis == 1 ? m1 : m2);
            if (m == nyq) return Complex(0.0, 0.0);  // odd operator: drop Nyquist
            return Complex(0.0, k[static_cast<std::size_t>(axis)]);
        }));
    }
    return out;
}

ComplexField laplacian(const ComplexField& f) {
    const int d = f.grid().dim();
    return apply_multiplier(f, [d](const Vec3& k, int, int, int) {
        return Complex(-norm2(k, d), 0.0);
    });
}

ComplexField helmholtz_inverse(const ComplexField& f) {
    const int d = f.grid().dim();
    return apply_multiplier(f, [d](const Vec3& k, int, int, int) {
        return Complex(1.0 / (1.0 + norm2(k, d)), 0.0);
    });
}

ComplexField truncate(const ComplexField& f, double cutoff) {
    if (!(cutoff >= 0.0)) throw ArgumentError("fourier_truncate: cutoff must be >= 0");
    const int d = f.grid().dim();
    const double c2 = cutoff * cutoff;
    return apply_multiplier(f, [d, c2](const Vec3& k, int, int, int) {
        return Complex(norm2(k, d) <= c2 ? 1.0 : 0.0, 0.0);
    });
}

double gradient_norm_sq(const ComplexField& f) {
    const Grid& g = f.grid();
    std::vector<Complex> c = coefficients(f);
    const int n = g.n();
    const int d = g.dim();
    const int nyq = g.nyquist_index();
    const auto& k = g.wavenumbers();
    std::vector<double> terms(c.size());
    std::size_t idx = 0;
    const int n1 = d > 1 ? n : 1;
    const int n2 = d > 2 ? n : 1;
    for (int m2 = 0; m2 < n2; ++m2)
        for (int m1 = 0; m1 < n1; ++m1)
            for (int m0 = 0; m0 < n; ++m0, ++idx) {
                double k2 = 0.0;
                if (m0 != nyq) k2 += k[static_cast<std::size_t>(m0)] * k[static_cast<std::size_t>(m0)];
                if (d > 1 && m1 != nyq) k2 += k[static_cast<std::size_t>(m1)] * k[static_cast<std::size_t>(m1)];
                if (d > 2 && m2 != nyq) k2 += k[static_cast<std::size_t>(m2)] * k[static_cast<std::size_t>(m2)];
                terms[idx] = k2 * std::norm(c[idx]);
            }
    // Parseval: h^d sum |f_j|^2 = h^d n^d sum |c_m|^2.
    return pairwise_sum(terms) * f.grid().cell_volume() * static_cast<double>(g.size());
}

double top_octave_mass_fraction(const ComplexField& f) {
    const Grid& g = f.grid();
    std::vector<Complex> c = coefficients(f);
    const double half_nyq = 0.5 * g.nyquist();
    double total = 0.0, top = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double m = std::norm(c[i]);
        total += m;
        const Vec3 k = g.wavevector(i);
        double kinf = 0.0;
        for (int a = 0; a < g.dim(); ++a)
            kinf = std::max(kinf, std::abs(k[static_cast<std::size_t>(a)]));
        if (kinf > half_nyq) top += m;
    }
    return total > 0.0 ? top / total : 0.0;
}

std::vector<Complex> resample(const ComplexField& f, std::span<const Vec3> points) {
    const Grid& g = f.grid();
    const double L = g.half_width();
    for (const Vec3& p : points)
        for (int a = 0; a < g.dim(); ++a) {
            const double x = p[static_cast<std::size_t>(a)];
            if (!(x >= -L && x < L))
                throw ArgumentError("bandlimited_resample: point outside the periodic box");
        }

    const std::vector<Complex> c = coefficients(f);
    const int n = g.n();
    const int d = g.dim();
    const auto& k = g.wavenumbers();
    std::vector<Complex> values(points.size());

    // Separable evaluation: phase vectors per axis, then nested contraction.
    std::vector<Complex> e0(static_cast<std::size_t>(n)), e1, e2;
    std::vector<Complex> t1, t2;
    if (d > 1) { e1.resize(static_cast<std::size_t>(n)); t1.resize(static_cast<std::size_t>(d > 2 ? n * n : n)); }
    if (d > 2) { e2.resize(static_cast<std::size_t>(n)); t2.resize(static_cast<std::size_t>(n)); }

    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        const Vec3& p = points[pi];
        for (int a = 0; a < d; ++a) {
            auto& e = a == 0 ? e0 : (a == 1 ? e1 : e2);
            const double xa = p[static_cast<std::size_t>(a)] + L;
            for (int m = 0; m < n; ++m)
                e[static_cast<std::size_t>(m)] = std::polar(1.0, k[static_cast<std::size_t>(m)] * xa);
        }
        if (d == 1) {
            Complex s = 0.0;
            for (int m = 0; m < n; ++m) s += c[static_cast<std::size_t>(m)] * e0[static_cast<std::size_t>(m)];
            values[pi] = s;
        } else if (d == 2) {
            Complex s = 0.0;
            for (int m1 = 0; m1 < n; ++m1) {
                Complex row = 0.0;
                const Complex* cr = &c[static_cast<std::size_t>(m1) * static_cast<std::size_t>(n)];
                for (int m0 = 0; m0 < n; ++m0) row += cr[m0] * e0[static_cast<std::size_t>(m0)];
                s += row * e1[static_cast<std::size_t>(m1)];
            }
            values[pi] = s;
        } else {
            Complex s = 0.0;
            for (int m2 = 0; m2 < n; ++m2) {
                Complex plane = 0.0;
                for (int m1 = 0; m1 < n; ++m1) {
                    Complex row = 0.0;
                    const Complex* cr = &c[(static_cast<std::size_t>(m2) * static_cast<std::size_t>(n) +
                                            static_cast<std::size_t>(m1)) * static_cast<std::size_t>(n)];
                    for (int m0 = 0; m0 < n; ++m0) row += cr[m0] * e0[static_cast<std::size_t>(m0)];
                    plane += row * e1[static_cast<std::size_t>(m1)];
                }
                s += plane * e2[static_cast<std::size_t>(m2)];
            }
            values[pi] = s;
        }
    }
    return values;
}

ComplexField resample_affine(const ComplexField& f, double lambda, const Vec3& shift) {
    const Grid& g = f.grid();
    const int n = g.n();
    const int d = g.dim();
    const double L = g.half_width();
    const auto& k = g.wavenumbers();
    std::vector<Complex> c = coefficients(f);

    // Per-axis evaluation matrix E_a[p*n + m] = e^{i k_m (lambda x_p + s_a + L)}.
    // The interpolant is 2L-periodic, so out-of-box arguments need no wrap.
    auto eval_matrix = [&](int axis) {
        std::vector<Complex> E(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
        for (int p = 0; p < n; ++p) {
            const double arg = lambda * g.coordinate(p) + shift[static_cast<std::size_t>(axis)] + L;
            for (int m = 0; m < n; ++m)
                E[static_cast<std::size_t>(p) * static_cast<std::size_t>(n) + static_cast<std::size_t>(m)] =
                    std::polar(1.0, k[static_cast<std::size_t>(m)] * arg);
        }
        return E;
    };

    // Contract one axis at a time; with equal n per axis a transpose-free
    // sweep keeps the fast (axis 0) stride contiguous.
    std::vector<Complex> cur = std::move(c);
    for (int axis = 0; axis < d; ++axis) {
        const std::vector<Complex> E = eval_matrix(axis);
        std::vector<Complex> next(cur.size(), Complex(0.0, 0.0));
        const std::size_t un = static_cast<std::size_t>(n);
        if (axis == 0) {
            const std::size_t cols = cur.size() / un;
            for (std::size_t col = 0; col < cols; ++col) {
                const Complex* src = &cur[col * un];
                Complex* dst = &next[col * un];
                for (int p = 0; p < n; ++p) {
                    const Complex* erow = &E[static_cast<std::size_t>(p) * un];
                    Complex s = 0.0;
                    for (int m = 0; m < n; ++m) s += erow[m] * src[m];
                    dst[p] = s;
                }
            }
        } else if (axis == 1) {
            const std::size_t planes = cur.size() / (un * un);
            for (std::size_t pl = 0; pl < planes; ++pl) {
                const Complex* src = &cur[pl * un * un];
                Complex* dst = &next[pl * un * un];
                for (int p = 0; p < n; ++p) {
                    const Complex* erow = &E[static_cast<std::size_t>(p) * un];
                    Complex* drow = &dst[static_cast<std::size_t>(p) * un];
                    for (int m = 0; m < n; ++m) {
                        const Complex w = erow[m];
                        const Complex* srow = &src[static_cast<std::size_t>(m) * un];
                        for (int i0 = 0; i0 < n; ++i0) drow[i0] += w * srow[i0];
                    }
                }
            }
        } else {
            const std::size_t plane = un * un;
            for (int p = 0; p < n; ++p) {
                const Complex* erow = &E[static_cast<std::size_t>(p) * un];
                Complex* dplane = &next[static_cast<std::size_t>(p) * plane];
                for (int m = 0; m < n; ++m) {
                    const Complex w = erow[m];
                    const Complex* splane = &cur[static_cast<std::size_t>(m) * plane];
                    for (std::size_t i = 0; i < plane; ++i) dplane[i] += w * splane[i];
                }
            }
        }
        cur = std::move(next);
    }
    return ComplexField(g, std::move(cur), f.time());
}

ComplexField translate(const ComplexField& f, const Vec3& shift) {
    const int d = f.grid().dim();
    return apply_multiplier(f, [&shift, d](const Vec3& k, int, int, int) {
        return std::polar(1.0, -dot(k, shift, d));
    });
}

}  // namespace nls::spectral
