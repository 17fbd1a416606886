#include "nls/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nls/errors.hpp"

namespace nls {

ComplexField::ComplexField(const Grid& grid, double time)
    : grid_(grid), samples_(grid.size(), Complex(0.0, 0.0)), time_(time) {}

ComplexField::ComplexField(const Grid& grid, std::vector<Complex> samples, double time)
    : grid_(grid), samples_(std::move(samples)), time_(time) {
    if (samples_.size() != grid_.size())
        throw ArgumentError("field: sample count " + std::to_string(samples_.size()) +
                            " does not match grid size " + std::to_string(grid_.size()));
}

void ComplexField::check_finite() const {
    for (const Complex& z : samples_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw ArgumentError("field: non-finite sample");
}

ComplexField ComplexField::from_function(const Grid& grid,
                                         const std::function<Complex(const Vec3&)>& fn,
                                         double time) {
    ComplexField f(grid, time);
    for (std::size_t i = 0; i < grid.size(); ++i) f[i] = fn(grid.point(i));
    return f;
}

double lp_norm(const ComplexField& f, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (const Complex& z : f.samples()) m = std::max(m, std::abs(z));
        return m;
    }
    if (!(p >= 1.0)) throw ArgumentError("lp_norm: p must satisfy p >= 1 or p = inf");
    std::vector<double> terms(f.samples().size());
    if (p == 2.0) {
        for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::norm(f[i]);
    } else {
        for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::pow(std::abs(f[i]), p);
    }
    const double sum = pairwise_sum(terms) * f.grid().cell_volume();
    return std::pow(sum, 1.0 / p);
}

double mass(const ComplexField& f) {
    std::vector<double> terms(f.samples().size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::norm(f[i]);
    return pairwise_sum(terms) * f.grid().cell_volume();
}

Complex inner_product(const ComplexField& f, const ComplexField& g) {
    require_same_grid(f, g, "inner_product");
    std::vector<Complex> terms(f.samples().size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = f[i] * std::conj(g[i]);
    return pairwise_sum(terms) * f.grid().cell_volume();
}

ComplexField operator+(const ComplexField& a, const ComplexField& b) {
    require_same_grid(a, b, "field sum");
    ComplexField out(a.grid(), a.time());
    for (std::size_t i = 0; i < out.samples().size(); ++i) out[i] = a[i] + b[i];
    return out;
}

ComplexField operator-(const ComplexField& a, const ComplexField& b) {
    require_same_grid(a, b, "field difference");
    ComplexField out(a.grid(), a.time());
    for (std::size_t i = 0; i < out.samples().size(); ++i) out[i] = a[i] - b[i];
    return out;
}

ComplexField operator*(Complex c, const ComplexField& f) {
    ComplexField out(f.grid(), f.time());
    for (std::size_t i = 0; i < out.samples().size(); ++i) out[i] = c * f[i];
    return out;
}

ComplexField operator*(double c, const ComplexField& f) { return Complex(c, 0.0) * f; }

void require_same_grid(const ComplexField& a, const ComplexField& b, const char* what) {
    if (!(a.grid() == b.grid()))
        throw ArgumentError(std::string(what) + ": grid mismatch");
}

}  // namespace nls
