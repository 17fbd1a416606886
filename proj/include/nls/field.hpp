#pragma once

#include <functional>
#include <vector>

#include "nls/grid.hpp"
#include "nls/types.hpp"

namespace nls {

// Complex samples of u on a Grid at a fixed time. Value type: operations
// take fields by const reference and return new fields; sharing a field
// read-only across threads is safe.
class ComplexField {
public:
    explicit ComplexField(const Grid& grid, double time = 0.0);
    ComplexField(const Grid& grid, std::vector<Complex> samples, double time = 0.0);

    const Grid& grid() const { return grid_; }
    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    const std::vector<Complex>& samples() const { return samples_; }
    std::vector<Complex>& samples() { return samples_; }

    Complex operator[](std::size_t i) const { return samples_[i]; }
    Complex& operator[](std::size_t i) { return samples_[i]; }

    // Throws ArgumentError if any sample is non-finite.
    void check_finite() const;

    // Builds a field by evaluating fn at every lattice point.
    static ComplexField from_function(const Grid& grid,
                                      const std::function<Complex(const Vec3&)>& fn,
                                      double time = 0.0);

private:
    Grid grid_;
    std::vector<Complex> samples_;
    double time_;
};

// Lattice quadrature norms and inner products. All integrals are sums
// times h^d (exact for band-limited integrands).
double lp_norm(const ComplexField& f, double p);
double mass(const ComplexField& f);  // ||f||_2^2
Complex inner_product(const ComplexField& f, const ComplexField& g);

// Pointwise algebra; grids must match.
ComplexField operator+(const ComplexField& a, const ComplexField& b);
ComplexField operator-(const ComplexField& a, const ComplexField& b);
ComplexField operator*(Complex c, const ComplexField& f);
ComplexField operator*(double c, const ComplexField& f);

void require_same_grid(const ComplexField& a, const ComplexField& b, const char* what);

}  // namespace nls
