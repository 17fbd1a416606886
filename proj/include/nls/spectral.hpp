#pragma once

#include <span>
#include <vector>

#include "nls/field.hpp"

namespace nls::spectral {

// Unnormalized FFTW transforms in place; sign -1 forward (e^{-ikx}),
// +1 backward. backward(forward(f)) = n^d * f.
void fft(const Grid& grid, std::vector<Complex>& data, int sign);

// Forward transform then scale by 1/n^d, so coefficients c_m satisfy
// f(x) = sum_m c_m e^{i k_m (x + L)} on the lattice.
std::vector<Complex> coefficients(const ComplexField& f);

// One field per axis; i*k multiplier with the Nyquist mode zeroed.
std::vector<ComplexField> gradient(const ComplexField& f);

ComplexField laplacian(const ComplexField& f);

// (1 - Delta)^{-1}, used by the ground-state iteration.
ComplexField helmholtz_inverse(const ComplexField& f);

// Sharp projector onto modes with Euclidean |k| <= cutoff.
ComplexField truncate(const ComplexField& f, double cutoff);

// ||nabla f||_2^2 by Parseval (no per-axis inverse transforms).
double gradient_norm_sq(const ComplexField& f);

// Fraction of mass carried by modes with |k|_inf in the top octave
// (> nyquist/2). Drives the aliasing guard in the evolver.
double top_octave_mass_fraction(const ComplexField& f);

// Trigonometric interpolation at scattered points (exact for band-limited
// fields). Points must lie inside [-L, L)^d; no implicit wrapping.
std::vector<Complex> resample(const ComplexField& f, std::span<const Vec3> points);

// Samples x -> f(lambda*x + shift) on f's own lattice, wrapping the
// evaluation points periodically. Exact on the trigonometric interpolant.
ComplexField resample_affine(const ComplexField& f, double lambda, const Vec3& shift);

// x -> f(x - shift) via the spectral phase e^{-i k . shift}; exact for any
// (not necessarily lattice-commensurate) shift.
ComplexField translate(const ComplexField& f, const Vec3& shift);

}  // namespace nls::spectral
