#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nls {

using Complex = std::complex<double>;

// Spatial vector. Components beyond the grid dimension are kept at zero.
using Vec3 = std::array<double, 3>;

inline constexpr Vec3 kZeroVec{0.0, 0.0, 0.0};

inline double dot(const Vec3& a, const Vec3& b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec3& a, int d) { return dot(a, a, d); }

// Pairwise (cascade) summation. Deterministic for a fixed element order and
// accurate to ~sqrt(log N) ulps, which the reduction contracts rely on.
template <typename T>
T pairwise_sum(std::span<const T> v) {
    if (v.size() <= 8) {
        T s{};
        for (const T& x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
    return pairwise_sum(std::span<const T>(v));
}

}  // namespace nls
