#pragma once

#include <cstddef>
#include <vector>

#include "nls/types.hpp"

namespace nls {

// Periodic uniform lattice on [-L, L)^d with Fourier wavenumber bookkeeping.
// Wavenumbers per axis are k = (pi/L) * m with m in {-n/2, ..., n/2 - 1},
// stored in DFT order (m = 0, 1, ..., n/2 - 1, -n/2, ..., -1).
class Grid {
public:
    Grid(int dim, int points_per_axis, double half_width);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double half_width() const { return half_width_; }
    double spacing() const { return spacing_; }
    std::size_t size() const { return size_; }
    double cell_volume() const { return cell_volume_; }

    // x_j = -L + j h for j in [0, n).
    double coordinate(int j) const { return -half_width_ + spacing_ * j; }

    // Wavenumber of DFT mode index m in [0, n).
    double wavenumber(int m) const { return wavenumbers_[static_cast<std::size_t>(m)]; }
    const std::vector<double>& wavenumbers() const { return wavenumbers_; }

    // Largest per-axis wavenumber magnitude, pi*n/(2L).
    double nyquist() const;
    int nyquist_index() const { return n_ / 2; }

    // Linear index with axis 0 fastest.
    std::size_t index(int i0, int i1 = 0, int i2 = 0) const {
        std::size_t idx = static_cast<std::size_t>(i0);
        if (dim_ > 1) idx += static_cast<std::size_t>(n_) * static_cast<std::size_t>(i1);
        if (dim_ > 2) idx += static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_) * static_cast<std::size_t>(i2);
        return idx;
    }

    // Per-axis indices of a linear index, axis 0 fastest.
    void unravel(std::size_t idx, int out[3]) const {
        out[0] = static_cast<int>(idx % static_cast<std::size_t>(n_));
        out[1] = dim_ > 1 ? static_cast<int>((idx / static_cast<std::size_t>(n_)) % static_cast<std::size_t>(n_)) : 0;
        out[2] = dim_ > 2 ? static_cast<int>(idx / (static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_))) : 0;
    }

    // Physical coordinates of a linear sample index.
    Vec3 point(std::size_t idx) const {
        int ix[3];
        unravel(idx, ix);
        Vec3 p = kZeroVec;
        for (int a = 0; a < dim_; ++a) p[static_cast<std::size_t>(a)] = coordinate(ix[a]);
        return p;
    }

    // Wave vector of a linear mode index.
    Vec3 wavevector(std::size_t idx) const {
        int im[3];
        unravel(idx, im);
        Vec3 k = kZeroVec;
        for (int a = 0; a < dim_; ++a) k[static_cast<std::size_t>(a)] = wavenumber(im[a]);
        return k;
    }

    bool operator==(const Grid& other) const {
        return dim_ == other.dim_ && n_ == other.n_ && half_width_ == other.half_width_;
    }

private:
    int dim_;
    int n_;
    double half_width_;
    double spacing_;
    std::size_t size_;
    double cell_volume_;
    std::vector<double> wavenumbers_;
};

Grid make_grid(int dim, int points_per_axis, double half_width);

}  // namespace nls
