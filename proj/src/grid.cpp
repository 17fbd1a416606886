#include "nls/grid.hpp"

#include <cmath>
#include <string>

#include "nls/errors.hpp"

namespace nls {

namespace {

// Memory budget: per-field sample cap (2^24 complex doubles = 256 MiB).
constexpr std::size_t kMaxSamples = std::size_t{1} << 24;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(int dim, int points_per_axis, double half_width)
    : dim_(dim), n_(points_per_axis), half_width_(half_width) {
    if (dim_ < 1 || dim_ > 3)
        throw ConfigError("grid: dimension must be 1, 2, or 3 (got " + std::to_string(dim_) + ")");
    if (!is_power_of_two(n_) || n_ < 8)
        throw ConfigError("grid: points per axis must be a power of two >= 8 (got " +
                          std::to_string(n_) + ")");
    if (!(half_width_ > 0.0) || !std::isfinite(half_width_))
        throw ConfigError("grid: half-width must be positive and finite");

    spacing_ = 2.0 * half_width_ / n_;
    size_ = 1;
    for (int a = 0; a < dim_; ++a) {
        if (size_ > kMaxSamples / static_cast<std::size_t>(n_))
            throw ConfigError("grid: total sample count exceeds the memory budget");
        size_ *= static_cast<std::size_t>(n_);
    }
    cell_volume_ = std::pow(spacing_, dim_);

    // DFT mode order: 0, 1, ..., n/2-1, -n/2, ..., -1.
    wavenumbers_.resize(static_cast<std::size_t>(n_));
    const double k0 = M_PI / half_width_;
    for (int m = 0; m < n_; ++m) {
        const int signed_m = m < n_ / 2 ? m : m - n_;
        wavenumbers_[static_cast<std::size_t>(m)] = k0 * signed_m;
    }
}

double Grid::nyquist() const { return M_PI * n_ / (2.0 * half_width_); }

Grid make_grid(int dim, int points_per_axis, double half_width) {
    return Grid(dim, points_per_axis, half_width);
}

}  // namespace nls
