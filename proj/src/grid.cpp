#include "ecgl/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ecgl {

Grid::Grid(int dim, int n_per_axis, double half_length)
    : dim_(dim), n_(n_per_axis), half_length_(half_length) {
    if (dim != 3 && dim != 4)
        throw std::invalid_argument("Grid: dimension must be 3 or 4");
    if (n_per_axis < 8 || n_per_axis % 2 != 0)
        throw std::invalid_argument("Grid: n_per_axis must be even and >= 8");
    if (!(half_length > 0.0))
        throw std::invalid_argument("Grid: half_length must be positive");

    spacing_ = 2.0 * half_length / n_;
    size_ = 1;
    for (int a = 0; a < dim_; ++a) size_ *= static_cast<std::size_t>(n_);
    cell_volume_ = std::pow(spacing_, dim_);
    box_volume_ = std::pow(2.0 * half_length_, dim_);

    axis_k_.resize(n_);
    const double k0 = std::numbers::pi / half_length_;
    for (int i = 0; i < n_; ++i) {
        const int m = (i < n_ / 2) ? i : i - n_;
        axis_k_[i] = k0 * m;
    }

    ksq_.resize(size_);
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::size_t flat = 0; flat < size_; ++flat) {
        double s = 0.0;
        for (int a = 0; a < dim_; ++a) s += axis_k_[idx[a]] * axis_k_[idx[a]];
        ksq_[flat] = s;
        for (int a = dim_ - 1; a >= 0; --a) {
            if (++idx[a] < n_) break;
            idx[a] = 0;
        }
    }
}

double Grid::coord(int axis_index) const {
    return -half_length_ + axis_index * spacing_;
}

double Grid::wavenumber(int axis_index) const { return axis_k_[axis_index]; }

std::array<int, 4> Grid::unpack(std::size_t flat) const {
    std::array<int, 4> idx{0, 0, 0, 0};
    for (int a = dim_ - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % n_);
        flat /= n_;
    }
    return idx;
}

std::size_t Grid::pack(const std::array<int, 4>& idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim_; ++a) flat = flat * n_ + static_cast<std::size_t>(idx[a]);
    return flat;
}

double Grid::radius_sq(std::size_t flat) const {
    const auto idx = unpack(flat);
    double s = 0.0;
    for (int a = 0; a < dim_; ++a) {
        const double x = coord(idx[a]);
        s += x * x;
    }
    return s;
}

} // namespace ecgl
